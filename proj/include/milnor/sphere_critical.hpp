#ifndef MILNOR_SPHERE_CRITICAL_HPP
#define MILNOR_SPHERE_CRITICAL_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "milnor/parallel.hpp"
#include "milnor/polynomial.hpp"

namespace milnor {

struct DegenerateSpectrumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A solution of grad f_t(p) = lambda p on the delta-sphere, classified by
// the spectrum of the restricted Hessian on the tangent space.
struct CriticalPoint {
    Eigen::VectorXd location;
    double value = 0.0;
    double multiplier = 0.0;
    Eigen::VectorXd tangent_spectrum;  // n eigenvalues, ascending
    int morse_index = 0;               // negative eigenvalue count; meaningless if degenerate
    double residual = 0.0;             // |grad f_t(p) - lambda p|_inf + ||p| - delta|
    bool degenerate = false;           // some tangent eigenvalue within tolerance of zero
};

struct SolverConfig {
    int num_starts = 0;          // 0: default 200 * 2^n
    int newton_max_iter = 64;
    double newton_tol = 1e-12;
    double dedup_radius = 0.0;   // 0: default 1e-6 * delta
    std::uint64_t seed = 0;
    double degeneracy_tol = 1e-8;
    ExecMode exec = ExecMode::parallel;

    int starts_for_dimension(int ambient_dim) const;
    double dedup_for_radius(double delta) const;
};

// Enumerates critical points of f_t restricted to |x| = delta, sorted by
// value ascending. Multi-start Newton on the Lagrange system; for n = 1 an
// exhaustive angle sweep is merged in for completeness.
std::vector<CriticalPoint> find_critical_points(const Polynomial& f_t, double delta,
                                                const SolverConfig& cfg = {});

// (p . g) / delta^2
double lagrange_multiplier(const Eigen::VectorXd& p, const Eigen::VectorXd& g, double delta);

// B = Q^T (H_{f_t}(p) - lambda I) Q for an orthonormal tangent basis Q of p-perp.
Eigen::MatrixXd restricted_hessian(const Polynomial& f_t, const Eigen::VectorXd& p, double lambda);

// Deterministic orthonormal basis of the hyperplane orthogonal to p (n columns).
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& p);

// Count of negative eigenvalues; throws DegenerateSpectrumError when an
// eigenvalue sits within tol of zero.
int morse_index(const Eigen::VectorXd& spectrum, double tol = 1e-8);

// Interior critical points of f_t (grad f_t = 0) inside the open delta-ball;
// used for the epsilon band. Heuristic multi-start search.
std::vector<Eigen::VectorXd> ambient_critical_points(const Polynomial& f_t, double delta,
                                                     const SolverConfig& cfg = {});

std::vector<double> ambient_critical_values(const Polynomial& f_t, double delta,
                                            const SolverConfig& cfg = {});

}  // namespace milnor

#endif
