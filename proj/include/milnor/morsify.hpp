#ifndef MILNOR_MORSIFY_HPP
#define MILNOR_MORSIFY_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "milnor/polynomial.hpp"
#include "milnor/sphere_critical.hpp"

namespace milnor {

struct PerturbationParams {
    Eigen::VectorXd t;
    double magnitude = 0.0;
    std::uint64_t seed = 0;
};

// Outcome of checking Morse genericity of f_t on the delta-sphere.
struct MorseValidationReport {
    bool nondegenerate = true;
    double min_abs_restricted_hessian_det = std::numeric_limits<double>::infinity();
    bool distinct_values = true;
    double min_value_gap = std::numeric_limits<double>::infinity();
    bool values_in_band = true;  // ambient critical values within (-eps, eps)
    int num_points = 0;
    int num_ambient_critical_points = 0;

    bool passed() const { return nondegenerate && distinct_values && values_in_band; }
};

struct MorsifyConfig {
    std::uint64_t seed = 0;
    int max_attempts = 32;
    double magnitude = 0.0;  // 0: default 0.05 * delta * max(1, coefficient scale)
    double nondegeneracy_tol = 1e-8;
    double value_gap_rel_tol = 1e-9;
    SolverConfig solver;
};

struct MorsifyResult {
    PerturbationParams params;
    MorseValidationReport report;
    Polynomial f_t;
    std::vector<CriticalPoint> points;      // sphere critical points of f_t
    std::vector<double> ambient_values;     // interior critical values of f_t
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    double epsilon_bracket_lo = 0.0;        // raw max |ambient value|
    double epsilon_bracket_hi = 0.0;        // min positive sphere value (or sampled max fallback)
    bool empty_positive_fibre = false;
    int attempts_used = 0;
};

struct MorsifyExhaustedError : std::runtime_error {
    MorsifyExhaustedError(const std::string& what, MorseValidationReport last)
        : std::runtime_error(what), last_report(last) {}
    MorseValidationReport last_report;
};

// t drawn uniformly from the ball of radius magnitude; deterministic per seed.
PerturbationParams sample_parameters(std::uint64_t seed, double magnitude, int dim);

// Checks the report invariants against the given critical points. Ambient
// critical values are located internally with the supplied solver settings.
MorseValidationReport validate_morse(const Polynomial& f_t, const std::vector<CriticalPoint>& points,
                                     double epsilon, double delta, const MorsifyConfig& cfg = {});

// Attempt schedule: attempt k (1-based) draws with magnitude_0 / 2^floor(log2 k),
// so the magnitude at attempt 2k is half the one at attempt k.
double attempt_magnitude(double magnitude0, int attempt);

// Samples perturbations until f_t restricted to the delta-sphere is Morse
// with distinct critical values and a nonempty epsilon band. Throws
// MorsifyExhaustedError with the last report when no attempt passes.
MorsifyResult morsify(const Polynomial& f, double delta, const MorsifyConfig& cfg = {});

// Variant with a caller-fixed perturbation (validation only, no resampling).
MorsifyResult morsify_with_fixed_t(const Polynomial& f, double delta, const Eigen::VectorXd& t,
                                   const MorsifyConfig& cfg = {});

}  // namespace milnor

#endif
