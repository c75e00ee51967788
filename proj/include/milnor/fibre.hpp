#ifndef MILNOR_FIBRE_HPP
#define MILNOR_FIBRE_HPP

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

#include "milnor/morsify.hpp"
#include "milnor/polynomial.hpp"
#include "milnor/sphere_critical.hpp"

namespace milnor {

struct BandEmptyError : std::runtime_error {
    BandEmptyError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo(lo), hi(hi) {}
    double lo, hi;
};

struct EmptyPositiveFibreError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Heuristic transversality verdict for the user-supplied radius: a witness
// is a point 0 < |x| <= delta with f(x) = 0 and grad f(x) parallel to x.
struct RadiusVerdict {
    bool pass = true;
    std::optional<Eigen::VectorXd> witness;
    int starts_used = 0;
};

struct SelectedEpsilon {
    double epsilon = 0.0;
    double bracket_lo = 0.0;  // raw max |ambient critical value| (before flooring)
    double bracket_hi = 0.0;  // min positive sphere critical value
    bool used_sphere_max_fallback = false;
};

struct GreatCircleViolation {
    Eigen::VectorXd point;      // base point on the sphere
    Eigen::VectorXd direction;  // unit tangent spanning the circle with the point
    double min_value_on_circle = 0.0;
};

struct GreatCircleVerdict {
    std::optional<GreatCircleViolation> violation;  // empty: no violation found
    int samples_used = 0;
    bool automatic = false;  // n <= 2; reported alongside the sampling result

    bool violation_found() const { return violation.has_value(); }
};

struct GreatCircleConfig {
    int num_circles = 512;
    int grid_points = 720;
    int refine_grid_points = 10000;
    std::uint64_t seed = 0;
    ExecMode exec = ExecMode::parallel;
};

struct EpsilonRationale {
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::vector<double> ambient_values;
    bool used_sphere_max_fallback = false;
};

struct MilnorData {
    double delta = 1.0;
    double epsilon = 0.0;
    PerturbationParams t;
    RadiusVerdict delta_check;
    EpsilonRationale epsilon_rationale;
};

enum class FibreSign { positive, negative };

RadiusVerdict check_milnor_radius(const Polynomial& f, double delta, const SolverConfig& cfg = {});

// epsilon = sqrt(a * b) with a = max(|ambient values|, 1e-12) and b the
// smallest positive sphere critical value. With no positive critical value,
// falls back to half the sampled sphere maximum when that is positive
// (throws EmptyPositiveFibreError otherwise); throws BandEmptyError when
// a >= b, which callers treat as "shrink t and retry".
SelectedEpsilon select_epsilon(const std::vector<CriticalPoint>& sphere_points,
                               const std::vector<double>& ambient_values,
                               double sphere_max_estimate = std::numeric_limits<double>::quiet_NaN());

std::vector<CriticalPoint> filter_fibre(const std::vector<CriticalPoint>& points, double epsilon,
                                        FibreSign sign);

// Falsifier for the hypothesis that every great circle meeting the fibre
// region {f_t >= eps} on the sphere also leaves it. Absence of a violation
// is "not found", never "proven".
GreatCircleVerdict great_circle_check(const Polynomial& f_t, double delta, double epsilon,
                                      const GreatCircleConfig& cfg = {});

// Max of f over a dense sphere sample (epsilon fallback input).
double sphere_max_estimate(const Polynomial& f, double delta, int samples = 8192,
                           std::uint64_t seed = 0);

}  // namespace milnor

#endif
