#include "milnor/morsify.hpp"

#include <cmath>

#include "milnor/fibre.hpp"
#include "milnor/sampling.hpp"

namespace milnor {

PerturbationParams sample_parameters(std::uint64_t seed, double magnitude, int dim) {
    if (magnitude < 0) throw std::invalid_argument("magnitude must be non-negative");
    PerturbationParams p;
    p.seed = seed;
    p.magnitude = magnitude;
    Rng rng(seed);
    p.t = sample_ball(rng, dim, magnitude);
    return p;
}

double attempt_magnitude(double magnitude0, int attempt) {
    int halvings = 0;
    for (int k = attempt; k > 1; k >>= 1) ++halvings;
    return std::ldexp(magnitude0, -halvings);
}

MorseValidationReport validate_morse(const Polynomial& f_t, const std::vector<CriticalPoint>& points,
                                     double epsilon, double delta, const MorsifyConfig& cfg) {
    MorseValidationReport report;
    report.num_points = static_cast<int>(points.size());

    for (const auto& p : points) {
        double det = 1.0;
        for (Eigen::Index i = 0; i < p.tangent_spectrum.size(); ++i) det *= p.tangent_spectrum[i];
        report.min_abs_restricted_hessian_det =
            std::min(report.min_abs_restricted_hessian_det, std::abs(det));
        if (p.degenerate) report.nondegenerate = false;
    }
    if (report.min_abs_restricted_hessian_det <= cfg.nondegeneracy_tol) report.nondegenerate = false;

    double max_abs_value = 0.0;
    for (const auto& p : points) max_abs_value = std::max(max_abs_value, std::abs(p.value));
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        // points sorted by value ascending
        report.min_value_gap = std::min(report.min_value_gap, points[i + 1].value - points[i].value);
    }
    if (report.min_value_gap <= cfg.value_gap_rel_tol * (1.0 + max_abs_value))
        report.distinct_values = false;

    SolverConfig solver = cfg.solver;
    std::vector<double> ambient = ambient_critical_values(f_t, delta, solver);
    report.num_ambient_critical_points = static_cast<int>(ambient.size());
    for (double v : ambient)
        if (!(std::abs(v) < epsilon)) report.values_in_band = false;

    return report;
}

namespace {

MorsifyResult evaluate_attempt(const Polynomial& f, double delta, const PerturbationParams& params,
                               const MorsifyConfig& cfg) {
    MorsifyResult result;
    result.params = params;
    result.f_t = perturb(f, params.t);

    SolverConfig solver = cfg.solver;
    solver.seed = cfg.solver.seed ^ params.seed;
    result.points = find_critical_points(result.f_t, delta, solver);
    result.ambient_values = ambient_critical_values(result.f_t, delta, solver);

    double sphere_max = sphere_max_estimate(result.f_t, delta, 8192, solver.seed);
    try {
        SelectedEpsilon sel = select_epsilon(result.points, result.ambient_values, sphere_max);
        result.epsilon = sel.epsilon;
        result.epsilon_bracket_lo = sel.bracket_lo;
        result.epsilon_bracket_hi = sel.bracket_hi;
    } catch (const EmptyPositiveFibreError&) {
        result.empty_positive_fibre = true;
    }
    // BandEmptyError propagates: the caller shrinks t and retries.

    double eps_for_band = result.empty_positive_fibre
                              ? std::numeric_limits<double>::infinity()
                              : result.epsilon;
    result.report = validate_morse(result.f_t, result.points, eps_for_band, delta, cfg);
    return result;
}

}  // namespace

MorsifyResult morsify(const Polynomial& f, double delta, const MorsifyConfig& cfg) {
    if (cfg.max_attempts < 1) throw std::invalid_argument("max_attempts must be at least 1");
    const int dim = static_cast<int>(f.num_variables());
    const double mag0 =
        cfg.magnitude > 0 ? cfg.magnitude : 0.05 * delta * std::max(1.0, f.coefficient_scale());

    Rng master(cfg.seed);
    MorseValidationReport last_report;
    for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
        PerturbationParams params =
            sample_parameters(master.derive(static_cast<std::uint64_t>(attempt)),
                              attempt_magnitude(mag0, attempt), dim);
        try {
            MorsifyResult result = evaluate_attempt(f, delta, params, cfg);
            last_report = result.report;
            if (result.report.passed()) {
                result.attempts_used = attempt;
                return result;
            }
        } catch (const BandEmptyError&) {
            last_report = MorseValidationReport{};
            last_report.values_in_band = false;
        }
    }
    throw MorsifyExhaustedError("no perturbation passed Morse validation after " +
                                    std::to_string(cfg.max_attempts) + " attempts",
                                last_report);
}

MorsifyResult morsify_with_fixed_t(const Polynomial& f, double delta, const Eigen::VectorXd& t,
                                   const MorsifyConfig& cfg) {
    if (static_cast<std::size_t>(t.size()) != f.num_variables())
        throw DimensionError("perturbation vector length mismatch");
    PerturbationParams params;
    params.t = t;
    params.magnitude = t.norm();
    params.seed = cfg.seed;
    MorsifyResult result = evaluate_attempt(f, delta, params, cfg);
    result.attempts_used = 1;
    return result;
}

}  // namespace milnor
