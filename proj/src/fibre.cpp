#include "milnor/fibre.hpp"

#include <algorithm>
#include <cmath>

#include "milnor/newton.hpp"
#include "milnor/sampling.hpp"

namespace milnor {

RadiusVerdict check_milnor_radius(const Polynomial& f, double delta, const SolverConfig& cfg) {
    if (delta <= 0) throw std::invalid_argument("delta must be positive");
    RadiusVerdict verdict;

    const int d = static_cast<int>(f.num_variables());
    const CompiledSystem sys(f);
    const double scale = 1.0 + f.coefficient_scale();
    // The origin solves the system trivially (the germ is singular there);
    // witnesses closer than this floor are discarded.
    const double origin_floor = 1e-3 * delta;

    // Unknowns (x, mu): grad f(x) = mu x and f(x) = 0 detect a level set
    // tangent to the sphere through x.
    auto residual = [&](const Eigen::VectorXd& z) {
        Eigen::VectorXd x = z.head(d);
        double mu = z[d];
        Eigen::VectorXd r(d + 1);
        r.head(d) = sys.grad(x) - mu * x;
        r[d] = sys.value(x);
        return r;
    };
    auto jacobian = [&](const Eigen::VectorXd& z) {
        Eigen::VectorXd x = z.head(d);
        double mu = z[d];
        Eigen::MatrixXd j(d + 1, d + 1);
        j.topLeftCorner(d, d) = sys.hess(x) - mu * Eigen::MatrixXd::Identity(d, d);
        j.topRightCorner(d, 1) = -x;
        j.bottomLeftCorner(1, d) = sys.grad(x).transpose();
        j(d, d) = 0.0;
        return j;
    };

    const int starts = 2 * cfg.starts_for_dimension(d);
    std::vector<Eigen::VectorXd> xs = ball_starts(d, delta, starts, cfg.seed ^ 0xc0ffeeULL);
    verdict.starts_used = starts;

    std::vector<Eigen::VectorXd> witnesses(xs.size());
    std::vector<char> hit(xs.size(), 0);
    parallel_for(xs.size(), cfg.exec, [&](std::size_t i) {
        const Eigen::VectorXd& x0 = xs[i];
        if (x0.norm() < origin_floor) return;
        Eigen::VectorXd z0(d + 1);
        z0.head(d) = x0;
        double n2 = x0.squaredNorm();
        z0[d] = n2 > 0 ? x0.dot(sys.grad(x0)) / n2 : 0.0;
        NewtonResult nr = newton_solve(z0, residual, jacobian, cfg.newton_tol, cfg.newton_max_iter);
        if (!nr.converged) return;
        Eigen::VectorXd x = nr.x.head(d);
        double norm = x.norm();
        if (norm < origin_floor || norm > delta * (1.0 + 1e-9)) return;
        double mu = nr.x[d];
        if ((sys.grad(x) - mu * x).lpNorm<Eigen::Infinity>() > 1e-8 * scale) return;
        if (std::abs(sys.value(x)) > 1e-8 * scale) return;
        witnesses[i] = x;
        hit[i] = 1;
    });

    for (std::size_t i = 0; i < hit.size(); ++i) {
        if (hit[i]) {
            verdict.pass = false;
            verdict.witness = witnesses[i];
            break;
        }
    }
    return verdict;
}

SelectedEpsilon select_epsilon(const std::vector<CriticalPoint>& sphere_points,
                               const std::vector<double>& ambient_values,
                               double sphere_max_estimate) {
    constexpr double kFloor = 1e-12;
    SelectedEpsilon sel;

    double a_raw = 0.0;
    for (double v : ambient_values) a_raw = std::max(a_raw, std::abs(v));
    sel.bracket_lo = a_raw;

    double b = std::numeric_limits<double>::infinity();
    for (const auto& p : sphere_points)
        if (p.value > 0) b = std::min(b, p.value);

    if (!std::isfinite(b)) {
        if (std::isfinite(sphere_max_estimate) && sphere_max_estimate > 0) {
            sel.used_sphere_max_fallback = true;
            sel.bracket_hi = sphere_max_estimate;
            double eps = 0.5 * sphere_max_estimate;
            if (std::max(a_raw, kFloor) >= eps)
                throw BandEmptyError("epsilon band empty (fallback)", a_raw, sphere_max_estimate);
            sel.epsilon = eps;
            return sel;
        }
        throw EmptyPositiveFibreError("no positive critical value on the sphere: positive fibre empty");
    }

    sel.bracket_hi = b;
    double a = std::max(a_raw, kFloor);
    if (a >= b)
        throw BandEmptyError("epsilon band empty: ambient critical values reach the sphere values", a_raw, b);
    sel.epsilon = std::sqrt(a * b);
    return sel;
}

std::vector<CriticalPoint> filter_fibre(const std::vector<CriticalPoint>& points, double epsilon,
                                        FibreSign sign) {
    std::vector<CriticalPoint> out;
    for (const auto& p : points) {
        if (sign == FibreSign::positive && p.value > epsilon) out.push_back(p);
        if (sign == FibreSign::negative && p.value < -epsilon) out.push_back(p);
    }
    return out;
}

double sphere_max_estimate(const Polynomial& f, double delta, int samples, std::uint64_t seed) {
    CompiledPoly cp(f);
    std::vector<Eigen::VectorXd> pts =
        sphere_starts(static_cast<int>(f.num_variables()), delta, samples, seed ^ 0x517e0aabULL);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts) best = std::max(best, cp(p));
    return best;
}

namespace {

double circle_min(const CompiledPoly& f, const Eigen::VectorXd& p, const Eigen::VectorXd& dir,
                  double delta, int grid) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd q(p.size());
    for (int i = 0; i < grid; ++i) {
        double theta = 2.0 * M_PI * i / grid;
        q = std::cos(theta) * p + (delta * std::sin(theta)) * dir;
        best = std::min(best, f(q));
    }
    return best;
}

}  // namespace

GreatCircleVerdict great_circle_check(const Polynomial& f_t, double delta, double epsilon,
                                      const GreatCircleConfig& cfg) {
    const int d = static_cast<int>(f_t.num_variables());
    const CompiledPoly f(f_t);

    GreatCircleVerdict verdict;
    verdict.automatic = (d - 1) <= 2;

    // Sequential rejection sampling of (p, v) pairs keeps the stream
    // deterministic; circle evaluations then run data-parallel.
    Rng rng(cfg.seed ^ 0x9c1c5e1fULL);
    std::vector<Eigen::VectorXd> base, dir;
    const int max_tries = cfg.num_circles * 64;
    int tries = 0;
    while (static_cast<int>(base.size()) < cfg.num_circles && tries < max_tries) {
        ++tries;
        Eigen::VectorXd g = rng.normal_vector(d);
        double n = g.norm();
        if (n == 0) continue;
        Eigen::VectorXd p = (delta / n) * g;
        if (f(p) < epsilon) continue;  // p must lie in the fibre region
        Eigen::VectorXd v = rng.normal_vector(d);
        Eigen::VectorXd phat = p / delta;
        v -= v.dot(phat) * phat;
        double vn = v.norm();
        if (vn < 1e-12) continue;
        base.push_back(p);
        dir.push_back(v / vn);
    }
    verdict.samples_used = static_cast<int>(base.size());

    std::vector<double> mins(base.size());
    parallel_for(base.size(), cfg.exec, [&](std::size_t i) {
        double m = circle_min(f, base[i], dir[i], delta, cfg.grid_points);
        // Candidates and near-candidates get a dense pass; violations must
        // survive the fine grid.
        if (m > 0.99 * epsilon) m = circle_min(f, base[i], dir[i], delta, cfg.refine_grid_points);
        mins[i] = m;
    });

    for (std::size_t i = 0; i < mins.size(); ++i) {
        if (mins[i] > epsilon) {
            GreatCircleViolation v;
            v.point = base[i];
            v.direction = dir[i];
            v.min_value_on_circle = mins[i];
            verdict.violation = std::move(v);
            break;  // first by sample order: deterministic
        }
    }
    return verdict;
}

}  // namespace milnor
