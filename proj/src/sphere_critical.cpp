#include "milnor/sphere_critical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "milnor/newton.hpp"
#include "milnor/sampling.hpp"

namespace milnor {

int SolverConfig::starts_for_dimension(int ambient_dim) const {
    if (num_starts > 0) return num_starts;
    int n = ambient_dim - 1;
    return 200 << std::min(n, 10);
}

double SolverConfig::dedup_for_radius(double delta) const {
    return dedup_radius > 0 ? dedup_radius : 1e-6 * delta;
}

double lagrange_multiplier(const Eigen::VectorXd& p, const Eigen::VectorXd& g, double delta) {
    return p.dot(g) / (delta * delta);
}

Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& p) {
    Eigen::Index d = p.size();
    // Householder reflection mapping e_k -> p/|p| with k chosen against
    // cancellation; the remaining columns span the tangent hyperplane.
    Eigen::VectorXd u = p.normalized();
    Eigen::Index k;
    u.cwiseAbs().maxCoeff(&k);
    double sign = u[k] >= 0 ? 1.0 : -1.0;
    Eigen::VectorXd w = u;
    w[k] += sign;
    w.normalize();
    Eigen::MatrixXd house = Eigen::MatrixXd::Identity(d, d) - 2.0 * w * w.transpose();
    // house * e_k = -sign*u; columns other than k are orthonormal to u.
    Eigen::MatrixXd q(d, d - 1);
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < d; ++j) {
        if (j == k) continue;
        q.col(col++) = house.col(j);
    }
    return q;
}

Eigen::MatrixXd restricted_hessian(const Polynomial& f_t, const Eigen::VectorXd& p, double lambda) {
    PolyMatrix h = hessian(f_t);
    Eigen::MatrixXd hm = h.evaluate(p);
    Eigen::MatrixXd q = tangent_basis(p);
    Eigen::MatrixXd b = q.transpose() * (hm - lambda * Eigen::MatrixXd::Identity(p.size(), p.size())) * q;
    return 0.5 * (b + b.transpose());  // kill round-off asymmetry
}

int morse_index(const Eigen::VectorXd& spectrum, double tol) {
    int count = 0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        if (std::abs(spectrum[i]) < tol)
            throw DegenerateSpectrumError("tangent eigenvalue within tolerance of zero");
        if (spectrum[i] < 0) ++count;
    }
    return count;
}

namespace {

struct Candidate {
    Eigen::VectorXd x;
    double lambda = 0.0;
    double grad_residual = 0.0;
    double sphere_residual = 0.0;
    bool ok = false;
};

// One Newton run on G(x, l) = (grad f(x) - l x, (|x|^2 - delta^2)/2).
Candidate solve_from(const CompiledSystem& sys, double delta, const Eigen::VectorXd& start,
                     const SolverConfig& cfg) {
    const int d = sys.dimension();
    Eigen::VectorXd z0(d + 1);
    z0.head(d) = start;
    z0[d] = lagrange_multiplier(start, sys.grad(start), delta);

    auto residual = [&](const Eigen::VectorXd& z) {
        Eigen::VectorXd x = z.head(d);
        double l = z[d];
        Eigen::VectorXd r(d + 1);
        r.head(d) = sys.grad(x) - l * x;
        r[d] = 0.5 * (x.squaredNorm() - delta * delta);
        return r;
    };
    auto jacobian = [&](const Eigen::VectorXd& z) {
        Eigen::VectorXd x = z.head(d);
        double l = z[d];
        Eigen::MatrixXd j(d + 1, d + 1);
        j.topLeftCorner(d, d) = sys.hess(x) - l * Eigen::MatrixXd::Identity(d, d);
        j.topRightCorner(d, 1) = -x;
        j.bottomLeftCorner(1, d) = x.transpose();
        j(d, d) = 0.0;
        return j;
    };

    NewtonResult nr = newton_solve(z0, residual, jacobian, cfg.newton_tol, cfg.newton_max_iter);
    Candidate c;
    if (!nr.converged) return c;

    // Project exactly onto the sphere and recompute the multiplier.
    Eigen::VectorXd x = nr.x.head(d);
    double norm = x.norm();
    if (norm == 0.0) return c;
    x *= delta / norm;
    Eigen::VectorXd g = sys.grad(x);
    double l = lagrange_multiplier(x, g, delta);
    c.x = x;
    c.lambda = l;
    c.grad_residual = (g - l * x).lpNorm<Eigen::Infinity>();
    c.sphere_residual = std::abs(x.norm() - delta);
    c.ok = true;
    return c;
}

// d/dtheta f(delta cos, delta sin) for the n = 1 completeness sweep.
double circle_derivative(const CompiledSystem& sys, double delta, double theta) {
    Eigen::VectorXd p(2);
    p << delta * std::cos(theta), delta * std::sin(theta);
    Eigen::VectorXd g = sys.grad(p);
    return -delta * std::sin(theta) * g[0] + delta * std::cos(theta) * g[1];
}

std::vector<Eigen::VectorXd> angle_sweep_candidates(const CompiledSystem& sys, double delta,
                                                    ExecMode exec) {
    const int segments = 8192;
    std::vector<double> vals(segments + 1);
    parallel_for(static_cast<std::size_t>(segments + 1), exec, [&](std::size_t i) {
        vals[i] = circle_derivative(sys, delta, 2.0 * M_PI * static_cast<double>(i) / segments);
    });
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < segments; ++i) {
        double a = vals[static_cast<std::size_t>(i)];
        double b = vals[static_cast<std::size_t>(i) + 1];
        double lo = 2.0 * M_PI * i / segments;
        double hi = 2.0 * M_PI * (i + 1) / segments;
        double root;
        if (a == 0.0) {
            root = lo;
        } else if (a * b < 0.0) {
            double flo = a;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = circle_derivative(sys, delta, mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0) == (fm < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            root = 0.5 * (lo + hi);
        } else {
            continue;
        }
        Eigen::VectorXd p(2);
        p << delta * std::cos(root), delta * std::sin(root);
        out.push_back(p);
    }
    return out;
}

}  // namespace

std::vector<CriticalPoint> find_critical_points(const Polynomial& f_t, double delta,
                                                const SolverConfig& cfg) {
    if (delta <= 0) throw std::invalid_argument("delta must be positive");
    if (f_t.is_constant()) throw std::invalid_argument("f_t must be non-constant");
    if (cfg.newton_max_iter <= 0 || cfg.newton_tol <= 0 || cfg.num_starts < 0 ||
        cfg.degeneracy_tol <= 0)
        throw std::invalid_argument("solver configuration values must be positive");
    if (cfg.dedup_for_radius(delta) <= cfg.newton_tol)
        throw std::invalid_argument("dedup radius must exceed the Newton tolerance");

    const int d = static_cast<int>(f_t.num_variables());
    const CompiledSystem sys(f_t);
    const double coeff_scale = f_t.coefficient_scale();
    const double grad_tol = 1e-8 * (1.0 + coeff_scale);
    const double sphere_tol = 1e-10;

    std::vector<Eigen::VectorXd> starts = sphere_starts(d, delta, cfg.starts_for_dimension(d), cfg.seed);
    if (d == 2) {
        auto sweep = angle_sweep_candidates(sys, delta, cfg.exec);
        starts.insert(starts.end(), sweep.begin(), sweep.end());
    }

    std::vector<Candidate> cands(starts.size());
    parallel_for(starts.size(), cfg.exec, [&](std::size_t i) {
        cands[i] = solve_from(sys, delta, starts[i], cfg);
    });

    // Keep converged candidates meeting the residual bounds; best first so
    // dedup retains the lowest-residual representative.
    std::vector<const Candidate*> good;
    for (const auto& c : cands)
        if (c.ok && c.grad_residual < grad_tol && c.sphere_residual < sphere_tol) good.push_back(&c);
    std::sort(good.begin(), good.end(), [](const Candidate* a, const Candidate* b) {
        return a->grad_residual + a->sphere_residual < b->grad_residual + b->sphere_residual;
    });

    const double dedup = cfg.dedup_for_radius(delta);
    std::vector<const Candidate*> reps;
    for (const Candidate* c : good) {
        bool dup = false;
        for (const Candidate* r : reps) {
            if ((c->x - r->x).norm() < dedup) {
                dup = true;
                break;
            }
        }
        if (!dup) reps.push_back(c);
    }

    std::vector<CriticalPoint> points;
    points.reserve(reps.size());
    for (const Candidate* c : reps) {
        CriticalPoint p;
        p.location = c->x;
        p.multiplier = c->lambda;
        p.value = sys.value(c->x);
        p.residual = c->grad_residual + c->sphere_residual;
        Eigen::MatrixXd b = restricted_hessian(f_t, c->x, c->lambda);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
        p.tangent_spectrum = eig.eigenvalues();
        p.degenerate = p.tangent_spectrum.size() > 0 &&
                       p.tangent_spectrum.cwiseAbs().minCoeff() < cfg.degeneracy_tol;
        p.morse_index = static_cast<int>((p.tangent_spectrum.array() < 0.0).count());
        points.push_back(std::move(p));
    }

    std::sort(points.begin(), points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        if (a.value != b.value) return a.value < b.value;
        return std::lexicographical_compare(a.location.data(), a.location.data() + a.location.size(),
                                            b.location.data(), b.location.data() + b.location.size());
    });

    if (points.empty() && d == 2)
        std::fprintf(stderr,
                     "warning: no sphere critical points found for a non-constant restriction (n=1); "
                     "the angle sweep should be exhaustive\n");
    return points;
}

std::vector<Eigen::VectorXd> ambient_critical_points(const Polynomial& f_t, double delta,
                                                     const SolverConfig& cfg) {
    const int d = static_cast<int>(f_t.num_variables());
    const CompiledSystem sys(f_t);
    const double grad_tol = 1e-10 * (1.0 + f_t.coefficient_scale());

    auto residual = [&](const Eigen::VectorXd& x) { return sys.grad(x); };
    auto jacobian = [&](const Eigen::VectorXd& x) { return sys.hess(x); };

    std::vector<Eigen::VectorXd> starts = ball_starts(d, delta, cfg.starts_for_dimension(d), cfg.seed ^ 0xa5a5a5a5ULL);
    std::vector<Eigen::VectorXd> found(starts.size());
    std::vector<char> ok(starts.size(), 0);
    parallel_for(starts.size(), cfg.exec, [&](std::size_t i) {
        NewtonResult nr = newton_solve(starts[i], residual, jacobian, cfg.newton_tol, cfg.newton_max_iter);
        if (nr.converged && nr.x.norm() <= delta && nr.residual_inf < grad_tol) {
            found[i] = nr.x;
            ok[i] = 1;
        }
    });

    const double dedup = cfg.dedup_for_radius(delta);
    std::vector<Eigen::VectorXd> reps;
    for (std::size_t i = 0; i < found.size(); ++i) {
        if (!ok[i]) continue;
        bool dup = false;
        for (const auto& r : reps)
            if ((found[i] - r).norm() < dedup) {
                dup = true;
                break;
            }
        if (!dup) reps.push_back(found[i]);
    }
    std::sort(reps.begin(), reps.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    return reps;
}

std::vector<double> ambient_critical_values(const Polynomial& f_t, double delta,
                                            const SolverConfig& cfg) {
    std::vector<double> values;
    for (const auto& x : ambient_critical_points(f_t, delta, cfg)) values.push_back(f_t.evaluate(x));
    return values;
}

}  // namespace milnor
