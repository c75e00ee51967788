#ifndef MILNOR_NEWTON_HPP
#define MILNOR_NEWTON_HPP

#include <Eigen/Dense>

#include <functional>

namespace milnor {

struct NewtonResult {
    Eigen::VectorXd x;
    double residual_inf = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
};

// Damped Newton for a small square system. residual and jacobian are
// evaluated at the same point; steps are halved (up to 6 times) when the
// residual norm does not decrease.
template <typename ResidualFn, typename JacobianFn>
NewtonResult newton_solve(const Eigen::VectorXd& start, ResidualFn&& residual, JacobianFn&& jacobian,
                          double tol, int max_iter) {
    NewtonResult res;
    Eigen::VectorXd x = start;
    Eigen::VectorXd g = residual(x);
    double gnorm = g.template lpNorm<Eigen::Infinity>();
    for (int it = 0; it < max_iter; ++it) {
        res.iterations = it;
        if (!std::isfinite(gnorm)) break;
        if (gnorm < tol) {
            res.converged = true;
            break;
        }
        Eigen::MatrixXd J = jacobian(x);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible() && lu.rank() < J.rows()) {
            // Singular Jacobian away from a root: give up on this start.
            if (gnorm >= tol) break;
        }
        Eigen::VectorXd dx = lu.solve(-g);
        if (!dx.allFinite()) break;
        double step = 1.0;
        bool accepted = false;
        for (int back = 0; back < 6; ++back) {
            Eigen::VectorXd xn = x + step * dx;
            Eigen::VectorXd gn = residual(xn);
            double gn_norm = gn.template lpNorm<Eigen::Infinity>();
            if (std::isfinite(gn_norm) && (gn_norm < gnorm || gn_norm < tol)) {
                x = xn;
                g = gn;
                gnorm = gn_norm;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    if (gnorm < tol) res.converged = true;
    res.x = x;
    res.residual_inf = gnorm;
    return res;
}

}  // namespace milnor

#endif
