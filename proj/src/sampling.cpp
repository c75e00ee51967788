#include "milnor/sampling.hpp"

namespace milnor {

namespace {

// Inverse of the standard normal CDF (Acklam's rational approximation);
// accurate enough for start-point placement.
double inv_normal_cdf(double p) {
    if (p <= 0.0) return -8.0;
    if (p >= 1.0) return 8.0;
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
        q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

// Generalized-golden-ratio Weyl increments (R_d sequence).
std::vector<double> weyl_alphas(int dim) {
    double phi = 1.0;
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
    std::vector<double> alphas(static_cast<std::size_t>(dim));
    double inv = 1.0 / phi;
    double a = inv;
    for (int i = 0; i < dim; ++i) {
        alphas[static_cast<std::size_t>(i)] = a;
        a *= inv;
    }
    return alphas;
}

Eigen::Matrix3d seeded_rotation3(Rng& rng) {
    // Random unit quaternion.
    double q0 = rng.normal(), q1 = rng.normal(), q2 = rng.normal(), q3 = rng.normal();
    double n = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
    if (n == 0) return Eigen::Matrix3d::Identity();
    q0 /= n, q1 /= n, q2 /= n, q3 /= n;
    Eigen::Matrix3d m;
    m << 1 - 2 * (q2 * q2 + q3 * q3), 2 * (q1 * q2 - q0 * q3), 2 * (q1 * q3 + q0 * q2),
        2 * (q1 * q2 + q0 * q3), 1 - 2 * (q1 * q1 + q3 * q3), 2 * (q2 * q3 - q0 * q1),
        2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1), 1 - 2 * (q1 * q1 + q2 * q2);
    return m;
}

}  // namespace

std::vector<Eigen::VectorXd> sphere_starts(int dim, double radius, int count, std::uint64_t seed) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(count));
    Rng rng(seed);
    if (dim == 2) {
        double offset = rng.uniform() * 2.0 * M_PI;
        for (int j = 0; j < count; ++j) {
            double theta = offset + 2.0 * M_PI * (j + 0.5) / count;
            Eigen::VectorXd p(2);
            p << radius * std::cos(theta), radius * std::sin(theta);
            out.push_back(p);
        }
        return out;
    }
    if (dim == 3) {
        Eigen::Matrix3d rot = seeded_rotation3(rng);
        const double ga = M_PI * (3.0 - std::sqrt(5.0));  // golden angle
        for (int j = 0; j < count; ++j) {
            double z = 1.0 - 2.0 * (j + 0.5) / count;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double theta = ga * j;
            Eigen::Vector3d p(r * std::cos(theta), r * std::sin(theta), z);
            out.push_back(radius * (rot * p));
        }
        return out;
    }
    // dim >= 4: scrambled Weyl sequence through the normal quantile, normalized.
    std::vector<double> alphas = weyl_alphas(dim);
    std::vector<double> shift(static_cast<std::size_t>(dim));
    for (auto& s : shift) s = rng.uniform();
    for (int j = 0; j < count; ++j) {
        Eigen::VectorXd g(dim);
        for (int i = 0; i < dim; ++i) {
            double u = std::fmod(shift[static_cast<std::size_t>(i)] + alphas[static_cast<std::size_t>(i)] * (j + 1), 1.0);
            g[i] = inv_normal_cdf(u);
        }
        double n = g.norm();
        if (n == 0) g[0] = 1.0, n = 1.0;
        out.push_back((radius / n) * g);
    }
    return out;
}

std::vector<Eigen::VectorXd> ball_starts(int dim, double radius, int count, std::uint64_t seed) {
    std::vector<Eigen::VectorXd> dirs = sphere_starts(dim, 1.0, count, seed);
    Rng rng(seed ^ 0x5851f42d4c957f2dULL);
    double shift = rng.uniform();
    double alpha = weyl_alphas(1)[0];
    for (int j = 0; j < count; ++j) {
        double u = std::fmod(shift + alpha * (j + 1), 1.0);
        double r = radius * std::pow(u, 1.0 / dim);
        dirs[static_cast<std::size_t>(j)] *= r;
    }
    return dirs;
}

}  // namespace milnor
