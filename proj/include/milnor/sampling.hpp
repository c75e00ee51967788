#ifndef MILNOR_SAMPLING_HPP
#define MILNOR_SAMPLING_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace milnor {

// SplitMix64. Distributions built on top of the raw stream so that results
// are bit-identical across platforms (std:: distributions are not).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Eigen::VectorXd normal_vector(int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v[i] = normal();
        return v;
    }

    // Derive an independent stream for sub-task k.
    std::uint64_t derive(std::uint64_t k) const {
        Rng child(state_ ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
        return child.next_u64();
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Uniform point in the closed ball of given radius (deterministic per rng state).
inline Eigen::VectorXd sample_ball(Rng& rng, int dim, double radius) {
    if (radius == 0.0) return Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd g = rng.normal_vector(dim);
    double norm = g.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(dim);
    double r = radius * std::pow(rng.uniform(), 1.0 / dim);
    return (r / norm) * g;
}

// Low-discrepancy start points on the sphere |x| = radius in R^dim.
// dim==2 uses a rotated uniform angle grid, dim==3 a Fibonacci spiral,
// higher dims a scrambled Weyl sequence pushed through Box-Muller.
std::vector<Eigen::VectorXd> sphere_starts(int dim, double radius, int count, std::uint64_t seed);

// Low-discrepancy points in the ball (sphere sequence with a radial Weyl coordinate).
std::vector<Eigen::VectorXd> ball_starts(int dim, double radius, int count, std::uint64_t seed);

}  // namespace milnor

#endif
