#ifndef ADAPID_RNG_HPP
#define ADAPID_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace adapid {

/// Seeded random source with explicit value derivations so that streams are
/// reproducible on any platform (std:: distributions are implementation
/// defined; we only rely on the mt19937_64 engine, which is specified).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 bits of randomness.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (deterministic two-draw form).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return mag * std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd uniform_vector(int n, double lo, double hi) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    /// Uniform direction on the Euclidean unit sphere in R^n.
    Eigen::VectorXd unit_sphere(int n) {
        Eigen::VectorXd v(n);
        double norm = 0.0;
        do {
            for (int i = 0; i < n; ++i) v[i] = gaussian();
            norm = v.norm();
        } while (norm < 1e-12);
        return v / norm;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace adapid

#endif
