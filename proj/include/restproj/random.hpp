#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace restproj {

/// Seeded RNG with platform-independent output. std::mt19937_64 is fully
/// specified by the standard; the double mappings below avoid
/// std::uniform_real_distribution, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    /// Independent stream for task `stream` of a run seeded with `seed`.
    /// Per-task engines keep parallel fan-out deterministic regardless of
    /// scheduling.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        return Rng(seed ^ (0x9E3779B97F4A7C15ull + stream * 0xBF58476D1CE4E5B9ull));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). Rejection keeps the draw unbiased.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n == 0");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    /// Uniform point in the closed ball of given radius (rejection from the
    /// bounding cube).
    Eigen::VectorXd in_ball(int dim, double radius) {
        Eigen::VectorXd v(dim);
        while (true) {
            for (int i = 0; i < dim; ++i) v[i] = uniform(-1.0, 1.0);
            if (v.squaredNorm() <= 1.0) return radius * v;
        }
    }

    /// Uniform sample from the parameter annulus {1 <= |t| <= 2} in R^m,
    /// by rejection from [-2,2]^m.
    Eigen::VectorXd in_annulus(int m) {
        Eigen::VectorXd t(m);
        while (true) {
            for (int i = 0; i < m; ++i) t[i] = uniform(-2.0, 2.0);
            const double n2 = t.squaredNorm();
            if (n2 >= 1.0 && n2 <= 4.0) return t;
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace restproj
