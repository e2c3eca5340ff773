#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace restproj {

/// Pairwise (cascade) summation over a fixed index order. Used for every
/// energy/mean accumulation so that reports are bit-reproducible.
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n <= 32) {
        double acc = 0.0;
        for (double x : xs) acc += x;
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_mean(std::span<const double> xs) {
    return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

/// Mixed absolute/relative agreement: |a-b| <= tol * max(1, |a|, |b|).
inline bool close_mixed(double a, double b, double tol) {
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
}

/// True iff x == 2^{-k} for some integer k >= 0; writes k on success.
inline bool dyadic_exponent(double x, int& k_out) {
    if (!(x > 0.0) || x > 1.0) return false;
    int e = 0;
    const double m = std::frexp(x, &e);  // x = m * 2^e, m in [0.5, 1)
    if (m != 0.5) return false;
    k_out = 1 - e;
    return k_out >= 0;
}

/// Dyadic annulus index for a distance d in (0, 1]: the unique k with
/// 2^{-k-1} < d <= 2^{-k}. Exact for d that are powers of two (no log
/// rounding). Distances <= delta0 are binned by the caller.
inline int annulus_index(double d) {
    int e = 0;
    const double m = std::frexp(d, &e);
    const int k = (m == 0.5) ? 1 - e : -e;
    return k < 0 ? 0 : k;
}

/// FNV-1a 64-bit content hash for run-manifest file inventories.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace restproj
