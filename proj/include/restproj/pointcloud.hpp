#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "numeric.hpp"
#include "random.hpp"

namespace restproj {

/// A finite set F in the unit ball of R^n with diam(F) <= 1, a dyadic scale
/// floor delta0 = 2^{-k0}, and the regularity (alpha, C) its generator
/// claims:  #(B(X, delta) & F) <= C * delta^alpha * #F  for delta >= delta0.
///
/// Points are stored as columns of an n x N matrix in (r1, w..., r2)
/// coordinate order. The cloud is immutable after construction.
class PointCloud {
public:
    PointCloud(Eigen::MatrixXd points, double delta0, double claimed_alpha,
               double claimed_c)
        : points_(std::move(points)),
          delta0_(delta0),
          claimed_alpha_(claimed_alpha),
          claimed_c_(claimed_c) {
        if (points_.cols() == 0) throw std::invalid_argument("PointCloud: empty");
        if (points_.rows() < 3) throw std::invalid_argument("PointCloud: need n >= 3");
        if (!dyadic_exponent(delta0_, k0_))
            throw std::invalid_argument("PointCloud: delta0 must be 2^-k0, k0 >= 0");
        if (!(claimed_alpha_ > 0.0 && claimed_alpha_ <= 1.0))
            throw std::invalid_argument("PointCloud: alpha must be in (0, 1]");
        if (claimed_c_ < 1.0)
            throw std::invalid_argument("PointCloud: C must be >= 1");
        for (Eigen::Index j = 0; j < points_.cols(); ++j) {
            if (points_.col(j).norm() > 1.0 + 1e-12)
                throw std::invalid_argument("PointCloud: point outside the unit ball");
        }
        check_diameter();
    }

    int n() const { return static_cast<int>(points_.rows()); }
    int size() const { return static_cast<int>(points_.cols()); }
    double delta0() const { return delta0_; }
    int k0() const { return k0_; }
    double claimed_alpha() const { return claimed_alpha_; }
    double claimed_c() const { return claimed_c_; }
    const Eigen::MatrixXd& points() const { return points_; }

    Point point(int i) const { return Point::from_vector(points_.col(i)); }

    /// Upper bound on the diameter from the bounding box (equals the
    /// diameter only for degenerate shapes; cheap and sufficient to accept).
    double bbox_diag() const {
        return (points_.rowwise().maxCoeff() - points_.rowwise().minCoeff()).norm();
    }

private:
    void check_diameter() {
        if (bbox_diag() <= 1.0 + 1e-12) return;
        // Bounding box inconclusive; fall back to the exact pairwise check.
        double worst2 = 0.0;
        for (Eigen::Index i = 0; i < points_.cols(); ++i)
            for (Eigen::Index j = i + 1; j < points_.cols(); ++j)
                worst2 = std::max(worst2, (points_.col(i) - points_.col(j)).squaredNorm());
        if (std::sqrt(worst2) > 1.0 + 1e-12)
            throw std::invalid_argument("PointCloud: diameter exceeds 1");
    }

    Eigen::MatrixXd points_;
    double delta0_;
    double claimed_alpha_;
    double claimed_c_;
    int k0_ = 0;
};

/// Exact number of cloud points within closed distance `delta` of `center`,
/// by exhaustive scan. Oracle for the grid index; comparisons are against
/// squared distances so both paths use the identical predicate.
inline int brute_force_count(const Eigen::MatrixXd& pts, const Eigen::VectorXd& center,
                             double delta) {
    const double d2 = delta * delta;
    int count = 0;
    for (Eigen::Index j = 0; j < pts.cols(); ++j)
        if ((pts.col(j) - center).squaredNorm() <= d2) ++count;
    return count;
}

/// Uniform hashed-grid index with cell size equal to the query radius, so a
/// ball query visits the 3^n neighbouring cells. Built once per scale and
/// read concurrently.
class CountingIndex {
public:
    CountingIndex(const Eigen::MatrixXd& pts, double cell)
        : pts_(pts), cell_(cell) {
        if (!(cell > 0.0)) throw std::invalid_argument("CountingIndex: cell size must be positive");
        cells_.reserve(static_cast<std::size_t>(pts.cols()));
        for (Eigen::Index j = 0; j < pts.cols(); ++j)
            cells_[key_of(pts.col(j))].push_back(static_cast<int>(j));
    }

    int count(const Eigen::VectorXd& center, double delta) const {
        if (delta > cell_ + 1e-15 * cell_)
            throw std::invalid_argument("CountingIndex: query radius exceeds cell size");
        const double d2 = delta * delta;
        const int n = static_cast<int>(pts_.rows());
        std::vector<std::int64_t> base(n), offset(n, -1);
        for (int d = 0; d < n; ++d)
            base[d] = static_cast<std::int64_t>(std::floor(center[d] / cell_));
        int total = 0;
        // Odometer walk over the 3^n neighbouring cells. Distinct cells can
        // hash to one bucket, so scan each bucket at most once; any in-range
        // point lives in some neighbouring cell, hence in a visited bucket.
        std::vector<const std::vector<int>*> seen;
        while (true) {
            std::int64_t h = 1469598103934665603ll;
            for (int d = 0; d < n; ++d) {
                h ^= base[d] + offset[d];
                h *= 1099511628211ll;
            }
            auto it = cells_.find(h);
            if (it != cells_.end() &&
                std::find(seen.begin(), seen.end(), &it->second) == seen.end()) {
                seen.push_back(&it->second);
                for (int j : it->second)
                    if ((pts_.col(j) - center).squaredNorm() <= d2) ++total;
            }
            int d = 0;
            while (d < n && offset[d] == 1) offset[d++] = -1;
            if (d == n) break;
            ++offset[d];
        }
        return total;
    }

private:
    std::int64_t key_of(const Eigen::VectorXd& p) const {
        std::int64_t h = 1469598103934665603ll;
        for (Eigen::Index d = 0; d < p.size(); ++d) {
            h ^= static_cast<std::int64_t>(std::floor(p[d] / cell_));
            h *= 1099511628211ll;
        }
        return h;
    }

    const Eigen::MatrixXd& pts_;
    double cell_;
    std::unordered_map<std::int64_t, std::vector<int>> cells_;
};

/// Grid cells are hashed, so distinct cells can collide onto one bucket;
/// a colliding bucket only adds candidates that fail the distance test,
/// never changes the count.
inline int count_in_ball(const PointCloud& cloud, const Point& center, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("count_in_ball: delta must be positive");
    const Eigen::VectorXd c = center.to_vector();
    if (cloud.size() < 512) return brute_force_count(cloud.points(), c, delta);
    return CountingIndex(cloud.points(), delta).count(c, delta);
}

struct RegularityReport {
    double worst_ratio = 0.0;
    int witness_point = -1;
    double witness_delta = 0.0;
    std::vector<std::pair<double, double>> per_scale;  // (delta, max ratio)
    bool passes_claimed_c = false;
    double claimed_c = 0.0;
    bool subsampled = false;
    int subsample_size = 0;
    std::uint64_t subsample_seed = 0;
};

/// Measures sup over (X, dyadic delta in [delta0, 1]) of
///   count(B(X, delta)) / (delta^alpha * #F)
/// i.e. the sharpest constant C for which the cloud actually satisfies its
/// claimed regularity. Above `subsample_threshold` query points a seeded
/// random subsample of centers is used (counts always run over the full set).
inline RegularityReport verify_regularity(const PointCloud& cloud,
                                          int subsample_threshold = 100000,
                                          std::uint64_t subsample_seed = 1) {
    const int N = cloud.size();
    const double alpha = cloud.claimed_alpha();

    std::vector<int> queries;
    RegularityReport report;
    report.claimed_c = cloud.claimed_c();
    if (N > subsample_threshold) {
        report.subsampled = true;
        report.subsample_size = subsample_threshold;
        report.subsample_seed = subsample_seed;
        Rng rng(subsample_seed);
        queries.resize(subsample_threshold);
        for (int& q : queries) q = static_cast<int>(rng.below(N));
    } else {
        queries.resize(N);
        for (int i = 0; i < N; ++i) queries[i] = i;
    }

    const double diag = cloud.bbox_diag();
    for (int k = 0; k <= cloud.k0(); ++k) {
        const double delta = std::ldexp(1.0, -k);
        const double denom = std::pow(delta, alpha) * N;
        double scale_worst = 0.0;
        int scale_witness = -1;
        if (delta >= diag) {
            // Every ball holds the whole cloud.
            scale_worst = N / denom;
            scale_witness = queries.front();
        } else {
            std::optional<CountingIndex> index;
            if (N >= 512) index.emplace(cloud.points(), delta);
            for (int q : queries) {
                const Eigen::VectorXd c = cloud.points().col(q);
                const int count = index ? index->count(c, delta)
                                        : brute_force_count(cloud.points(), c, delta);
                const double ratio = count / denom;
                if (ratio > scale_worst) {
                    scale_worst = ratio;
                    scale_witness = q;
                }
            }
        }
        report.per_scale.emplace_back(delta, scale_worst);
        if (scale_worst > report.worst_ratio) {
            report.worst_ratio = scale_worst;
            report.witness_point = scale_witness;
            report.witness_delta = delta;
        }
    }
    report.passes_claimed_c = report.worst_ratio <= cloud.claimed_c();
    return report;
}

struct DimensionEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double delta_lo = 0.0;
    double delta_hi = 0.0;
    double residual = 0.0;
    std::vector<std::pair<double, std::int64_t>> counts;  // (delta, boxes)
};

namespace detail {

inline DimensionEstimate fit_box_counts(const std::vector<std::pair<int, std::int64_t>>& kc,
                                        double delta_lo, double delta_hi) {
    DimensionEstimate est;
    est.delta_lo = delta_lo;
    est.delta_hi = delta_hi;
    const auto m = static_cast<double>(kc.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [k, c] : kc) {
        const double x = k;  // log2(1/delta)
        const double y = std::log2(static_cast<double>(c));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        est.counts.emplace_back(std::ldexp(1.0, -k), c);
    }
    const double det = m * sxx - sx * sx;
    est.slope = (m * sxy - sx * sy) / det;
    est.intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0;
    for (auto [k, c] : kc) {
        const double r = std::log2(static_cast<double>(c)) - (est.slope * k + est.intercept);
        ss += r * r;
    }
    est.residual = std::sqrt(ss / m);
    return est;
}

inline std::vector<int> dyadic_ladder(double delta_lo, double delta_hi) {
    if (!(delta_lo > 0.0) || !(delta_hi <= 1.0) || delta_lo > delta_hi)
        throw std::invalid_argument("box_dimension: need 0 < delta_lo <= delta_hi <= 1");
    const int k_min = static_cast<int>(std::ceil(-std::log2(delta_hi) - 1e-9));
    const int k_max = static_cast<int>(std::floor(-std::log2(delta_lo) + 1e-9));
    std::vector<int> ks;
    for (int k = std::max(0, k_min); k <= k_max; ++k) ks.push_back(k);
    if (ks.size() < 4)
        throw std::invalid_argument("box_dimension: fewer than 4 dyadic scales in fit range");
    return ks;
}

}  // namespace detail

/// Box-counting dimension of a set of scalar values: occupied dyadic
/// intervals per scale, least-squares slope of log2 N(delta) vs log2(1/delta).
inline DimensionEstimate box_dimension(const std::vector<double>& values,
                                       double delta_lo, double delta_hi) {
    if (values.empty()) throw std::invalid_argument("box_dimension: empty input");
    const auto ks = detail::dyadic_ladder(delta_lo, delta_hi);
    std::vector<std::pair<int, std::int64_t>> kc;
    std::unordered_set<std::int64_t> boxes;
    for (int k : ks) {
        boxes.clear();
        for (double v : values)
            boxes.insert(static_cast<std::int64_t>(std::floor(std::ldexp(v, k))));
        kc.emplace_back(k, static_cast<std::int64_t>(boxes.size()));
    }
    return detail::fit_box_counts(kc, std::ldexp(1.0, -ks.back()), std::ldexp(1.0, -ks.front()));
}

/// Box-counting dimension of a point set in R^d (points are columns).
inline DimensionEstimate box_dimension(const Eigen::MatrixXd& pts,
                                       double delta_lo, double delta_hi) {
    if (pts.cols() == 0) throw std::invalid_argument("box_dimension: empty input");
    const auto ks = detail::dyadic_ladder(delta_lo, delta_hi);
    std::vector<std::pair<int, std::int64_t>> kc;
    std::unordered_set<std::uint64_t> boxes;
    for (int k : ks) {
        boxes.clear();
        for (Eigen::Index j = 0; j < pts.cols(); ++j) {
            std::uint64_t h = 1469598103934665603ull;
            for (Eigen::Index d = 0; d < pts.rows(); ++d) {
                h ^= static_cast<std::uint64_t>(
                    static_cast<std::int64_t>(std::floor(std::ldexp(pts(d, j), k))));
                h *= 1099511628211ull;
            }
            boxes.insert(h);
        }
        kc.emplace_back(k, static_cast<std::int64_t>(boxes.size()));
    }
    return detail::fit_box_counts(kc, std::ldexp(1.0, -ks.back()), std::ldexp(1.0, -ks.front()));
}

/// Default fit window for a cloud with floor delta0: [4 delta0, 1/4] avoids
/// saturation at the scale floor and diameter effects at the top.
inline std::pair<double, double> default_fit_range(double delta0) {
    return {std::min(4.0 * delta0, 0.25), 0.25};
}

// --- serialization -------------------------------------------------------
//
// Flat text format: header line `n delta0 alpha C N`, then N lines of n
// space-separated coordinates at 17 significant digits (exact round-trip).

inline void write_cloud(std::ostream& os, const PointCloud& cloud) {
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    os << cloud.n() << ' ';
    put(cloud.delta0());
    os << ' ';
    put(cloud.claimed_alpha());
    os << ' ';
    put(cloud.claimed_c());
    os << ' ' << cloud.size() << '\n';
    for (int j = 0; j < cloud.size(); ++j) {
        for (int d = 0; d < cloud.n(); ++d) {
            if (d) os << ' ';
            put(cloud.points()(d, j));
        }
        os << '\n';
    }
}

inline PointCloud read_cloud(std::istream& is) {
    int n = 0, count = 0;
    double delta0 = 0, alpha = 0, c = 0;
    if (!(is >> n >> delta0 >> alpha >> c >> count))
        throw std::runtime_error("cloud parse error: bad header");
    if (n < 3 || count <= 0) throw std::runtime_error("cloud parse error: bad dimensions");
    Eigen::MatrixXd pts(n, count);
    for (int j = 0; j < count; ++j)
        for (int d = 0; d < n; ++d)
            if (!(is >> pts(d, j))) throw std::runtime_error("cloud parse error: bad coordinate");
    return PointCloud(std::move(pts), delta0, alpha, c);
}

inline void save_cloud(const std::string& path, const PointCloud& cloud) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_cloud(os, cloud);
}

inline PointCloud load_cloud(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_cloud(is);
}

}  // namespace restproj
