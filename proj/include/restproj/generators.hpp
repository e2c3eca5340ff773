#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "geometry.hpp"
#include "pointcloud.hpp"
#include "random.hpp"

namespace restproj {

// Cloud generators with known regularity. Each construction declares the
// (alpha, C) it is built to satisfy; verify_regularity measures the truth.

/// One Cantor-type coordinate: `pieces` sub-cells of relative width `ratio`
/// per level, iterated `level` times. Similarity dimension
/// log(pieces)/log(1/ratio).
struct CantorCoordinate {
    int coordinate = 0;  // 0 = r1, 1..n-2 = w components, n-1 = r2
    int pieces = 2;
    double ratio = 1.0 / 3.0;
    int level = 6;
};

struct CantorProductSpec {
    int n = 3;
    std::vector<CantorCoordinate> coords;
};

struct UniformSegmentSpec {
    int n = 3;
    int count = 1024;
    std::optional<Eigen::VectorXd> direction;  // default: the r1 axis
};

struct AlphaRegularRandomSpec {
    int n = 3;
    double target_alpha = 0.7;
    int levels = 10;
};

struct KernelHyperplaneSpec {
    int n = 3;
    int count = 1024;
    Eigen::VectorXd t0;
    double offset = 0.0;                        // the level c of pi_{t0} = c
    std::optional<ProjectionFamily> family;     // default: standard
};

struct FiniteGridSpec {
    int n = 3;
    int axes = 1;            // grid spans the first `axes` coordinates
    int points_per_axis = 33;
};

using GeneratorSpec = std::variant<CantorProductSpec, UniformSegmentSpec,
                                   AlphaRegularRandomSpec, KernelHyperplaneSpec,
                                   FiniteGridSpec>;

namespace detail {

inline double dyadic_floor(double x) {
    // Largest 2^-k (k >= 0 integer) that is <= x.
    if (!(x > 0.0)) throw std::invalid_argument("dyadic_floor: x must be positive");
    if (x >= 1.0) return 1.0;
    const int k = static_cast<int>(std::ceil(-std::log2(x) - 1e-9));
    return std::ldexp(1.0, -k);
}

inline std::vector<double> cantor_levels(int pieces, double ratio, int level) {
    if (pieces < 2) throw std::invalid_argument("cantor: pieces >= 2 required");
    if (!(ratio > 0.0) || pieces * ratio > 1.0 + 1e-12)
        throw std::invalid_argument("cantor: need 0 < pieces*ratio <= 1");
    if (level < 1 || std::pow(pieces, level) > 4e6)
        throw std::invalid_argument("cantor: level out of range");
    const double step = (1.0 - ratio) / (pieces - 1);
    std::vector<double> xs{0.0};
    double len = 1.0;
    for (int l = 0; l < level; ++l) {
        std::vector<double> next;
        next.reserve(xs.size() * pieces);
        for (double a : xs)
            for (int d = 0; d < pieces; ++d) next.push_back(a + d * step * len);
        xs = std::move(next);
        len *= ratio;
    }
    for (double& a : xs) a += len / 2.0;  // cell centers
    return xs;
}

}  // namespace detail

inline PointCloud generate(const CantorProductSpec& spec, std::uint64_t /*seed*/) {
    if (spec.n < 3) throw std::invalid_argument("cantor_product: n >= 3 required");
    if (spec.coords.empty()) throw std::invalid_argument("cantor_product: no coordinates given");
    std::vector<std::vector<double>> axes;
    double alpha = 0.0;
    double c_claim = 1.0;
    double min_cell = 1.0;
    std::vector<bool> used(static_cast<std::size_t>(spec.n), false);
    for (const auto& cc : spec.coords) {
        if (cc.coordinate < 0 || cc.coordinate >= spec.n)
            throw std::invalid_argument("cantor_product: coordinate out of range");
        if (used[static_cast<std::size_t>(cc.coordinate)])
            throw std::invalid_argument("cantor_product: duplicate coordinate");
        used[static_cast<std::size_t>(cc.coordinate)] = true;
        axes.push_back(detail::cantor_levels(cc.pieces, cc.ratio, cc.level));
        alpha += std::log(static_cast<double>(cc.pieces)) / std::log(1.0 / cc.ratio);
        c_claim *= 2.0 * cc.pieces;
        min_cell = std::min(min_cell, std::pow(cc.ratio, cc.level));
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.coords.size()));

    std::size_t total = 1;
    for (const auto& a : axes) {
        total *= a.size();
        if (total > 4e6) throw std::invalid_argument("cantor_product: too many points");
    }
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(spec.n, static_cast<Eigen::Index>(total));
    std::vector<std::size_t> idx(axes.size(), 0);
    for (std::size_t j = 0; j < total; ++j) {
        for (std::size_t a = 0; a < axes.size(); ++a)
            pts(spec.coords[a].coordinate, static_cast<Eigen::Index>(j)) =
                (axes[a][idx[a]] - 0.5) * scale;
        std::size_t a = 0;
        while (a < axes.size() && ++idx[a] == axes[a].size()) idx[a++] = 0;
    }
    return PointCloud(std::move(pts), detail::dyadic_floor(min_cell * scale),
                      std::min(1.0, alpha), std::max(1.0, c_claim));
}

inline PointCloud generate(const UniformSegmentSpec& spec, std::uint64_t /*seed*/) {
    if (spec.n < 3) throw std::invalid_argument("uniform_segment: n >= 3 required");
    if (spec.count < 2) throw std::invalid_argument("uniform_segment: count >= 2 required");
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(spec.n);
    if (spec.direction) {
        if (spec.direction->size() != spec.n)
            throw std::invalid_argument("uniform_segment: direction has wrong dimension");
        if (spec.direction->norm() == 0.0)
            throw std::invalid_argument("uniform_segment: zero direction");
        dir = spec.direction->normalized();
    } else {
        dir[0] = 1.0;
    }
    const int k = static_cast<int>(std::ceil(std::log2(static_cast<double>(spec.count))));
    const double h = std::ldexp(1.0, -k);  // spacing = delta0, span < 1
    Eigen::MatrixXd pts(spec.n, spec.count);
    const double mid = (spec.count - 1) / 2.0;
    for (int j = 0; j < spec.count; ++j) pts.col(j) = ((j - mid) * h) * dir;
    return PointCloud(std::move(pts), h, 1.0, 4.0);
}

inline PointCloud generate(const AlphaRegularRandomSpec& spec, std::uint64_t seed) {
    if (spec.n < 3) throw std::invalid_argument("alpha_regular_random: n >= 3 required");
    if (!(spec.target_alpha > 0.0 && spec.target_alpha <= 1.0))
        throw std::invalid_argument("alpha_regular_random: alpha in (0,1] required");
    if (spec.levels < 1 || spec.levels > 24)
        throw std::invalid_argument("alpha_regular_random: levels in [1,24] required");
    Rng rng(seed);
    const int n = spec.n;
    const double p_two = std::exp2(spec.target_alpha) - 1.0;

    // Dyadic branching tree over subcubes of [0,1]^n: each live cell keeps
    // one or two of its 2^n children, with E[children] = 2^alpha.
    struct Cell {
        Eigen::VectorXd corner;
        double size;
    };
    std::vector<Cell> cells{{Eigen::VectorXd::Zero(n), 1.0}};
    for (int l = 0; l < spec.levels; ++l) {
        std::vector<Cell> next;
        next.reserve(cells.size() * 2);
        for (const auto& cell : cells) {
            const int keep = rng.uniform01() < p_two ? 2 : 1;
            std::uint64_t first = rng.below(std::uint64_t{1} << n);
            std::uint64_t second = first;
            if (keep == 2)
                while (second == first) second = rng.below(std::uint64_t{1} << n);
            for (int pick = 0; pick < keep; ++pick) {
                const std::uint64_t mask = pick == 0 ? first : second;
                Cell child{cell.corner, cell.size / 2.0};
                for (int d = 0; d < n; ++d)
                    if (mask >> d & 1) child.corner[d] += child.size;
                next.push_back(std::move(child));
            }
        }
        cells = std::move(next);
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd pts(n, static_cast<Eigen::Index>(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
        Eigen::VectorXd center =
            cells[j].corner + Eigen::VectorXd::Constant(n, cells[j].size / 2.0);
        pts.col(static_cast<Eigen::Index>(j)) =
            (center - Eigen::VectorXd::Constant(n, 0.5)) * scale;
    }
    const double cell = std::ldexp(1.0, -spec.levels) * scale;
    return PointCloud(std::move(pts), detail::dyadic_floor(cell), spec.target_alpha, 32.0);
}

inline PointCloud generate(const KernelHyperplaneSpec& spec, std::uint64_t seed) {
    if (spec.n < 3) throw std::invalid_argument("kernel_hyperplane: n >= 3 required");
    if (spec.count < 1) throw std::invalid_argument("kernel_hyperplane: count >= 1 required");
    const int m = spec.n - 2;
    if (spec.t0.size() != m)
        throw std::invalid_argument("kernel_hyperplane: t0 has wrong dimension");
    const ProjectionFamily fam = spec.family ? *spec.family : ProjectionFamily::standard(m);
    const ParamVector t0(spec.t0);

    Rng rng(seed);
    Eigen::MatrixXd pts(spec.n, spec.count);
    const double sigma = 0.2;
    for (int j = 0; j < spec.count; ++j) {
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 100000)
                throw std::invalid_argument(
                    "kernel_hyperplane: offset/t0 leave no room inside the unit ball");
            Eigen::VectorXd w = rng.in_ball(m, sigma);
            double r2 = rng.uniform(-sigma, sigma);
            const double lin = w.dot(fam.L() * t0.t);
            const double quad = fam.q(t0.t);
            double r1 = spec.offset - lin - r2 * quad;
            // Polish r1 until the projection evaluates to the offset exactly
            // in double precision (the expression is affine in r1).
            Point X(r1, w, r2);
            bool exact = false;
            for (int it = 0; it < 4 && !exact; ++it) {
                const double resid = project(fam, t0, X) - spec.offset;
                if (resid == 0.0) {
                    exact = true;
                    break;
                }
                X.r1 -= resid;
            }
            exact = exact || project(fam, t0, X) == spec.offset;
            if (exact && X.squared_norm() <= 0.25) {
                pts.col(j) = X.to_vector();
                break;
            }
        }
    }
    const int k = std::max(1, static_cast<int>(std::ceil(std::log2(static_cast<double>(spec.count)))));
    return PointCloud(std::move(pts), std::ldexp(1.0, -k), 1.0, 8.0);
}

inline PointCloud generate(const FiniteGridSpec& spec, std::uint64_t /*seed*/) {
    if (spec.n < 3) throw std::invalid_argument("finite_grid: n >= 3 required");
    if (spec.axes < 1 || spec.axes > spec.n)
        throw std::invalid_argument("finite_grid: axes in [1, n] required");
    if (spec.points_per_axis < 2) throw std::invalid_argument("finite_grid: need >= 2 points per axis");
    const int m = spec.points_per_axis;
    const int k = static_cast<int>(std::ceil(std::log2(static_cast<double>(m - 1))));
    const double h = std::ldexp(1.0, -k);  // spacing before cross-axis scaling
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.axes));

    std::size_t total = 1;
    for (int a = 0; a < spec.axes; ++a) {
        total *= static_cast<std::size_t>(m);
        if (total > 4e6) throw std::invalid_argument("finite_grid: too many points");
    }
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(spec.n, static_cast<Eigen::Index>(total));
    std::vector<int> idx(spec.axes, 0);
    const double mid = (m - 1) / 2.0;
    for (std::size_t j = 0; j < total; ++j) {
        for (int a = 0; a < spec.axes; ++a)
            pts(a, static_cast<Eigen::Index>(j)) = (idx[a] - mid) * h * scale;
        int a = 0;
        while (a < spec.axes && ++idx[a] == m) idx[a++] = 0;
    }
    const double c_claim = std::pow(4.0, spec.axes);
    return PointCloud(std::move(pts), detail::dyadic_floor(h * scale), 1.0, c_claim);
}

inline PointCloud generate(const GeneratorSpec& spec, std::uint64_t seed) {
    return std::visit([seed](const auto& s) { return generate(s, seed); }, spec);
}

}  // namespace restproj
