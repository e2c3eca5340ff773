#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <vector>

#include "energy.hpp"
#include "geometry.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "pointcloud.hpp"

namespace restproj {

/// Scalar projections of every cloud point under pi_t, as one vector.
/// Per-coefficient arithmetic matches project(): r1 + w.(Lt) + r2 q(t).
inline Eigen::VectorXd project_all(const PointCloud& cloud, const ProjectionFamily& fam,
                                   const ParamVector& t) {
    if (fam.dim() != t.dim() || fam.dim() != cloud.n() - 2)
        throw std::invalid_argument("project_all: dimension mismatch");
    const Eigen::VectorXd lt = fam.L() * t.t;
    const double quad = fam.q(t.t);
    Eigen::VectorXd out(cloud.size());
    const auto& pts = cloud.points();
    const int m = cloud.n() - 2;
    for (int j = 0; j < cloud.size(); ++j) {
        const double lin = pts.col(j).segment(1, m).dot(lt);
        out[j] = pts(0, j) + lin + pts(cloud.n() - 1, j) * quad;
    }
    return out;
}

namespace detail {

/// Window counts over sorted scalar values: for each value, the number of
/// values within closed distance delta, self included. The comparison is on
/// differences, the same predicate a brute-force |v_i - v_j| <= delta uses,
/// so the counts agree with brute force exactly.
inline std::vector<int> window_counts_sorted(const std::vector<double>& v, double delta) {
    const int m = static_cast<int>(v.size());
    std::vector<int> counts(static_cast<std::size_t>(m));
    int lo = 0, hi = 0;
    for (int p = 0; p < m; ++p) {
        while (v[static_cast<std::size_t>(p)] - v[static_cast<std::size_t>(lo)] > delta) ++lo;
        if (hi < p) hi = p;
        while (hi + 1 < m &&
               v[static_cast<std::size_t>(hi + 1)] - v[static_cast<std::size_t>(p)] <= delta)
            ++hi;
        counts[static_cast<std::size_t>(p)] = hi - lo + 1;
    }
    return counts;
}

inline int brute_window_count(const std::vector<double>& v, double center, double delta) {
    int c = 0;
    for (double x : v)
        if (std::fabs(x - center) <= delta) ++c;
    return c;
}

}  // namespace detail

/// Per-point concentration counts of a scalar projection at window size
/// delta, with an optional per-point bound.
struct ConcentrationReport {
    ParamVector t;
    double delta = 0.0;
    double bound_used = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> per_point_counts;  // (original index, count)
    double bad_fraction = 0.0;                          // counts above the bound
    std::vector<int> surviving;                         // counts within the bound
};

/// Counts, for every restricted point X, the restricted points X' with
/// |pi_t(X') - pi_t(X)| <= delta (closed window, self included). One sort
/// plus a two-pointer sweep; identical to the O(N^2) scan.
inline ConcentrationReport concentration_counts(const PointCloud& cloud,
                                                const ProjectionFamily& fam,
                                                const ParamVector& t, double delta,
                                                const std::vector<int>& restrict_to = {},
                                                double bound = std::numeric_limits<double>::infinity()) {
    if (delta < cloud.delta0())
        throw std::invalid_argument("concentration_counts: delta below the resolution floor");

    const Eigen::VectorXd all = project_all(cloud, fam, t);
    std::vector<int> indices;
    if (restrict_to.empty()) {
        indices.resize(static_cast<std::size_t>(cloud.size()));
        for (int i = 0; i < cloud.size(); ++i) indices[static_cast<std::size_t>(i)] = i;
    } else {
        indices = restrict_to;
        for (int i : indices)
            if (i < 0 || i >= cloud.size())
                throw std::invalid_argument("concentration_counts: restricted index out of range");
    }

    std::vector<std::pair<double, int>> order;
    order.reserve(indices.size());
    for (int i : indices) order.emplace_back(all[i], i);
    std::sort(order.begin(), order.end());
    std::vector<double> values(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) values[p] = order[p].first;

    const auto counts = detail::window_counts_sorted(values, delta);

    ConcentrationReport report;
    report.t = t;
    report.delta = delta;
    report.bound_used = bound;
    report.per_point_counts.resize(order.size());
    int bad = 0;
    for (std::size_t p = 0; p < order.size(); ++p)
        report.per_point_counts[p] = {order[p].second, counts[p]};
    std::sort(report.per_point_counts.begin(), report.per_point_counts.end());
    for (const auto& [index, count] : report.per_point_counts) {
        if (static_cast<double>(count) > bound)
            ++bad;
        else
            report.surviving.push_back(index);
    }
    report.bad_fraction = bad / static_cast<double>(order.size());
    return report;
}

enum class BoundForm { theorem, proof };

struct FinitaryOptions {
    BoundForm bound_form = BoundForm::theorem;
    double a_emp = 1.0;       // removal budget = min(1, eps^-a_emp * delta^eps)
    double measured_c = 0.0;  // regularity constant; <= 0 means measure it here
    unsigned threads = 0;
    std::uint64_t seed_echo = 0;
};

struct TrimOutcome {
    double initial_bad_fraction = 0.0;
    double removed_fraction = 0.0;
    bool good = false;
    int max_count_after = 0;
};

struct SweepSample {
    ParamVector t;
    TrimOutcome theorem;  // bound C delta0^{-10} delta^alpha N
    TrimOutcome proof;    // bound C delta0^{-10 eps} delta^alpha N

    const TrimOutcome& outcome(BoundForm form) const {
        return form == BoundForm::theorem ? theorem : proof;
    }
};

struct SweepReport {
    double delta = 0.0;
    double epsilon = 0.0;
    double alpha = 0.0;
    int cloud_size = 0;
    std::uint64_t seed = 0;
    double measured_c = 0.0;
    BoundForm bound_form = BoundForm::theorem;  // headline form
    double bound_theorem = 0.0;
    double bound_proof = 0.0;
    double budget_fraction = 0.0;
    std::vector<SweepSample> per_t;
    double exceptional_fraction = 0.0;          // under the headline form
    double exceptional_fraction_theorem = 0.0;
    double exceptional_fraction_proof = 0.0;
};

namespace detail {

using GreedyOutcome = TrimOutcome;

/// Worst-first greedy removal on sorted scalar values: repeatedly delete the
/// point with the largest window count (ties: smallest position) until every
/// survivor count fits under `bound` or the removal budget is spent. Any
/// surviving witness set certifies the existential claim; worst-first keeps
/// the most points per deletion and is deterministic.
inline GreedyOutcome greedy_trim(const std::vector<double>& v, double delta, double bound,
                                 int budget) {
    const int m = static_cast<int>(v.size());
    if (m > 0 && v.back() - v.front() <= delta) {
        // Fully collapsed: every survivor set of size k has all counts k, so
        // the greedy outcome has a closed form (which points go is
        // irrelevant to the reported fractions).
        GreedyOutcome out;
        out.initial_bad_fraction = static_cast<double>(m) > bound ? 1.0 : 0.0;
        const int needed = static_cast<double>(m) <= bound
                               ? 0
                               : m - std::min(m, static_cast<int>(std::floor(bound)));
        out.good = needed <= budget;
        const int removed = std::min(needed, budget);
        out.removed_fraction = removed / static_cast<double>(m);
        out.max_count_after = out.good ? m - needed : 0;
        return out;
    }
    auto counts = window_counts_sorted(v, delta);
    GreedyOutcome out;
    int bad = 0;
    for (int c : counts)
        if (static_cast<double>(c) > bound) ++bad;
    out.initial_bad_fraction = bad / static_cast<double>(m);

    using Entry = std::pair<int, int>;  // (count, -position): top = worst, lowest pos
    std::priority_queue<Entry> heap;
    for (int p = 0; p < m; ++p) heap.push({counts[static_cast<std::size_t>(p)], -p});
    std::vector<char> alive(static_cast<std::size_t>(m), 1);
    int removed = 0;

    while (!heap.empty()) {
        const auto [c, negp] = heap.top();
        const int p = -negp;
        if (!alive[static_cast<std::size_t>(p)] || c != counts[static_cast<std::size_t>(p)]) {
            heap.pop();  // stale entry
            continue;
        }
        if (static_cast<double>(c) <= bound) {
            out.good = true;
            out.max_count_after = c;
            break;
        }
        if (removed >= budget) break;  // budget exhausted with the bound still violated
        heap.pop();
        alive[static_cast<std::size_t>(p)] = 0;
        ++removed;
        // Everyone whose window contains p loses one neighbour.
        int lo = p, hi = p;
        while (lo > 0 && v[static_cast<std::size_t>(p)] - v[static_cast<std::size_t>(lo - 1)] <= delta) --lo;
        while (hi + 1 < m && v[static_cast<std::size_t>(hi + 1)] - v[static_cast<std::size_t>(p)] <= delta) ++hi;
        for (int q = lo; q <= hi; ++q) {
            if (!alive[static_cast<std::size_t>(q)]) continue;
            counts[static_cast<std::size_t>(q)] -= 1;
            heap.push({counts[static_cast<std::size_t>(q)], -q});
        }
    }
    if (m == removed) {
        out.good = true;  // nothing left to violate the bound
        out.max_count_after = 0;
    }
    out.removed_fraction = removed / static_cast<double>(m);
    return out;
}

}  // namespace detail

/// One finitary non-concentration experiment at window size delta: per
/// parameter sample t, trims the cloud greedily until the survivor counts
/// obey the concentration bound, and declares t good when the removal budget
/// min(1, eps^-a_emp delta^eps) suffices. The headline bound is
///   count <= C * delta0^{-10}   * delta^alpha * #F   (theorem form)
///   count <= C * delta0^{-10 e} * delta^alpha * #F   (proof form)
/// with C the measured regularity constant; both outcomes are reported.
inline SweepReport finitary_check(const PointCloud& cloud, const ProjectionFamily& fam,
                                  double delta, double epsilon,
                                  const std::vector<ParamVector>& t_samples,
                                  FinitaryOptions options = {}) {
    if (delta < cloud.delta0() || delta > 1.0)
        throw std::invalid_argument("finitary_check: delta must lie in [delta0, 1]");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("finitary_check: epsilon in (0,1) required");
    if (t_samples.empty()) throw std::invalid_argument("finitary_check: no t samples");

    const int N = cloud.size();
    const double alpha = cloud.claimed_alpha();
    const double measured_c =
        options.measured_c > 0.0 ? options.measured_c : verify_regularity(cloud).worst_ratio;

    SweepReport report;
    report.delta = delta;
    report.epsilon = epsilon;
    report.alpha = alpha;
    report.cloud_size = N;
    report.seed = options.seed_echo;
    report.measured_c = measured_c;
    report.bound_theorem =
        measured_c * std::pow(cloud.delta0(), -10.0) * std::pow(delta, alpha) * N;
    report.bound_proof =
        measured_c * std::pow(cloud.delta0(), -10.0 * epsilon) * std::pow(delta, alpha) * N;
    report.budget_fraction =
        std::min(1.0, std::pow(epsilon, -options.a_emp) * std::pow(delta, epsilon));
    const int budget = static_cast<int>(std::floor(report.budget_fraction * N));

    report.bound_form = options.bound_form;
    report.per_t.resize(t_samples.size());
    parallel_for(t_samples.size(), options.threads, [&](std::size_t i) {
        Eigen::VectorXd values = project_all(cloud, fam, t_samples[i]);
        std::vector<double> sorted(values.data(), values.data() + values.size());
        std::sort(sorted.begin(), sorted.end());

        SweepSample sample;
        sample.t = t_samples[i];
        sample.theorem = detail::greedy_trim(sorted, delta, report.bound_theorem, budget);
        sample.proof = detail::greedy_trim(sorted, delta, report.bound_proof, budget);
        report.per_t[i] = std::move(sample);
    });

    int bad_theorem = 0, bad_proof = 0;
    for (const auto& sample : report.per_t) {
        if (!sample.theorem.good) ++bad_theorem;
        if (!sample.proof.good) ++bad_proof;
    }
    const double total = static_cast<double>(report.per_t.size());
    report.exceptional_fraction_theorem = bad_theorem / total;
    report.exceptional_fraction_proof = bad_proof / total;
    report.exceptional_fraction = options.bound_form == BoundForm::theorem
                                      ? report.exceptional_fraction_theorem
                                      : report.exceptional_fraction_proof;
    return report;
}

struct TransversalityEstimate {
    double epsilon = 0.0;
    double measure_estimate = 0.0;
    double standard_error = 0.0;
    int sample_count = 0;
};

/// Monte Carlo measure of {t in B : |f_t(X) - f_t(X')| <= eps} for a unit
/// difference X - X' (renormalized internally otherwise). Sampling is the
/// documented rejection scheme from the bounding box of B.
inline TransversalityEstimate transversality_measure(const ProjectionFamily& fam,
                                                     const Point& x, const Point& xp,
                                                     double epsilon, int mc_samples,
                                                     std::uint64_t seed) {
    if (x.n() != xp.n() || x.n() - 2 != fam.dim())
        throw std::invalid_argument("transversality_measure: dimension mismatch");
    if (mc_samples < 1) throw std::invalid_argument("transversality_measure: no samples");
    Point diff(x.r1 - xp.r1, x.w - xp.w, x.r2 - xp.r2);
    const double norm = diff.norm();
    if (norm == 0.0)
        throw std::invalid_argument("transversality_measure: X and X' coincide");
    diff = Point(diff.r1 / norm, diff.w / norm, diff.r2 / norm);

    Rng rng(seed);
    const int m = fam.dim();
    int hits = 0;
    for (int i = 0; i < mc_samples; ++i) {
        const ParamVector t(rng.in_annulus(m));
        if (factor_map(fam, t, diff).norm() <= epsilon) ++hits;
    }
    const double volume = annulus_volume(m);
    const double p = hits / static_cast<double>(mc_samples);
    TransversalityEstimate est;
    est.epsilon = epsilon;
    est.sample_count = mc_samples;
    est.measure_estimate = volume * p;
    est.standard_error = volume * std::sqrt(p * (1.0 - p) / static_cast<double>(mc_samples));
    return est;
}

struct MomentSample {
    double s = 0.0;
    std::vector<int> counts;  // per input triple, in input order
    int max_count = 0;
    double bad_fraction = 0.0;
    bool good = false;
};

struct MomentReport {
    double delta = 0.0;
    double epsilon = 0.0;
    double alpha = 0.0;
    double c_emp = 0.0;
    double bound = 0.0;            // c_emp * delta^{alpha - 7 eps} * M
    double budget_fraction = 0.0;  // delta^eps
    std::vector<MomentSample> per_s;
    double good_fraction = 0.0;
};

/// Moment-curve stage on a finite set K in R^3 (triples are columns): for
/// each s in the grid, windowed counts of the scalar projection
/// (1, s, s^2).Y at size delta. A grid point s passes when the fraction of
/// triples over the bound c_emp * delta^{alpha-7eps} * M fits in the
/// removable budget delta^eps; removing those triples can only lower the
/// survivors' counts, so the surviving set witnesses the bound.
inline MomentReport moment_curve_concentration(const Eigen::Matrix3Xd& triples,
                                               double alpha, double delta, double epsilon,
                                               const std::vector<double>& s_grid,
                                               double c_emp = 4.0, unsigned threads = 0) {
    if (triples.cols() == 0)
        throw std::invalid_argument("moment_curve_concentration: empty triple set");
    if (!(delta > 0.0)) throw std::invalid_argument("moment_curve_concentration: delta <= 0");
    if (s_grid.empty()) throw std::invalid_argument("moment_curve_concentration: empty s grid");
    for (double s : s_grid)
        if (s < 0.0 || s > 2.0)
            throw std::invalid_argument("moment_curve_concentration: s outside [0, 2]");

    const int m = static_cast<int>(triples.cols());
    MomentReport report;
    report.delta = delta;
    report.epsilon = epsilon;
    report.alpha = alpha;
    report.c_emp = c_emp;
    report.bound = c_emp * std::pow(delta, alpha - 7.0 * epsilon) * m;
    report.budget_fraction = std::pow(delta, epsilon);
    report.per_s.resize(s_grid.size());

    parallel_for(s_grid.size(), threads, [&](std::size_t i) {
        const MomentVector mv{s_grid[i]};
        std::vector<std::pair<double, int>> order(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
            order[static_cast<std::size_t>(j)] = {moment_project(mv, triples.col(j)), j};
        std::sort(order.begin(), order.end());
        std::vector<double> values(order.size());
        for (std::size_t p = 0; p < order.size(); ++p) values[p] = order[p].first;
        const auto sorted_counts = detail::window_counts_sorted(values, delta);

        MomentSample sample;
        sample.s = s_grid[i];
        sample.counts.resize(static_cast<std::size_t>(m));
        int bad = 0;
        for (std::size_t p = 0; p < order.size(); ++p) {
            sample.counts[static_cast<std::size_t>(order[p].second)] = sorted_counts[p];
            if (static_cast<double>(sorted_counts[p]) > report.bound) ++bad;
        }
        sample.max_count = *std::max_element(sample.counts.begin(), sample.counts.end());
        sample.bad_fraction = bad / static_cast<double>(m);
        sample.good = sample.bad_fraction <= report.budget_fraction;
        report.per_s[i] = std::move(sample);
    });

    int good = 0;
    for (const auto& sample : report.per_s)
        if (sample.good) ++good;
    report.good_fraction = good / static_cast<double>(report.per_s.size());
    return report;
}

// --- SweepReport serialization -------------------------------------------

/// CSV rows `t_1..t_{n-2},delta,bad_fraction,removed_fraction,good`, one per
/// parameter sample.
inline void write_sweep_csv(std::ostream& os, const SweepReport& report,
                            bool header = true) {
    if (report.per_t.empty()) return;
    const int m = report.per_t.front().t.dim();
    if (header) {
        for (int d = 0; d < m; ++d) os << "t_" << (d + 1) << ',';
        os << "delta,bad_fraction,removed_fraction,good\n";
    }
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (const auto& sample : report.per_t) {
        const TrimOutcome& headline = sample.outcome(report.bound_form);
        for (int d = 0; d < m; ++d) {
            put(sample.t.t[d]);
            os << ',';
        }
        put(report.delta);
        os << ',';
        put(headline.initial_bad_fraction);
        os << ',';
        put(headline.removed_fraction);
        os << ',' << (headline.good ? 1 : 0) << '\n';
    }
}

}  // namespace restproj
