#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "pointcloud.hpp"

namespace restproj {

/// Parameters of the truncated alpha-energy: distances are floored at the
/// scale floor delta0 before being raised to -alpha.
struct TruncatedEnergyParams {
    double alpha = 0.5;
    double delta0 = 0.0078125;

    TruncatedEnergyParams(double alpha_, double delta0_) : alpha(alpha_), delta0(delta0_) {
        if (!(alpha > 0.0 && alpha <= 1.0))
            throw std::invalid_argument("TruncatedEnergyParams: alpha in (0,1] required");
        if (!(delta0 > 0.0 && delta0 <= 1.0))
            throw std::invalid_argument("TruncatedEnergyParams: delta0 in (0,1] required");
    }
};

/// max(|X - Y|, delta0).
inline double truncated_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             double delta0) {
    if (x.size() != y.size())
        throw std::invalid_argument("truncated_norm: dimension mismatch");
    return std::max((x - y).norm(), delta0);
}

namespace detail {

inline double kernel_term(double dist, double alpha, double delta0) {
    const double t = std::max(dist, delta0);
    return alpha == 1.0 ? 1.0 / t : std::pow(t, -alpha);
}

}  // namespace detail

/// A finitely supported probability measure: atoms are columns, weights are
/// non-negative and sum to 1.
struct WeightedPoints {
    Eigen::MatrixXd atoms;
    Eigen::VectorXd weights;

    WeightedPoints(Eigen::MatrixXd atoms_, Eigen::VectorXd weights_)
        : atoms(std::move(atoms_)), weights(std::move(weights_)) {
        if (atoms.cols() != weights.size() || atoms.cols() == 0)
            throw std::invalid_argument("WeightedPoints: atom/weight size mismatch");
        if (weights.minCoeff() < 0.0)
            throw std::invalid_argument("WeightedPoints: negative weight");
        if (std::fabs(weights.sum() - 1.0) > 1e-9)
            throw std::invalid_argument("WeightedPoints: weights must sum to 1");
    }

    static WeightedPoints uniform(Eigen::MatrixXd atoms_) {
        const Eigen::Index m = atoms_.cols();
        return WeightedPoints(std::move(atoms_),
                              Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
    }
};

/// The 3 x N image of the cloud under the factor map f_t (columns follow
/// the cloud order). This is the implicit representation of the pushforward
/// measure mu_t: energies are computed against these columns directly.
inline Eigen::Matrix3Xd factor_image(const PointCloud& cloud, const ProjectionFamily& fam,
                                     const ParamVector& t) {
    if (fam.dim() != t.dim() || fam.dim() != cloud.n() - 2)
        throw std::invalid_argument("factor_image: dimension mismatch");
    const Eigen::VectorXd lt = fam.L() * t.t;
    const double quad = fam.q(t.t);
    const auto& pts = cloud.points();
    const int m = cloud.n() - 2;
    Eigen::Matrix3Xd image(3, cloud.size());
    // Per-column evaluation mirrors factor_map()/project() term by term.
    for (int j = 0; j < cloud.size(); ++j) {
        image(0, j) = pts(0, j);
        image(1, j) = pts.col(j).segment(1, m).dot(lt);
        image(2, j) = pts(cloud.n() - 1, j) * quad;
    }
    return image;
}

/// Truncated alpha-energy of the measure rho seen from X:
///   sum_i w_i * max(|X - X_i|, delta0)^(-alpha),
/// accumulated by pairwise summation in atom index order.
inline double truncated_energy(const WeightedPoints& rho, const Eigen::VectorXd& x,
                               const TruncatedEnergyParams& params) {
    if (rho.atoms.rows() != x.size())
        throw std::invalid_argument("truncated_energy: dimension mismatch");
    std::vector<double> terms(static_cast<std::size_t>(rho.atoms.cols()));
    for (Eigen::Index j = 0; j < rho.atoms.cols(); ++j)
        terms[static_cast<std::size_t>(j)] =
            rho.weights[j] *
            detail::kernel_term((rho.atoms.col(j) - x).norm(), params.alpha, params.delta0);
    return pairwise_sum(terms);
}

struct BallMassViolation {
    double delta = 0.0;
    double mass = 0.0;
    double bound = 0.0;
};

struct BallMassCheck {
    bool applicable = false;  // the energy hypothesis E <= R held
    double energy = 0.0;
    double r = 0.0;
    std::vector<BallMassViolation> violations;
    bool passes = false;
};

/// Checks the implication "E_hat <= R  =>  rho(B(X, delta)) <= R delta^alpha
/// for every dyadic delta in [delta0, 1]". A tiny relative slack absorbs
/// summation rounding; the implication itself is exact mathematics.
inline BallMassCheck ball_mass_bound_check(const WeightedPoints& rho,
                                           const Eigen::VectorXd& x,
                                           const TruncatedEnergyParams& params, double r,
                                           double rel_slack = 1e-9) {
    BallMassCheck result;
    result.energy = truncated_energy(rho, x, params);
    result.r = r;
    if (result.energy > r * (1.0 + rel_slack)) return result;  // hypothesis fails
    result.applicable = true;

    const int k_max = static_cast<int>(std::floor(-std::log2(params.delta0) + 1e-9));
    std::vector<double> mass_terms(static_cast<std::size_t>(rho.atoms.cols()));
    for (int k = 0; k <= k_max; ++k) {
        const double delta = std::ldexp(1.0, -k);
        const double d2 = delta * delta;
        for (Eigen::Index j = 0; j < rho.atoms.cols(); ++j)
            mass_terms[static_cast<std::size_t>(j)] =
                (rho.atoms.col(j) - x).squaredNorm() <= d2 ? rho.weights[j] : 0.0;
        const double mass = pairwise_sum(mass_terms);
        const double bound = r * std::pow(delta, params.alpha);
        if (mass > bound * (1.0 + rel_slack))
            result.violations.push_back({delta, mass, bound});
    }
    result.passes = result.violations.empty();
    return result;
}

struct AnnulusBand {
    int k = 0;
    int count = 0;
    double mass = 0.0;      // count / #F
    double weighted = 0.0;  // mass * 2^{k alpha}
};

struct AnnuliProfile {
    int point_index = 0;
    std::vector<AnnulusBand> per_k;  // k = 0 .. k0
};

/// Splits the cloud, as seen from point `index`, into the dyadic annuli
///   F_k = { X' : 2^{-k-1} < |X - X'| <= 2^{-k} },  k < k0,
/// and the core F_{k0} = { |X - X'| <= delta0 }. The bands partition F.
inline AnnuliProfile annuli_profile(const PointCloud& cloud, int index, double alpha) {
    if (index < 0 || index >= cloud.size())
        throw std::invalid_argument("annuli_profile: index out of range");
    const int k0 = cloud.k0();
    AnnuliProfile profile;
    profile.point_index = index;
    profile.per_k.resize(static_cast<std::size_t>(k0) + 1);
    for (int k = 0; k <= k0; ++k) profile.per_k[static_cast<std::size_t>(k)].k = k;

    const Eigen::VectorXd x = cloud.points().col(index);
    for (int j = 0; j < cloud.size(); ++j) {
        const double d = (cloud.points().col(j) - x).norm();
        const int k = d <= cloud.delta0() ? k0 : std::min(k0, annulus_index(d));
        profile.per_k[static_cast<std::size_t>(k)].count += 1;
    }
    const double n = cloud.size();
    for (auto& band : profile.per_k) {
        band.mass = band.count / n;
        band.weighted = band.mass * std::exp2(band.k * alpha);
    }
    return profile;
}

namespace detail {

/// Energies of all projected points against the uniform pushforward of the
/// cloud under f_t, computed directly on the 3 x N image (the measure is
/// never materialized). Deterministic: pairwise sums in column order.
inline std::vector<double> projected_energies(const Eigen::Matrix3Xd& image,
                                              const TruncatedEnergyParams& params) {
    const Eigen::Index n = image.cols();
    const double w = 1.0 / static_cast<double>(n);
    std::vector<double> energies(static_cast<std::size_t>(n));
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = image(0, i), yi = image(1, i), zi = image(2, i);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double dx = image(0, j) - xi;
            const double dy = image(1, j) - yi;
            const double dz = image(2, j) - zi;
            terms[static_cast<std::size_t>(j)] =
                kernel_term(std::sqrt(dx * dx + dy * dy + dz * dz), params.alpha,
                            params.delta0);
        }
        energies[static_cast<std::size_t>(i)] = w * pairwise_sum(terms);
    }
    return energies;
}


}  // namespace detail

struct ProjectedEnergySample {
    ParamVector t;
    double mean_energy = 0.0;
};

struct ProjectedEnergyReport {
    std::vector<ProjectedEnergySample> per_t;
    double volume_b = 0.0;
    double mc_integral = 0.0;  // vol(B) * mean over t of mean energies
    double std_error = 0.0;
};

/// Monte Carlo estimate of the B-averaged mean projected energy
///   integral over B of (1/#F) sum_X E_hat_{alpha, mu_t}(f_t X) dt.
/// t samples must lie in the annulus B (the caller draws them uniformly).
inline ProjectedEnergyReport average_projected_energy(
    const PointCloud& cloud, const ProjectionFamily& fam,
    const TruncatedEnergyParams& params, const std::vector<ParamVector>& t_samples,
    unsigned threads = 0) {
    if (t_samples.empty())
        throw std::invalid_argument("average_projected_energy: no t samples");
    for (const auto& t : t_samples)
        if (!t.in_annulus())
            throw std::invalid_argument("average_projected_energy: t sample outside B");

    ProjectedEnergyReport report;
    report.per_t.resize(t_samples.size());
    parallel_for(t_samples.size(), threads, [&](std::size_t i) {
        const auto image = factor_image(cloud, fam, t_samples[i]);
        const auto energies = detail::projected_energies(image, params);
        report.per_t[i] = {t_samples[i], pairwise_mean(energies)};
    });

    std::vector<double> means(report.per_t.size());
    for (std::size_t i = 0; i < means.size(); ++i) means[i] = report.per_t[i].mean_energy;
    const double mean = pairwise_mean(means);
    report.volume_b = annulus_volume(fam.dim());
    report.mc_integral = report.volume_b * mean;
    if (means.size() > 1) {
        std::vector<double> sq(means.size());
        for (std::size_t i = 0; i < means.size(); ++i) {
            const double d = means[i] - mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq) / static_cast<double>(means.size() - 1);
        report.std_error =
            report.volume_b * std::sqrt(var / static_cast<double>(means.size()));
    }
    return report;
}

/// Per-point truncated energies of one projected measure, with the survivor
/// set under a threshold.
struct EnergyProfile {
    std::vector<std::pair<int, double>> per_point;
    double mean = 0.0;
    double threshold_used = 0.0;
    std::vector<int> surviving;
};

struct GoodSetSample {
    ParamVector t;
    double mean_energy = 0.0;
    bool good = false;
};

struct GoodSets {
    double c_prime = 0.0;      // measured grand mean over (t, X)
    double t_threshold = 0.0;  // c_prime * delta0^{-2 eps}
    double x_threshold = 0.0;  // c_prime * delta0^{-3 eps}
    std::vector<GoodSetSample> per_t;
    std::vector<EnergyProfile> good_profiles;  // one per good t, in t order
    double rejected_t_fraction = 0.0;
    double mean_rejected_x_fraction = 0.0;
    double max_rejected_x_fraction = 0.0;
};

/// Two-step Chebyshev selection: t is kept when its mean projected energy
/// stays under C' delta0^{-2 eps}; within a kept t, X is kept when its own
/// energy stays under C' delta0^{-3 eps}. C' is the measured grand mean, so
/// Markov gives rejected fractions <= delta0^{2 eps} and <= delta0^{3 eps}
/// respectively (the inequalities are strict cuts, matching the proof).
inline GoodSets select_good_sets(const PointCloud& cloud, const ProjectionFamily& fam,
                                 const TruncatedEnergyParams& params, double epsilon,
                                 const std::vector<ParamVector>& t_samples,
                                 unsigned threads = 0) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("select_good_sets: epsilon in (0,1) required");
    if (t_samples.empty()) throw std::invalid_argument("select_good_sets: no t samples");

    std::vector<std::vector<double>> energies(t_samples.size());
    parallel_for(t_samples.size(), threads, [&](std::size_t i) {
        const auto image = factor_image(cloud, fam, t_samples[i]);
        energies[i] = detail::projected_energies(image, params);
    });

    GoodSets sets;
    sets.per_t.resize(t_samples.size());
    std::vector<double> means(t_samples.size());
    for (std::size_t i = 0; i < t_samples.size(); ++i) {
        means[i] = pairwise_mean(energies[i]);
        sets.per_t[i] = {t_samples[i], means[i], false};
    }
    sets.c_prime = pairwise_mean(means);
    sets.t_threshold = sets.c_prime * std::pow(params.delta0, -2.0 * epsilon);
    sets.x_threshold = sets.c_prime * std::pow(params.delta0, -3.0 * epsilon);

    int rejected_t = 0;
    std::vector<double> rej_x;
    for (std::size_t i = 0; i < t_samples.size(); ++i) {
        const bool good = means[i] < sets.t_threshold;
        sets.per_t[i].good = good;
        if (!good) {
            ++rejected_t;
            continue;
        }
        EnergyProfile profile;
        profile.threshold_used = sets.x_threshold;
        profile.mean = means[i];
        profile.per_point.reserve(energies[i].size());
        for (int j = 0; j < static_cast<int>(energies[i].size()); ++j) {
            const double e = energies[i][static_cast<std::size_t>(j)];
            profile.per_point.emplace_back(j, e);
            if (e < sets.x_threshold) profile.surviving.push_back(j);
        }
        rej_x.push_back(1.0 - profile.surviving.size() /
                                  static_cast<double>(profile.per_point.size()));
        sets.good_profiles.push_back(std::move(profile));
    }
    sets.rejected_t_fraction = rejected_t / static_cast<double>(t_samples.size());
    if (!rej_x.empty()) {
        sets.mean_rejected_x_fraction = pairwise_mean(rej_x);
        sets.max_rejected_x_fraction = *std::max_element(rej_x.begin(), rej_x.end());
    }
    return sets;
}

// --- CSV export ----------------------------------------------------------

inline void write_energy_profile_csv(std::ostream& os, const EnergyProfile& profile) {
    os << "index,energy\n";
    char buf[32];
    for (const auto& [index, energy] : profile.per_point) {
        std::snprintf(buf, sizeof buf, "%.17g", energy);
        os << index << ',' << buf << '\n';
    }
}

inline void write_annuli_csv(std::ostream& os, const AnnuliProfile& profile) {
    os << "k,mass,weighted\n";
    char m[32], w[32];
    for (const auto& band : profile.per_k) {
        std::snprintf(m, sizeof m, "%.17g", band.mass);
        std::snprintf(w, sizeof w, "%.17g", band.weighted);
        os << band.k << ',' << m << ',' << w << '\n';
    }
}

}  // namespace restproj
