#pragma once

// JSON serialization of report types (nlohmann/json). Report files carry a
// "kind" discriminator and a schema_version so downstream tooling can
// dispatch without guessing.

#include <json.hpp>

#include <string>
#include <vector>

#include "concentration.hpp"
#include "energy.hpp"
#include "pointcloud.hpp"

namespace restproj {

using json = nlohmann::json;

inline json to_json(const ParamVector& t) {
    json arr = json::array();
    for (int d = 0; d < t.dim(); ++d) arr.push_back(t.t[d]);
    return arr;
}

inline ParamVector param_from_json(const json& arr) {
    Eigen::VectorXd t(arr.size());
    for (std::size_t d = 0; d < arr.size(); ++d) t[static_cast<Eigen::Index>(d)] = arr[d].get<double>();
    return ParamVector(std::move(t));
}

inline json to_json(const RegularityReport& report) {
    json per_scale = json::array();
    for (const auto& [delta, ratio] : report.per_scale)
        per_scale.push_back({{"delta", delta}, {"max_ratio", ratio}});
    return json{{"kind", "regularity"},
                {"schema_version", 1},
                {"worst_ratio", report.worst_ratio},
                {"witness_point", report.witness_point},
                {"witness_delta", report.witness_delta},
                {"claimed_c", report.claimed_c},
                {"passes_claimed_c", report.passes_claimed_c},
                {"subsampled", report.subsampled},
                {"subsample_size", report.subsample_size},
                {"subsample_seed", report.subsample_seed},
                {"per_scale", per_scale}};
}

inline json to_json(const TrimOutcome& outcome) {
    return json{{"initial_bad_fraction", outcome.initial_bad_fraction},
                {"removed_fraction", outcome.removed_fraction},
                {"good", outcome.good},
                {"max_count_after", outcome.max_count_after}};
}

inline json to_json(const SweepReport& report) {
    json per_t = json::array();
    for (const auto& sample : report.per_t)
        per_t.push_back({{"t", to_json(sample.t)},
                         {"theorem", to_json(sample.theorem)},
                         {"proof", to_json(sample.proof)}});
    return json{{"delta", report.delta},
                {"epsilon", report.epsilon},
                {"alpha", report.alpha},
                {"cloud_size", report.cloud_size},
                {"seed", report.seed},
                {"measured_c", report.measured_c},
                {"bound_form", report.bound_form == BoundForm::theorem ? "theorem" : "proof"},
                {"bound_theorem", report.bound_theorem},
                {"bound_proof", report.bound_proof},
                {"budget_fraction", report.budget_fraction},
                {"exceptional_fraction", report.exceptional_fraction},
                {"exceptional_fraction_theorem", report.exceptional_fraction_theorem},
                {"exceptional_fraction_proof", report.exceptional_fraction_proof},
                {"per_t", per_t}};
}

/// A sweep-set file: one sweep per ladder rung, shared t samples.
inline json sweep_set_json(const std::vector<SweepReport>& sweeps) {
    json arr = json::array();
    for (const auto& sweep : sweeps) arr.push_back(to_json(sweep));
    return json{{"kind", "sweep-set"}, {"schema_version", 1}, {"sweeps", arr}};
}

inline json to_json(const DimensionEstimate& est) {
    json counts = json::array();
    for (const auto& [delta, count] : est.counts)
        counts.push_back({{"delta", delta}, {"boxes", count}});
    return json{{"slope", est.slope},
                {"intercept", est.intercept},
                {"delta_lo", est.delta_lo},
                {"delta_hi", est.delta_hi},
                {"residual", est.residual},
                {"counts", counts}};
}

/// Box-dimension-vs-parameter report ("dims"): slope of the projected image
/// per t sample, optionally with the distance to a designated t0.
struct DimsSample {
    ParamVector t;
    double dist_t0 = -1.0;  // negative when no t0 was given
    double slope = 0.0;
    double residual = 0.0;
};

struct DimsReport {
    std::vector<DimsSample> per_t;
    double median_slope = 0.0;
    bool has_t0 = false;
    ParamVector t0;
    DimensionEstimate representative;  // the estimate realizing the median
};

inline json to_json(const DimsReport& report) {
    json per_t = json::array();
    for (const auto& sample : report.per_t) {
        json row{{"t", to_json(sample.t)},
                 {"slope", sample.slope},
                 {"residual", sample.residual}};
        if (report.has_t0) row["dist_t0"] = sample.dist_t0;
        per_t.push_back(row);
    }
    json out{{"kind", "dims"},
             {"schema_version", 1},
             {"median_slope", report.median_slope},
             {"per_t", per_t},
             {"representative", to_json(report.representative)}};
    if (report.has_t0) out["t0"] = to_json(report.t0);
    return out;
}

inline json to_json(const GoodSets& sets, double delta0, double epsilon) {
    json per_t = json::array();
    for (const auto& sample : sets.per_t)
        per_t.push_back({{"t", to_json(sample.t)},
                         {"mean_energy", sample.mean_energy},
                         {"good", sample.good}});
    return json{{"kind", "energy-selection"},
                {"schema_version", 1},
                {"delta0", delta0},
                {"epsilon", epsilon},
                {"c_prime", sets.c_prime},
                {"t_threshold", sets.t_threshold},
                {"x_threshold", sets.x_threshold},
                {"rejected_t_fraction", sets.rejected_t_fraction},
                {"mean_rejected_x_fraction", sets.mean_rejected_x_fraction},
                {"max_rejected_x_fraction", sets.max_rejected_x_fraction},
                {"per_t", per_t}};
}

inline json to_json(const MomentReport& report) {
    json per_s = json::array();
    for (const auto& sample : report.per_s)
        per_s.push_back({{"s", sample.s},
                         {"max_count", sample.max_count},
                         {"bad_fraction", sample.bad_fraction},
                         {"good", sample.good}});
    return json{{"kind", "moment"},
                {"schema_version", 1},
                {"delta", report.delta},
                {"epsilon", report.epsilon},
                {"alpha", report.alpha},
                {"c_emp", report.c_emp},
                {"bound", report.bound},
                {"budget_fraction", report.budget_fraction},
                {"good_fraction", report.good_fraction},
                {"per_s", per_s}};
}

}  // namespace restproj
