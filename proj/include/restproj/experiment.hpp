#pragma once

// Orchestration: seeded experiment configs, the generate -> verify ->
// select -> sweep pipeline with a hashed run directory and content-hash
// manifest, box-dimension experiments, and plot-data extraction.

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "concentration.hpp"
#include "energy.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "lie_son1.hpp"
#include "numeric.hpp"
#include "pointcloud.hpp"
#include "reports.hpp"
#include "version.hpp"

namespace restproj {

namespace fs = std::filesystem;

/// Configuration rejection listing every violated constraint at once.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string msg = "invalid config:";
        for (const auto& issue : issues) msg += "\n  - " + issue;
        return msg;
    }
    std::vector<std::string> issues_;
};

// --- generator spec <-> JSON ----------------------------------------------

inline json to_json(const GeneratorSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, CantorProductSpec>) {
                json coords = json::array();
                for (const auto& c : s.coords)
                    coords.push_back({{"coordinate", c.coordinate},
                                      {"pieces", c.pieces},
                                      {"ratio", c.ratio},
                                      {"level", c.level}});
                return {{"kind", "cantor_product"}, {"n", s.n}, {"coords", coords}};
            } else if constexpr (std::is_same_v<T, UniformSegmentSpec>) {
                json out{{"kind", "uniform_segment"}, {"n", s.n}, {"count", s.count}};
                if (s.direction) {
                    json dir = json::array();
                    for (int d = 0; d < s.direction->size(); ++d) dir.push_back((*s.direction)[d]);
                    out["direction"] = dir;
                }
                return out;
            } else if constexpr (std::is_same_v<T, AlphaRegularRandomSpec>) {
                return {{"kind", "alpha_regular_random"},
                        {"n", s.n},
                        {"target_alpha", s.target_alpha},
                        {"levels", s.levels}};
            } else if constexpr (std::is_same_v<T, KernelHyperplaneSpec>) {
                json t0 = json::array();
                for (int d = 0; d < s.t0.size(); ++d) t0.push_back(s.t0[d]);
                return {{"kind", "kernel_hyperplane"},
                        {"n", s.n},
                        {"count", s.count},
                        {"t0", t0},
                        {"offset", s.offset}};
            } else {
                static_assert(std::is_same_v<T, FiniteGridSpec>);
                return {{"kind", "finite_grid"},
                        {"n", s.n},
                        {"axes", s.axes},
                        {"points_per_axis", s.points_per_axis}};
            }
        },
        spec);
}

inline GeneratorSpec generator_from_json(const json& g) {
    if (!g.is_object() || !g.contains("kind"))
        throw ConfigError({"generator: object with a \"kind\" field required"});
    const std::string kind = g.at("kind").get<std::string>();
    const int n = g.value("n", 3);
    if (kind == "cantor_product") {
        CantorProductSpec spec;
        spec.n = n;
        if (!g.contains("coords") || !g.at("coords").is_array())
            throw ConfigError({"cantor_product: \"coords\" array required"});
        for (const auto& c : g.at("coords"))
            spec.coords.push_back(CantorCoordinate{c.value("coordinate", 0),
                                                   c.value("pieces", 2),
                                                   c.value("ratio", 1.0 / 3.0),
                                                   c.value("level", 6)});
        return spec;
    }
    if (kind == "uniform_segment") {
        UniformSegmentSpec spec;
        spec.n = n;
        spec.count = g.value("count", 1024);
        if (g.contains("direction")) {
            const auto& dir = g.at("direction");
            Eigen::VectorXd v(dir.size());
            for (std::size_t d = 0; d < dir.size(); ++d) v[static_cast<Eigen::Index>(d)] = dir[d].get<double>();
            spec.direction = std::move(v);
        }
        return spec;
    }
    if (kind == "alpha_regular_random") {
        AlphaRegularRandomSpec spec;
        spec.n = n;
        spec.target_alpha = g.value("target_alpha", 0.7);
        spec.levels = g.value("levels", 10);
        return spec;
    }
    if (kind == "kernel_hyperplane") {
        KernelHyperplaneSpec spec;
        spec.n = n;
        spec.count = g.value("count", 1024);
        if (!g.contains("t0") || !g.at("t0").is_array())
            throw ConfigError({"kernel_hyperplane: \"t0\" array required"});
        const auto& t0 = g.at("t0");
        spec.t0.resize(static_cast<Eigen::Index>(t0.size()));
        for (std::size_t d = 0; d < t0.size(); ++d) spec.t0[static_cast<Eigen::Index>(d)] = t0[d].get<double>();
        spec.offset = g.value("offset", 0.0);
        return spec;
    }
    if (kind == "finite_grid") {
        FiniteGridSpec spec;
        spec.n = n;
        spec.axes = g.value("axes", 1);
        spec.points_per_axis = g.value("points_per_axis", 33);
        return spec;
    }
    throw ConfigError({"generator: unknown kind \"" + kind + "\""});
}

// --- experiment config -----------------------------------------------------

struct ExperimentConfig {
    std::uint64_t seed = 1;
    GeneratorSpec generator = UniformSegmentSpec{};
    bool standard_family = true;
    Eigen::MatrixXd family_l;  // used when !standard_family
    Eigen::MatrixXd family_q;
    double epsilon = 0.005;
    int t_sample_count = 64;
    std::vector<double> delta_ladder;
    double a_emp = 1.0;
    BoundForm bound_form = BoundForm::theorem;
    unsigned threads = 0;
    bool stage_regularity = true;
    bool stage_energy = true;
    bool stage_sweep = true;
    bool stage_lie = false;
    double max_exceptional_fraction = 0.1;
    std::optional<double> alpha_override;

    int generator_n() const {
        return std::visit([](const auto& s) { return s.n; }, generator);
    }

    ProjectionFamily family() const {
        if (standard_family) return ProjectionFamily::standard(generator_n() - 2);
        return ProjectionFamily(family_l, family_q);
    }
};

inline json to_json(const ExperimentConfig& config) {
    json stages{{"verify_regularity", config.stage_regularity},
                {"energy", config.stage_energy},
                {"sweep", config.stage_sweep},
                {"lie_check", config.stage_lie}};
    json family;
    if (config.standard_family) {
        family = "standard";
    } else {
        json l = json::array(), q = json::array();
        for (int i = 0; i < config.family_l.rows(); ++i) {
            json lr = json::array(), qr = json::array();
            for (int j = 0; j < config.family_l.cols(); ++j) {
                lr.push_back(config.family_l(i, j));
                qr.push_back(config.family_q(i, j));
            }
            l.push_back(lr);
            q.push_back(qr);
        }
        family = json{{"L", l}, {"Q", q}};
    }
    json out{{"schema_version", 1},
             {"seed", config.seed},
             {"generator", to_json(config.generator)},
             {"family", family},
             {"epsilon", config.epsilon},
             {"t_sample_count", config.t_sample_count},
             {"delta_ladder", config.delta_ladder},
             {"a_emp", config.a_emp},
             {"bound_form", config.bound_form == BoundForm::theorem ? "theorem" : "proof"},
             {"threads", config.threads},
             {"stages", stages},
             {"max_exceptional_fraction", config.max_exceptional_fraction}};
    if (config.alpha_override) out["alpha"] = *config.alpha_override;
    return out;
}

inline ExperimentConfig config_from_json(const json& j) {
    std::vector<std::string> issues;
    ExperimentConfig config;
    if (!j.is_object()) throw ConfigError({"config must be a JSON object"});

    config.seed = j.value("seed", std::uint64_t{1});
    try {
        if (j.contains("generator"))
            config.generator = generator_from_json(j.at("generator"));
        else
            issues.push_back("missing \"generator\"");
    } catch (const ConfigError& e) {
        for (const auto& issue : e.issues()) issues.push_back(issue);
    } catch (const std::exception& e) {
        issues.push_back(std::string("generator: ") + e.what());
    }

    if (j.contains("family") && !j.at("family").is_string()) {
        const auto& fam = j.at("family");
        if (!fam.contains("L") || !fam.contains("Q")) {
            issues.push_back("family: need both \"L\" and \"Q\" matrices (or \"standard\")");
        } else {
            const auto& l = fam.at("L");
            const auto& q = fam.at("Q");
            const auto rows = l.size();
            config.family_l.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
            config.family_q.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
            try {
                for (std::size_t i = 0; i < rows; ++i)
                    for (std::size_t k = 0; k < rows; ++k) {
                        config.family_l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                            l.at(i).at(k).get<double>();
                        config.family_q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                            q.at(i).at(k).get<double>();
                    }
                config.standard_family = false;
            } catch (const std::exception&) {
                issues.push_back("family: L and Q must be square numeric matrices of equal size");
            }
        }
    }

    config.epsilon = j.value("epsilon", 0.005);
    if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
        issues.push_back("epsilon must lie in (0, 1)");
    config.t_sample_count = j.value("t_sample_count", 64);
    if (config.t_sample_count < 1) issues.push_back("t_sample_count must be >= 1");
    if (j.contains("delta_ladder"))
        for (const auto& d : j.at("delta_ladder")) config.delta_ladder.push_back(d.get<double>());
    for (double d : config.delta_ladder) {
        int k = 0;
        if (!dyadic_exponent(d, k))
            issues.push_back("delta_ladder entries must be dyadic 2^-k in (0, 1]");
    }
    config.a_emp = j.value("a_emp", 1.0);
    const std::string form = j.value("bound_form", std::string("theorem"));
    if (form == "theorem")
        config.bound_form = BoundForm::theorem;
    else if (form == "proof")
        config.bound_form = BoundForm::proof;
    else
        issues.push_back("bound_form must be \"theorem\" or \"proof\"");
    config.threads = j.value("threads", 0u);
    if (j.contains("stages")) {
        const auto& stages = j.at("stages");
        config.stage_regularity = stages.value("verify_regularity", true);
        config.stage_energy = stages.value("energy", true);
        config.stage_sweep = stages.value("sweep", true);
        config.stage_lie = stages.value("lie_check", false);
    }
    config.max_exceptional_fraction = j.value("max_exceptional_fraction", 0.1);
    if (j.contains("alpha")) config.alpha_override = j.at("alpha").get<double>();
    if (config.alpha_override && !(*config.alpha_override > 0.0 && *config.alpha_override <= 1.0))
        issues.push_back("alpha override must lie in (0, 1]");
    if (config.stage_sweep && config.delta_ladder.empty())
        issues.push_back("sweep stage enabled but delta_ladder is empty");

    if (!issues.empty()) throw ConfigError(std::move(issues));
    return config;
}

/// Constraints that need the generated cloud: the finitary hypothesis
/// epsilon < alpha/100 and the ladder window [delta0, 1].
inline std::vector<std::string> validate_against_cloud(const ExperimentConfig& config,
                                                       const PointCloud& cloud) {
    std::vector<std::string> issues;
    const double alpha = config.alpha_override.value_or(cloud.claimed_alpha());
    if (config.stage_sweep && !(config.epsilon < alpha / 100.0)) {
        std::ostringstream oss;
        oss << "epsilon = " << config.epsilon << " must be < alpha/100 = " << alpha / 100.0
            << " for the finitary sweep";
        issues.push_back(oss.str());
    }
    for (double d : config.delta_ladder)
        if (d < cloud.delta0() || d > 1.0) {
            std::ostringstream oss;
            oss << "delta_ladder entry " << d << " outside [delta0, 1] = ["
                << cloud.delta0() << ", 1]";
            issues.push_back(oss.str());
        }
    return issues;
}

// --- the run pipeline ------------------------------------------------------

struct StageOutcome {
    std::string name;
    bool ok = false;
    double millis = 0.0;
    std::string detail;
};

struct InventoryEntry {
    std::string path;  // relative to the run directory
    std::uintmax_t bytes = 0;
    std::string fnv1a64_hex;
};

struct RunResult {
    bool ok = true;
    fs::path dir;
    std::vector<StageOutcome> stages;
    std::vector<InventoryEntry> inventory;
};

namespace detail {

inline std::string hash_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

inline void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << content;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

class StageTimer {
public:
    explicit StageTimer(std::string name) : name_(std::move(name)) {}
    StageOutcome finish(bool ok, std::string detail) const {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        return {name_, ok,
                std::chrono::duration<double, std::milli>(elapsed).count(),
                std::move(detail)};
    }

private:
    std::string name_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

inline std::vector<ParamVector> draw_annulus_samples(int m, int count, std::uint64_t seed,
                                                     std::uint64_t stream) {
    Rng rng = Rng::derive(seed, stream);
    std::vector<ParamVector> ts;
    ts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) ts.emplace_back(rng.in_annulus(m));
    return ts;
}

inline RunResult run_experiment(const ExperimentConfig& config, const fs::path& out_root) {
    const PointCloud cloud = generate(config.generator, config.seed);
    if (auto issues = validate_against_cloud(config, cloud); !issues.empty())
        throw ConfigError(std::move(issues));
    const ProjectionFamily fam = config.family();
    if (auto family_check = validate_family(fam); !family_check.valid())
        throw ConfigError(family_check.issues);

    const json config_echo = to_json(config);
    const std::string canonical = config_echo.dump(2);

    RunResult result;
    result.dir = out_root / ("run-" + detail::hash_hex(canonical));
    fs::create_directories(result.dir);

    std::vector<std::string> files;
    auto emit = [&](const std::string& name, const std::string& content) {
        detail::write_file(result.dir / name, content);
        files.push_back(name);
    };

    emit("config.json", canonical + "\n");
    {
        std::ostringstream cloud_text;
        write_cloud(cloud_text, cloud);
        emit("cloud.txt", cloud_text.str());
    }

    std::ostringstream summary;
    summary << "run " << result.dir.filename().string() << "\n"
            << "cloud: n=" << cloud.n() << " N=" << cloud.size()
            << " delta0=" << cloud.delta0() << " alpha=" << cloud.claimed_alpha()
            << " claimed_C=" << cloud.claimed_c() << "\n\n"
            << "stage            status  detail\n";
    auto record = [&](const StageOutcome& outcome) {
        result.stages.push_back(outcome);
        result.ok = result.ok && outcome.ok;
        char line[256];
        std::snprintf(line, sizeof line, "%-16s %-7s %s\n", outcome.name.c_str(),
                      outcome.ok ? "PASS" : "FAIL", outcome.detail.c_str());
        summary << line;
    };

    double measured_c = 0.0;
    if (config.stage_regularity) {
        detail::StageTimer timer("regularity");
        auto report = verify_regularity(cloud);
        measured_c = report.worst_ratio;
        emit("regularity.json", to_json(report).dump(2) + "\n");
        std::ostringstream detail_text;
        detail_text << "worst_ratio=" << report.worst_ratio
                    << (report.passes_claimed_c ? " <= " : " > ") << "claimed_C="
                    << report.claimed_c;
        record(timer.finish(report.passes_claimed_c, detail_text.str()));
    }

    const int m = cloud.n() - 2;
    const auto t_samples = draw_annulus_samples(m, config.t_sample_count, config.seed, 1);
    const double alpha = config.alpha_override.value_or(cloud.claimed_alpha());

    if (config.stage_energy) {
        detail::StageTimer timer("energy");
        TruncatedEnergyParams params(alpha, cloud.delta0());
        auto sets = select_good_sets(cloud, fam, params, config.epsilon, t_samples,
                                     config.threads);
        json energy_json = to_json(sets, cloud.delta0(), config.epsilon);
        // The B-averaged energy estimate comes free from the per-t means.
        std::vector<double> means(sets.per_t.size());
        for (std::size_t i = 0; i < means.size(); ++i) means[i] = sets.per_t[i].mean_energy;
        const double mc_integral = annulus_volume(m) * pairwise_mean(means);
        energy_json["mc_integral"] = mc_integral;
        energy_json["kappa"] = mc_integral / cloud.k0();
        emit("energy_selection.json", energy_json.dump(2) + "\n");
        std::size_t good_index = 0;
        for (std::size_t i = 0; i < sets.per_t.size() && good_index < sets.good_profiles.size(); ++i) {
            if (!sets.per_t[i].good) continue;
            char name[48];
            std::snprintf(name, sizeof name, "energy_t%03zu.csv", i);
            std::ostringstream csv;
            write_energy_profile_csv(csv, sets.good_profiles[good_index++]);
            emit(name, csv.str());
        }
        // Markov guarantees with the measured grand mean; failing them would
        // mean the selection arithmetic is broken.
        const bool markov_ok =
            sets.rejected_t_fraction <=
                std::pow(cloud.delta0(), 2.0 * config.epsilon) + 1e-12 &&
            sets.max_rejected_x_fraction <= std::pow(cloud.delta0(), config.epsilon) + 1e-12;
        std::ostringstream detail_text;
        detail_text << "C'=" << sets.c_prime << " rejected_t=" << sets.rejected_t_fraction
                    << " max_rejected_x=" << sets.max_rejected_x_fraction
                    << " kappa=" << mc_integral / cloud.k0();
        record(timer.finish(markov_ok, detail_text.str()));
    }

    if (config.stage_sweep) {
        detail::StageTimer timer("sweep");
        FinitaryOptions options;
        options.bound_form = config.bound_form;
        options.a_emp = config.a_emp;
        options.measured_c = measured_c;  // 0 lets finitary_check measure it
        options.threads = config.threads;
        options.seed_echo = config.seed;
        std::vector<SweepReport> sweeps;
        bool sweep_ok = true;
        double worst = 0.0;
        for (double delta : config.delta_ladder) {
            sweeps.push_back(
                finitary_check(cloud, fam, delta, config.epsilon, t_samples, options));
            worst = std::max(worst, sweeps.back().exceptional_fraction);
            sweep_ok = sweep_ok &&
                       sweeps.back().exceptional_fraction <= config.max_exceptional_fraction;
        }
        emit("sweep.json", sweep_set_json(sweeps).dump(2) + "\n");
        std::ostringstream csv;
        for (std::size_t i = 0; i < sweeps.size(); ++i) write_sweep_csv(csv, sweeps[i], i == 0);
        emit("sweep.csv", csv.str());
        std::ostringstream detail_text;
        detail_text << "max exceptional_fraction=" << worst << " over " << sweeps.size()
                    << " deltas (cap " << config.max_exceptional_fraction << ")";
        record(timer.finish(sweep_ok, detail_text.str()));
    }

    if (config.stage_lie) {
        detail::StageTimer timer("lie");
        auto v = verify_lie_realization(cloud.n(), 200, config.seed);
        std::ostringstream table;
        table << "n  samples  lie_residual  trace  u_group  a_group  contraction  xi_vs_project\n";
        char line[200];
        std::snprintf(line, sizeof line, "%-2d %-8d %-13.3e %-6.1e %-8.1e %-8.1e %-12.1e %-13.3e\n",
                      v.n, v.samples, v.max_lie_residual, v.max_trace_residual,
                      v.max_u_group_residual, v.max_a_group_residual,
                      v.max_contraction_residual, v.max_xi_vs_project);
        table << line;
        emit("lie.txt", table.str());
        const bool lie_ok = v.max_lie_residual < 1e-12 && v.max_trace_residual < 1e-12 &&
                            v.max_u_group_residual < 1e-12 &&
                            v.max_a_group_residual < 1e-12 &&
                            v.max_contraction_residual < 1e-12 &&
                            v.max_xi_vs_project < 1e-12;
        record(timer.finish(lie_ok, "max xi residual " + std::to_string(v.max_xi_vs_project)));
    }

    summary << "\noverall: " << (result.ok ? "PASS" : "FAIL") << "\n";
    emit("summary.txt", summary.str());

    json manifest{{"kind", "manifest"},
                  {"schema_version", 1},
                  {"code_version", RESTPROJ_VERSION},
                  {"ok", result.ok},
                  {"config", config_echo}};
    json stage_json = json::array();
    for (const auto& outcome : result.stages)
        stage_json.push_back({{"name", outcome.name},
                              {"ok", outcome.ok},
                              {"millis", outcome.millis},
                              {"detail", outcome.detail}});
    manifest["stages"] = stage_json;
    json inventory = json::array();
    for (const auto& name : files) {
        const std::string content = detail::read_file(result.dir / name);
        InventoryEntry entry{name, content.size(), detail::hash_hex(content)};
        inventory.push_back({{"path", entry.path},
                             {"bytes", entry.bytes},
                             {"fnv1a64", entry.fnv1a64_hex}});
        result.inventory.push_back(std::move(entry));
    }
    manifest["files"] = inventory;
    detail::write_file(result.dir / "manifest.json", manifest.dump(2) + "\n");
    return result;
}

// --- box-dimension experiments ---------------------------------------------

/// Box dimension of the projected image pi_t(F) per parameter sample, with
/// the median slope and (optionally) distances to a designated t0.
inline DimsReport dims_experiment(const PointCloud& cloud, const ProjectionFamily& fam,
                                  const std::vector<ParamVector>& t_samples,
                                  std::optional<ParamVector> t0 = std::nullopt,
                                  std::optional<std::pair<double, double>> fit = std::nullopt) {
    if (t_samples.empty()) throw std::invalid_argument("dims_experiment: no t samples");
    const auto [lo, hi] = fit ? *fit : default_fit_range(cloud.delta0());
    DimsReport report;
    report.has_t0 = t0.has_value();
    if (t0) report.t0 = *t0;
    std::vector<DimensionEstimate> estimates;
    estimates.reserve(t_samples.size());
    for (const auto& t : t_samples) {
        const Eigen::VectorXd values = project_all(cloud, fam, t);
        auto est = box_dimension(std::vector<double>(values.data(), values.data() + values.size()),
                                 lo, hi);
        DimsSample sample;
        sample.t = t;
        sample.slope = est.slope;
        sample.residual = est.residual;
        if (t0) sample.dist_t0 = (t.t - t0->t).norm();
        report.per_t.push_back(sample);
        estimates.push_back(std::move(est));
    }
    std::vector<std::size_t> order(estimates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return estimates[a].slope < estimates[b].slope;
    });
    const std::size_t mid = order[order.size() / 2];
    report.median_slope = estimates[mid].slope;
    report.representative = estimates[mid];
    return report;
}

// --- plot data ---------------------------------------------------------------

struct PlotSeries {
    std::string name;
    std::string csv;  // header + rows
};

/// Extracts plot-ready CSV series from report files:
///   sweep-set -> (log2 delta, exceptional fraction) scaling series,
///   dims      -> (|t - t0| or index, box dimension) and the
///                (log2 1/delta, log2 N(delta)) counts of the median fit.
/// Recognized kinds without a plot mapping are skipped; malformed files
/// raise with the offending path.
inline std::vector<PlotSeries> plotdata(const std::vector<fs::path>& report_files) {
    std::vector<PlotSeries> series;
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& path : report_files) {
        json j;
        try {
            j = json::parse(detail::read_file(path));
        } catch (const std::exception& e) {
            throw std::runtime_error("plotdata: cannot parse " + path.string() + ": " + e.what());
        }
        const std::string kind = j.value("kind", "");
        if (kind == "sweep-set") {
            std::ostringstream csv;
            csv << "log2_delta,exceptional_fraction,log2_exceptional_fraction_reg\n";
            try {
                for (const auto& sweep : j.at("sweeps")) {
                    const double delta = sweep.at("delta").get<double>();
                    const double ef = sweep.at("exceptional_fraction").get<double>();
                    const double reg = ef + 1.0 / sweep.at("per_t").size();
                    csv << fmt(std::log2(delta)) << ',' << fmt(ef) << ','
                        << fmt(std::log2(reg)) << '\n';
                }
            } catch (const std::exception& e) {
                throw std::runtime_error("plotdata: bad sweep-set schema in " + path.string() +
                                         ": " + e.what());
            }
            series.push_back({path.stem().string() + "_scaling", csv.str()});
        } else if (kind == "dims") {
            std::ostringstream csv;
            const bool has_t0 = j.contains("t0");
            csv << (has_t0 ? "t_dist,box_dimension\n" : "t_index,box_dimension\n");
            std::ostringstream counts_csv;
            counts_csv << "log2_inv_delta,log2_count\n";
            try {
                int index = 0;
                for (const auto& row : j.at("per_t")) {
                    const double x = has_t0 ? row.at("dist_t0").get<double>()
                                            : static_cast<double>(index);
                    csv << fmt(x) << ',' << fmt(row.at("slope").get<double>()) << '\n';
                    ++index;
                }
                for (const auto& row : j.at("representative").at("counts"))
                    counts_csv << fmt(std::log2(1.0 / row.at("delta").get<double>())) << ','
                               << fmt(std::log2(row.at("boxes").get<double>())) << '\n';
            } catch (const std::exception& e) {
                throw std::runtime_error("plotdata: bad dims schema in " + path.string() + ": " +
                                         e.what());
            }
            series.push_back({path.stem().string() + "_dims", csv.str()});
            series.push_back({path.stem().string() + "_counts", counts_csv.str()});
        } else if (kind == "regularity" || kind == "energy-selection" || kind == "moment" ||
                   kind == "manifest") {
            continue;  // valid report, no plot mapping
        } else {
            throw std::runtime_error("plotdata: unknown report kind \"" + kind + "\" in " +
                                     path.string());
        }
    }
    return series;
}

}  // namespace restproj
