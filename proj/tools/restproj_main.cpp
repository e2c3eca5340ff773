// restproj: command-line laboratory for restricted scalar projections of
// finite point clouds: cloud generation, regularity verification, truncated
// energies, concentration sweeps, box-dimension experiments, the matrix
// realization checks, and plot-data extraction.

#include <CLI11.hpp>

#include <restproj/acceptance.hpp>
#include <restproj/concentration.hpp>
#include <restproj/energy.hpp>
#include <restproj/experiment.hpp>
#include <restproj/generators.hpp>
#include <restproj/lie_son1.hpp>
#include <restproj/pointcloud.hpp>
#include <restproj/reports.hpp>
#include <restproj/version.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace restproj;

Eigen::VectorXd parse_vector(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
    return v;
}

std::vector<CantorCoordinate> parse_coords(const std::string& spec) {
    // "coordinate:pieces:ratio:level[,coordinate:pieces:ratio:level...]"
    std::vector<CantorCoordinate> coords;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        CantorCoordinate c;
        if (std::sscanf(item.c_str(), "%d:%d:%lf:%d", &c.coordinate, &c.pieces, &c.ratio,
                        &c.level) != 4)
            throw CLI::ValidationError("--coords", "expected coordinate:pieces:ratio:level");
        coords.push_back(c);
    }
    return coords;
}

fs::path default_out_root() {
    if (const char* env = std::getenv("RESTPROJ_OUT_ROOT")) return env;
    return "runs";
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << content;
}

int cmd_generate(const std::string& kind, int n, int count, std::uint64_t seed,
                 const std::string& direction, const std::string& coords,
                 double target_alpha, int levels, const std::string& t0, double offset,
                 int axes, int points_per_axis, const std::string& out) {
    GeneratorSpec spec = UniformSegmentSpec{};
    if (kind == "uniform_segment") {
        UniformSegmentSpec s;
        s.n = n;
        s.count = count;
        if (!direction.empty()) s.direction = parse_vector(direction);
        spec = s;
    } else if (kind == "cantor_product") {
        CantorProductSpec s;
        s.n = n;
        s.coords = parse_coords(coords.empty() ? "0:2:0.3333333333333333:8" : coords);
        spec = s;
    } else if (kind == "alpha_regular_random") {
        AlphaRegularRandomSpec s;
        s.n = n;
        s.target_alpha = target_alpha;
        s.levels = levels;
        spec = s;
    } else if (kind == "kernel_hyperplane") {
        KernelHyperplaneSpec s;
        s.n = n;
        s.count = count;
        if (t0.empty()) throw CLI::ValidationError("--t0", "required for kernel_hyperplane");
        s.t0 = parse_vector(t0);
        s.offset = offset;
        spec = s;
    } else if (kind == "finite_grid") {
        FiniteGridSpec s;
        s.n = n;
        s.axes = axes;
        s.points_per_axis = points_per_axis;
        spec = s;
    } else {
        throw CLI::ValidationError("--kind", "unknown generator kind " + kind);
    }
    const auto cloud = generate(spec, seed);
    save_cloud(out, cloud);
    std::cout << "wrote " << out << ": n=" << cloud.n() << " N=" << cloud.size()
              << " delta0=" << cloud.delta0() << " alpha=" << cloud.claimed_alpha()
              << " C=" << cloud.claimed_c() << "\n";
    return 0;
}

int cmd_verify_regularity(const std::string& cloud_path, const std::string& json_out,
                          int subsample_threshold, std::uint64_t subsample_seed) {
    const auto cloud = load_cloud(cloud_path);
    const auto report = verify_regularity(cloud, subsample_threshold, subsample_seed);
    if (!json_out.empty()) write_text(json_out, to_json(report).dump(2) + "\n");
    std::cout << "worst_ratio=" << report.worst_ratio << " at delta=" << report.witness_delta
              << " point=" << report.witness_point << " claimed_C=" << report.claimed_c
              << " -> " << (report.passes_claimed_c ? "PASS" : "FAIL") << "\n";
    return report.passes_claimed_c ? 0 : 1;
}

int cmd_energy(const std::string& cloud_path, double epsilon, int t_count,
               std::uint64_t seed, double alpha, int annuli_point, unsigned threads,
               const std::string& out_dir) {
    const auto cloud = load_cloud(cloud_path);
    const auto fam = ProjectionFamily::standard(cloud.n() - 2);
    const double a = alpha > 0.0 ? alpha : cloud.claimed_alpha();
    const TruncatedEnergyParams params(a, cloud.delta0());
    const auto ts = draw_annulus_samples(cloud.n() - 2, t_count, seed, 1);

    fs::create_directories(out_dir);
    const auto sets = select_good_sets(cloud, fam, params, epsilon, ts, threads);
    write_text(fs::path(out_dir) / "energy_selection.json",
               to_json(sets, cloud.delta0(), epsilon).dump(2) + "\n");
    std::size_t good_index = 0;
    for (std::size_t i = 0; i < sets.per_t.size(); ++i) {
        if (!sets.per_t[i].good) continue;
        std::ostringstream csv;
        write_energy_profile_csv(csv, sets.good_profiles[good_index++]);
        char name[48];
        std::snprintf(name, sizeof name, "energy_t%03zu.csv", i);
        write_text(fs::path(out_dir) / name, csv.str());
    }
    if (annuli_point >= 0) {
        std::ostringstream csv;
        write_annuli_csv(csv, annuli_profile(cloud, annuli_point, a));
        write_text(fs::path(out_dir) / "annuli.csv", csv.str());
    }
    const auto average = average_projected_energy(cloud, fam, params, ts, threads);
    std::cout << "C'=" << sets.c_prime << " rejected_t=" << sets.rejected_t_fraction
              << " max_rejected_x=" << sets.max_rejected_x_fraction
              << " B-integral=" << average.mc_integral << " (se " << average.std_error
              << "), kappa=" << average.mc_integral / cloud.k0() << "\n";
    const bool markov_ok =
        sets.rejected_t_fraction <= std::pow(cloud.delta0(), 2.0 * epsilon) + 1e-12 &&
        sets.max_rejected_x_fraction <= std::pow(cloud.delta0(), epsilon) + 1e-12;
    return markov_ok ? 0 : 1;
}

int cmd_sweep(const std::string& cloud_path, double epsilon, int t_count,
              std::uint64_t seed, int kmin, int kmax, const std::string& bound_form,
              double a_emp, double max_exceptional, unsigned threads,
              const std::string& out_dir) {
    const auto cloud = load_cloud(cloud_path);
    const auto fam = ProjectionFamily::standard(cloud.n() - 2);
    const auto regularity = verify_regularity(cloud);
    const auto ts = draw_annulus_samples(cloud.n() - 2, t_count, seed, 1);

    FinitaryOptions options;
    options.bound_form = bound_form == "proof" ? BoundForm::proof : BoundForm::theorem;
    options.a_emp = a_emp;
    options.measured_c = regularity.worst_ratio;
    options.threads = threads;
    options.seed_echo = seed;

    fs::create_directories(out_dir);
    std::vector<SweepReport> sweeps;
    bool ok = true;
    for (int k = kmin; k <= kmax; ++k) {
        const double delta = std::ldexp(1.0, -k);
        sweeps.push_back(finitary_check(cloud, fam, delta, epsilon, ts, options));
        const auto& report = sweeps.back();
        std::cout << "delta=2^-" << k << " exceptional=" << report.exceptional_fraction
                  << " (theorem " << report.exceptional_fraction_theorem << ", proof "
                  << report.exceptional_fraction_proof << ")\n";
        ok = ok && report.exceptional_fraction <= max_exceptional;
    }
    write_text(fs::path(out_dir) / "sweep.json", sweep_set_json(sweeps).dump(2) + "\n");
    std::ostringstream csv;
    for (std::size_t i = 0; i < sweeps.size(); ++i) write_sweep_csv(csv, sweeps[i], i == 0);
    write_text(fs::path(out_dir) / "sweep.csv", csv.str());
    return ok ? 0 : 1;
}

int cmd_moment(const std::string& cloud_path, const std::string& t_csv, double delta,
               double epsilon, int s_count, double c_emp, double alpha,
               const std::string& out) {
    const auto cloud = load_cloud(cloud_path);
    const auto fam = ProjectionFamily::standard(cloud.n() - 2);
    const ParamVector t(parse_vector(t_csv));
    const auto image = factor_image(cloud, fam, t);
    std::vector<double> s_grid;
    for (int i = 0; i < s_count; ++i)
        s_grid.push_back(s_count == 1 ? 0.0 : 2.0 * i / (s_count - 1));
    const double a = alpha > 0.0 ? alpha : cloud.claimed_alpha();
    const auto report = moment_curve_concentration(image, a, delta, epsilon, s_grid, c_emp);
    if (!out.empty()) write_text(out, to_json(report).dump(2) + "\n");
    std::cout << "good-s fraction " << report.good_fraction << " (bound " << report.bound
              << ", budget " << report.budget_fraction << ")\n";
    return 0;
}

int cmd_lie_check(int n_min, int n_max, int samples, std::uint64_t seed,
                  const std::string& out) {
    std::ostringstream table;
    table << "n  samples  lie_residual  trace_resid  u_group    a_group    contraction  xi_vs_project\n";
    bool ok = true;
    for (int n = n_min; n <= n_max; ++n) {
        const auto v = verify_lie_realization(n, samples, seed);
        char line[200];
        std::snprintf(line, sizeof line,
                      "%-2d %-8d %-13.3e %-12.3e %-10.3e %-10.3e %-12.3e %-13.3e\n", v.n,
                      v.samples, v.max_lie_residual, v.max_trace_residual,
                      v.max_u_group_residual, v.max_a_group_residual,
                      v.max_contraction_residual, v.max_xi_vs_project);
        table << line;
        ok = ok && v.max_lie_residual < 1e-12 && v.max_trace_residual < 1e-12 &&
             v.max_u_group_residual < 1e-12 && v.max_a_group_residual < 1e-12 &&
             v.max_contraction_residual < 1e-12 && v.max_xi_vs_project < 1e-12;
    }
    std::cout << table.str() << (ok ? "all residuals < 1e-12\n" : "RESIDUALS OVER TOLERANCE\n");
    if (!out.empty()) write_text(out, table.str());
    return ok ? 0 : 1;
}

int cmd_dims(const std::string& cloud_path, int t_count, std::uint64_t seed,
             const std::string& t0_csv, double fit_lo, double fit_hi,
             const std::string& out) {
    const auto cloud = load_cloud(cloud_path);
    const auto fam = ProjectionFamily::standard(cloud.n() - 2);
    const auto ts = draw_annulus_samples(cloud.n() - 2, t_count, seed, 1);
    std::optional<ParamVector> t0;
    if (!t0_csv.empty()) t0 = ParamVector(parse_vector(t0_csv));
    std::optional<std::pair<double, double>> fit;
    if (fit_lo > 0.0 && fit_hi > 0.0) fit = std::make_pair(fit_lo, fit_hi);
    const auto report = dims_experiment(cloud, fam, ts, t0, fit);
    if (!out.empty()) write_text(out, to_json(report).dump(2) + "\n");
    std::cout << "median box dimension " << report.median_slope << " over "
              << report.per_t.size() << " samples\n";
    return 0;
}

int cmd_plotdata(const std::vector<std::string>& reports, const std::string& out_dir) {
    std::vector<fs::path> paths(reports.begin(), reports.end());
    const auto series = plotdata(paths);
    if (!series.empty()) fs::create_directories(out_dir);
    for (const auto& s : series) {
        write_text(fs::path(out_dir) / (s.name + ".csv"), s.csv);
        std::cout << "wrote " << (fs::path(out_dir) / (s.name + ".csv")).string() << "\n";
    }
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_root) {
    std::ifstream is(config_path);
    if (!is) {
        std::cerr << "cannot open " << config_path << "\n";
        return 2;
    }
    json j;
    try {
        j = json::parse(is);
    } catch (const std::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    }
    const auto config = config_from_json(j);
    const auto result = run_experiment(config, out_root.empty() ? default_out_root()
                                                                : fs::path(out_root));
    for (const auto& stage : result.stages)
        std::cout << (stage.ok ? "[PASS] " : "[FAIL] ") << stage.name << ": " << stage.detail
                  << "\n";
    std::cout << "artifacts: " << result.dir.string() << "\n";
    return result.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"restricted-projection laboratory"};
    app.set_version_flag("--version", restproj::RESTPROJ_VERSION);
    app.require_subcommand(1);

    // generate
    std::string kind, direction, coords, t0, out = "cloud.txt";
    int n = 4, count = 1024, levels = 10, axes = 1, points_per_axis = 33;
    std::uint64_t seed = 1;
    double target_alpha = 0.7, offset = 0.0;
    auto* generate_cmd = app.add_subcommand("generate", "generate a point cloud file");
    generate_cmd->add_option("--kind", kind,
                             "uniform_segment | cantor_product | alpha_regular_random | "
                             "kernel_hyperplane | finite_grid")
        ->required();
    generate_cmd->add_option("--n", n, "ambient dimension (>= 3)");
    generate_cmd->add_option("--count", count, "number of points (where applicable)");
    generate_cmd->add_option("--seed", seed, "generator seed");
    generate_cmd->add_option("--direction", direction, "segment direction, comma-separated");
    generate_cmd->add_option("--coords", coords,
                             "cantor coordinates as coordinate:pieces:ratio:level[,...]");
    generate_cmd->add_option("--target-alpha", target_alpha, "alpha for the random tree");
    generate_cmd->add_option("--levels", levels, "tree depth for the random tree");
    generate_cmd->add_option("--t0", t0, "kernel parameter, comma-separated");
    generate_cmd->add_option("--offset", offset, "kernel level c");
    generate_cmd->add_option("--axes", axes, "grid axes");
    generate_cmd->add_option("--points-per-axis", points_per_axis, "grid points per axis");
    generate_cmd->add_option("--out", out, "output cloud path");

    // verify-regularity
    std::string vr_cloud, vr_json;
    int vr_threshold = 100000;
    std::uint64_t vr_seed = 1;
    auto* verify_cmd = app.add_subcommand("verify-regularity",
                                          "measure the ball-count regularity constant");
    verify_cmd->add_option("--cloud", vr_cloud, "cloud file")->required();
    verify_cmd->add_option("--json", vr_json, "write the full report as JSON");
    verify_cmd->add_option("--subsample-threshold", vr_threshold,
                           "subsample query points above this count");
    verify_cmd->add_option("--subsample-seed", vr_seed, "subsample seed");

    // energy
    std::string en_cloud, en_out = "energy-out";
    double en_epsilon = 0.005, en_alpha = 0.0;
    int en_tcount = 32, en_annuli_point = -1;
    std::uint64_t en_seed = 1;
    unsigned en_threads = 0;
    auto* energy_cmd = app.add_subcommand("energy",
                                          "projected truncated energies and good-set selection");
    energy_cmd->add_option("--cloud", en_cloud, "cloud file")->required();
    energy_cmd->add_option("--epsilon", en_epsilon, "selection exponent in (0,1)");
    energy_cmd->add_option("--t-samples", en_tcount, "number of parameter samples");
    energy_cmd->add_option("--seed", en_seed, "sampling seed");
    energy_cmd->add_option("--alpha", en_alpha, "energy exponent (default: cloud alpha)");
    energy_cmd->add_option("--annuli-point", en_annuli_point,
                           "also write the dyadic annuli profile of this point index");
    energy_cmd->add_option("--threads", en_threads, "worker threads (0 = auto)");
    energy_cmd->add_option("--out-dir", en_out, "output directory");

    // sweep
    std::string sw_cloud, sw_bound = "theorem", sw_out = "sweep-out";
    double sw_epsilon = 0.005, sw_a_emp = 1.0, sw_max = 0.1;
    int sw_tcount = 100, sw_kmin = 5, sw_kmax = 10;
    std::uint64_t sw_seed = 1;
    unsigned sw_threads = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "finitary concentration sweep over a dyadic ladder");
    sweep_cmd->add_option("--cloud", sw_cloud, "cloud file")->required();
    sweep_cmd->add_option("--epsilon", sw_epsilon, "theorem epsilon (< alpha/100)");
    sweep_cmd->add_option("--t-samples", sw_tcount, "number of parameter samples");
    sweep_cmd->add_option("--seed", sw_seed, "sampling seed");
    sweep_cmd->add_option("--kmin", sw_kmin, "smallest k: ladder delta = 2^-k");
    sweep_cmd->add_option("--kmax", sw_kmax, "largest k");
    sweep_cmd->add_option("--bound-form", sw_bound, "theorem | proof");
    sweep_cmd->add_option("--a-emp", sw_a_emp, "removal budget exponent");
    sweep_cmd->add_option("--max-exceptional", sw_max, "pass threshold per delta");
    sweep_cmd->add_option("--threads", sw_threads, "worker threads (0 = auto)");
    sweep_cmd->add_option("--out-dir", sw_out, "output directory");

    // moment
    std::string mo_cloud, mo_t, mo_out;
    double mo_delta = 0.03125, mo_epsilon = 0.005, mo_cemp = 4.0, mo_alpha = 0.0;
    int mo_scount = 41;
    auto* moment_cmd = app.add_subcommand("moment",
                                          "curve-stage concentration on the factor image");
    moment_cmd->add_option("--cloud", mo_cloud, "cloud file")->required();
    moment_cmd->add_option("--t", mo_t, "parameter, comma-separated")->required();
    moment_cmd->add_option("--delta", mo_delta, "window size");
    moment_cmd->add_option("--epsilon", mo_epsilon, "exponent");
    moment_cmd->add_option("--s-count", mo_scount, "grid points on [0,2]");
    moment_cmd->add_option("--c-emp", mo_cemp, "bound constant");
    moment_cmd->add_option("--alpha", mo_alpha, "exponent (default: cloud alpha)");
    moment_cmd->add_option("--out", mo_out, "write the report as JSON");

    // lie-check
    int lc_nmin = 3, lc_nmax = 8, lc_samples = 500;
    std::uint64_t lc_seed = 1;
    std::string lc_out;
    auto* lie_cmd = app.add_subcommand("lie-check", "matrix realization residual table");
    lie_cmd->add_option("--n-min", lc_nmin, "smallest ambient dimension");
    lie_cmd->add_option("--n-max", lc_nmax, "largest ambient dimension");
    lie_cmd->add_option("--samples", lc_samples, "random elements per dimension");
    lie_cmd->add_option("--seed", lc_seed, "sampling seed");
    lie_cmd->add_option("--out", lc_out, "also write the table to this file");

    // dims
    std::string dm_cloud, dm_t0, dm_out;
    int dm_tcount = 200;
    std::uint64_t dm_seed = 1;
    double dm_fit_lo = 0.0, dm_fit_hi = 0.0;
    auto* dims_cmd = app.add_subcommand("dims", "box dimension of projected images over t samples");
    dims_cmd->add_option("--cloud", dm_cloud, "cloud file")->required();
    dims_cmd->add_option("--t-samples", dm_tcount, "number of parameter samples");
    dims_cmd->add_option("--seed", dm_seed, "sampling seed");
    dims_cmd->add_option("--t0", dm_t0, "reference parameter for distance annotation");
    dims_cmd->add_option("--fit-lo", dm_fit_lo, "fit range lower delta");
    dims_cmd->add_option("--fit-hi", dm_fit_hi, "fit range upper delta");
    dims_cmd->add_option("--out", dm_out, "write the report as JSON");

    // plotdata
    std::vector<std::string> pd_reports;
    std::string pd_out = "plots";
    auto* plot_cmd = app.add_subcommand("plotdata", "extract plot-ready CSV series from reports");
    plot_cmd->add_option("reports", pd_reports, "report JSON files");
    plot_cmd->add_option("--out-dir", pd_out, "output directory");

    // run
    std::string run_config, run_root;
    auto* run_cmd = app.add_subcommand("run", "execute a full experiment config");
    run_cmd->add_option("--config", run_config, "experiment config JSON")->required();
    run_cmd->add_option("--out-root", run_root,
                        "output root (default $RESTPROJ_OUT_ROOT or ./runs)");

    // replicate-acceptance
    int ra_criterion = 0;
    auto* accept_cmd = app.add_subcommand("replicate-acceptance",
                                          "run the acceptance suite end to end");
    accept_cmd->add_option("--criterion", ra_criterion, "run a single criterion (1..10)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate_cmd)
            return cmd_generate(kind, n, count, seed, direction, coords, target_alpha, levels,
                                t0, offset, axes, points_per_axis, out);
        if (*verify_cmd) return cmd_verify_regularity(vr_cloud, vr_json, vr_threshold, vr_seed);
        if (*energy_cmd)
            return cmd_energy(en_cloud, en_epsilon, en_tcount, en_seed, en_alpha,
                              en_annuli_point, en_threads, en_out);
        if (*sweep_cmd)
            return cmd_sweep(sw_cloud, sw_epsilon, sw_tcount, sw_seed, sw_kmin, sw_kmax,
                             sw_bound, sw_a_emp, sw_max, sw_threads, sw_out);
        if (*moment_cmd)
            return cmd_moment(mo_cloud, mo_t, mo_delta, mo_epsilon, mo_scount, mo_cemp,
                              mo_alpha, mo_out);
        if (*lie_cmd) return cmd_lie_check(lc_nmin, lc_nmax, lc_samples, lc_seed, lc_out);
        if (*dims_cmd)
            return cmd_dims(dm_cloud, dm_tcount, dm_seed, dm_t0, dm_fit_lo, dm_fit_hi, dm_out);
        if (*plot_cmd) return cmd_plotdata(pd_reports, pd_out);
        if (*run_cmd) return cmd_run(run_config, run_root);
        if (*accept_cmd) {
            std::optional<int> only;
            if (ra_criterion >= 1 && ra_criterion <= 10) only = ra_criterion;
            return restproj::acceptance::run_acceptance(std::cout, only) ? 0 : 1;
        }
    } catch (const restproj::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
