#include <catch2/catch_amalgamated.hpp>

#include <restproj/experiment.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace restproj;
namespace fs = std::filesystem;

namespace {

json small_segment_config() {
    return json{{"seed", 77},
                {"generator", {{"kind", "uniform_segment"}, {"n", 4}, {"count", 256}}},
                {"family", "standard"},
                {"epsilon", 0.005},
                {"t_sample_count", 12},
                {"delta_ladder", {0.0625, 0.03125, 0.015625}},
                {"stages",
                 {{"verify_regularity", true},
                  {"energy", true},
                  {"sweep", true},
                  {"lie_check", true}}}};
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / ("restproj-test-" + std::to_string(::getpid()) +
                                            "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing round-trips and validates") {
    auto config = config_from_json(small_segment_config());
    CHECK(config.seed == 77);
    CHECK(config.t_sample_count == 12);
    CHECK(config.delta_ladder.size() == 3);
    CHECK(config.stage_lie);

    // Re-serialized config parses to the same canonical form.
    auto echo = to_json(config);
    auto config2 = config_from_json(echo);
    CHECK(to_json(config2) == echo);
}

TEST_CASE("config rejection lists every violated constraint") {
    json bad{{"epsilon", 2.0},
             {"t_sample_count", 0},
             {"bound_form", "sideways"},
             {"delta_ladder", {0.3}},
             {"stages", {{"sweep", true}}}};
    try {
        config_from_json(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.issues().size() >= 5);  // generator, epsilon, t count, form, ladder
    }
}

TEST_CASE("epsilon above alpha/100 is rejected before execution") {
    auto j = small_segment_config();
    j["epsilon"] = 0.02;  // alpha = 1 so the cap is 0.01
    auto config = config_from_json(j);
    TempDir tmp;
    CHECK_THROWS_AS(run_experiment(config, tmp.path), ConfigError);
    CHECK(fs::is_empty(tmp.path));  // nothing was written
}

TEST_CASE("ladder outside the cloud window is rejected") {
    auto j = small_segment_config();
    j["delta_ladder"] = {0.0009765625};  // below delta0 = 2^-8
    auto config = config_from_json(j);
    TempDir tmp;
    CHECK_THROWS_AS(run_experiment(config, tmp.path), ConfigError);
}

TEST_CASE("run pipeline writes artifacts and reproduces identical hashes") {
    auto config = config_from_json(small_segment_config());
    TempDir tmp;
    auto first = run_experiment(config, tmp.path);
    CHECK(first.ok);
    REQUIRE(first.stages.size() == 4);
    for (const auto& stage : first.stages) {
        CAPTURE(stage.name, stage.detail);
        CHECK(stage.ok);
    }
    for (const char* name : {"config.json", "cloud.txt", "regularity.json",
                             "energy_selection.json", "sweep.json", "sweep.csv", "summary.txt",
                             "manifest.json", "lie.txt"})
        CHECK(fs::exists(first.dir / name));

    // The segment never concentrates: the good column is all 1.
    std::ifstream csv(first.dir / "sweep.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "t_1,t_2,delta,bad_fraction,removed_fraction,good");
    int rows = 0;
    while (std::getline(csv, line)) {
        CHECK(line.substr(line.size() - 2) == ",1");
        ++rows;
    }
    CHECK(rows == 3 * 12);

    auto second = run_experiment(config, tmp.path);
    REQUIRE(second.inventory.size() == first.inventory.size());
    for (std::size_t i = 0; i < first.inventory.size(); ++i) {
        CHECK(first.inventory[i].path == second.inventory[i].path);
        CHECK(first.inventory[i].fnv1a64_hex == second.inventory[i].fnv1a64_hex);
    }
}

TEST_CASE("exceptional fraction column is zero for the segment") {
    auto j = small_segment_config();
    j["generator"]["count"] = 1024;
    j["delta_ladder"] = {0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125};
    j["t_sample_count"] = 24;
    j["stages"]["energy"] = false;
    j["stages"]["lie_check"] = false;
    auto config = config_from_json(j);
    TempDir tmp;
    auto result = run_experiment(config, tmp.path);
    CHECK(result.ok);
    auto sweeps = json::parse(detail::read_file(result.dir / "sweep.json"));
    REQUIRE(sweeps.at("sweeps").size() == 6);
    for (const auto& sweep : sweeps.at("sweeps")) {
        CHECK(sweep.at("exceptional_fraction").get<double>() == 0.0);
        CHECK(sweep.at("exceptional_fraction_proof").get<double>() == 0.0);
    }
}

TEST_CASE("plotdata extracts the documented series") {
    auto config = config_from_json(small_segment_config());
    TempDir tmp;
    auto result = run_experiment(config, tmp.path);

    auto series = plotdata({result.dir / "sweep.json"});
    REQUIRE(series.size() == 1);
    CHECK(series[0].name == "sweep_scaling");
    std::istringstream csv(series[0].csv);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "log2_delta,exceptional_fraction,log2_exceptional_fraction_reg");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows == 3);  // one per ladder rung

    // dims report: two series (slopes and the representative counts).
    const auto cloud = load_cloud((result.dir / "cloud.txt").string());
    const auto fam = ProjectionFamily::standard(2);
    const auto ts = draw_annulus_samples(2, 8, 5, 1);
    auto dims = dims_experiment(cloud, fam, ts, ParamVector(Eigen::Vector2d(1.0, 0.5)));
    detail::write_file(tmp.path / "dims.json", to_json(dims).dump(2));
    auto dims_series = plotdata({tmp.path / "dims.json"});
    REQUIRE(dims_series.size() == 2);
    CHECK(dims_series[0].name == "dims_dims");
    CHECK(dims_series[0].csv.rfind("t_dist,box_dimension\n", 0) == 0);
    CHECK(dims_series[1].name == "dims_counts");

    // Empty input: empty output.
    CHECK(plotdata({}).empty());

    // Malformed and unknown-kind files raise with the path in the message.
    detail::write_file(tmp.path / "broken.json", "{not json");
    CHECK_THROWS_WITH(plotdata({tmp.path / "broken.json"}),
                      Catch::Matchers::ContainsSubstring("broken.json"));
    detail::write_file(tmp.path / "odd.json", R"({"kind":"mystery"})");
    CHECK_THROWS_WITH(plotdata({tmp.path / "odd.json"}),
                      Catch::Matchers::ContainsSubstring("mystery"));

    // Recognized kinds without a plot mapping are skipped silently.
    CHECK(plotdata({result.dir / "regularity.json"}).empty());
}
