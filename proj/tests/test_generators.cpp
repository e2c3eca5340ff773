#include <catch2/catch_amalgamated.hpp>

#include <restproj/generators.hpp>
#include <restproj/pointcloud.hpp>

using namespace restproj;

TEST_CASE("uniform_segment claims alpha = 1 and is regular") {
    UniformSegmentSpec spec;
    spec.n = 4;
    spec.count = 1024;
    auto cloud = generate(spec, 0);
    CHECK(cloud.claimed_alpha() == 1.0);
    CHECK(cloud.claimed_c() == 4.0);
    CHECK(cloud.size() == 1024);
    CHECK(cloud.delta0() == std::ldexp(1.0, -10));
    auto report = verify_regularity(cloud);
    CHECK(report.worst_ratio <= 4.0);
}

TEST_CASE("uniform_segment along a custom direction") {
    UniformSegmentSpec spec;
    spec.n = 4;
    spec.count = 256;
    spec.direction = Eigen::Vector4d(1.0, 1.0, 1.0, 1.0);
    auto cloud = generate(spec, 0);
    // Consecutive points are delta0 apart along the normalized direction.
    const Eigen::VectorXd step = cloud.points().col(1) - cloud.points().col(0);
    CHECK(step.norm() == Catch::Approx(cloud.delta0()));
    CHECK(cloud.bbox_diag() <= 1.0);
}

TEST_CASE("cantor_product claims the similarity dimension") {
    CantorProductSpec spec;
    spec.n = 4;
    spec.coords = {CantorCoordinate{1, 2, 1.0 / 3.0, 8}};
    auto cloud = generate(spec, 0);
    CHECK(cloud.size() == 256);
    CHECK(cloud.claimed_alpha() == Catch::Approx(0.6309297535714574).margin(1e-6));
}

TEST_CASE("cantor_product across two coordinates adds dimensions (capped at 1)") {
    CantorProductSpec spec;
    spec.n = 4;
    spec.coords = {CantorCoordinate{1, 2, 1.0 / 3.0, 5},
                   CantorCoordinate{2, 2, 1.0 / 3.0, 5}};
    auto cloud = generate(spec, 0);
    CHECK(cloud.size() == 1024);
    CHECK(cloud.claimed_alpha() == 1.0);  // 2 * log2/log3 capped
    CHECK(cloud.bbox_diag() <= 1.0 + 1e-12);
    auto report = verify_regularity(cloud);
    CHECK(report.passes_claimed_c);
}

TEST_CASE("cantor_product parameter validation") {
    CantorProductSpec spec;
    spec.n = 4;
    spec.coords = {CantorCoordinate{1, 2, 0.6, 4}};  // 2 * 0.6 > 1
    CHECK_THROWS_AS(generate(spec, 0), std::invalid_argument);
    spec.coords = {CantorCoordinate{5, 2, 1.0 / 3.0, 4}};  // bad coordinate
    CHECK_THROWS_AS(generate(spec, 0), std::invalid_argument);
    spec.coords = {CantorCoordinate{1, 2, 1.0 / 3.0, 4},
                   CantorCoordinate{1, 2, 1.0 / 3.0, 4}};  // duplicate
    CHECK_THROWS_AS(generate(spec, 0), std::invalid_argument);
    spec.coords.clear();
    CHECK_THROWS_AS(generate(spec, 0), std::invalid_argument);
}

TEST_CASE("three-piece cantor hits N = 3^level with alpha near 0.63") {
    CantorProductSpec spec;
    spec.n = 4;
    spec.coords = {CantorCoordinate{1, 3, std::exp2(-2.5), 8}};
    auto cloud = generate(spec, 0);
    CHECK(cloud.size() == 6561);
    CHECK(cloud.claimed_alpha() == Catch::Approx(std::log(3.0) / (2.5 * std::log(2.0))));
    CHECK(cloud.delta0() == std::ldexp(1.0, -20));
    auto report = verify_regularity(cloud);
    CAPTURE(report.worst_ratio);
    CHECK(report.passes_claimed_c);
}

TEST_CASE("alpha_regular_random is deterministic per seed and roughly regular") {
    AlphaRegularRandomSpec spec;
    spec.n = 3;
    spec.target_alpha = 0.8;
    spec.levels = 12;
    auto a = generate(spec, 11);
    auto b = generate(spec, 11);
    auto c = generate(spec, 12);
    CHECK(a.points() == b.points());
    CHECK((a.size() != c.size() || a.points() != c.points()));
    auto report = verify_regularity(a);
    CAPTURE(a.size(), report.worst_ratio);
    CHECK(report.passes_claimed_c);
}

TEST_CASE("kernel_hyperplane points project exactly to the offset") {
    KernelHyperplaneSpec spec;
    spec.n = 4;
    spec.count = 200;
    spec.t0 = Eigen::Vector2d(1.2, 0.8);
    auto cloud = generate(spec, 5);
    auto fam = ProjectionFamily::standard(2);
    ParamVector t0(spec.t0);
    for (int j = 0; j < cloud.size(); ++j) {
        CHECK(project(fam, t0, cloud.point(j)) == 0.0);  // exact by construction
        CHECK(cloud.point(j).norm() <= 0.5 + 1e-12);
    }
}

TEST_CASE("kernel_hyperplane honors a nonzero offset") {
    KernelHyperplaneSpec spec;
    spec.n = 4;
    spec.count = 50;
    spec.t0 = Eigen::Vector2d(0.0, 1.5);
    spec.offset = 0.125;
    auto cloud = generate(spec, 5);
    auto fam = ProjectionFamily::standard(2);
    ParamVector t0(spec.t0);
    for (int j = 0; j < cloud.size(); ++j)
        CHECK(project(fam, t0, cloud.point(j)) == 0.125);
}

TEST_CASE("kernel_hyperplane rejects unreachable offsets") {
    KernelHyperplaneSpec spec;
    spec.n = 4;
    spec.count = 4;
    spec.t0 = Eigen::Vector2d(1.0, 0.0);
    spec.offset = 10.0;  // farther than any point in the unit ball can reach
    CHECK_THROWS_AS(generate(spec, 5), std::invalid_argument);
}

TEST_CASE("finite_grid spans the requested axes") {
    FiniteGridSpec spec;
    spec.n = 4;
    spec.axes = 2;
    spec.points_per_axis = 17;
    auto cloud = generate(spec, 0);
    CHECK(cloud.size() == 17 * 17);
    CHECK(cloud.claimed_alpha() == 1.0);
    CHECK(cloud.bbox_diag() <= 1.0 + 1e-12);
    auto report = verify_regularity(cloud);
    CHECK(report.passes_claimed_c);
}

TEST_CASE("generators are deterministic for fixed seeds") {
    KernelHyperplaneSpec spec;
    spec.n = 4;
    spec.count = 64;
    spec.t0 = Eigen::Vector2d(1.0, 1.0);
    auto a = generate(GeneratorSpec{spec}, 77);
    auto b = generate(GeneratorSpec{spec}, 77);
    CHECK(a.points() == b.points());
}
