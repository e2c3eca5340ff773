#include <catch2/catch_amalgamated.hpp>

#include <restproj/geometry.hpp>
#include <restproj/numeric.hpp>
#include <restproj/random.hpp>

using namespace restproj;

namespace {

ProjectionFamily random_family(Rng& rng, int m) {
    Eigen::MatrixXd L(m, m);
    do {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) L(i, j) = rng.uniform(-1.0, 1.0);
    } while (std::fabs(L.determinant()) < 0.05);
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd Q = A.transpose() * A + 0.1 * Eigen::MatrixXd::Identity(m, m);
    return ProjectionFamily(L, Q);
}

Point random_point(Rng& rng, int n, double radius = 1.0) {
    return Point::from_vector(rng.in_ball(n, radius));
}

}  // namespace

TEST_CASE("project matches hand-evaluated examples") {
    // t = 0 forces pi_0(X) = r1.
    auto fam = ProjectionFamily::standard(2);
    Point X(0.3, Eigen::Vector2d(0.1, -0.4), 0.9);
    CHECK(project(fam, ParamVector(Eigen::Vector2d::Zero()), X) == 0.3);

    // n=4, L=id, q=q_st, t=(1,1), X=(2,(3,4),5) -> 2 + 7 + 5 = 14.
    Point X4(2.0, Eigen::Vector2d(3.0, 4.0), 5.0);
    CHECK(project(fam, ParamVector(Eigen::Vector2d(1.0, 1.0)), X4) == Catch::Approx(14.0).epsilon(1e-14));

    // n=3, L=id, q(t)=t^2, t=2, X=(1,3,1) -> 1 + 6 + 4 = 11.
    ProjectionFamily fam3(Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1));
    Point X3(1.0, Eigen::VectorXd::Constant(1, 3.0), 1.0);
    CHECK(project(fam3, ParamVector(Eigen::VectorXd::Constant(1, 2.0)), X3) == Catch::Approx(11.0).epsilon(1e-14));
}

TEST_CASE("project rejects dimension mismatch") {
    auto fam = ProjectionFamily::standard(2);
    Point bad(0.0, Eigen::Vector3d(0.0, 0.0, 0.0), 0.0);
    CHECK_THROWS_AS(project(fam, ParamVector(Eigen::Vector2d(1.0, 0.0)), bad),
                    std::invalid_argument);
    CHECK_THROWS_AS(factor_map(fam, ParamVector(Eigen::Vector3d(1.0, 0.0, 0.0)),
                               Point(0.0, Eigen::Vector2d(0.0, 0.0), 0.0)),
                    std::invalid_argument);
}

TEST_CASE("factor_map triple and moment_expand") {
    auto fam = ProjectionFamily::standard(2);
    Point X(2.0, Eigen::Vector2d(3.0, 4.0), 5.0);

    Eigen::Vector3d y0 = factor_map(fam, ParamVector(Eigen::Vector2d::Zero()), X);
    CHECK(y0[0] == 2.0);
    CHECK(y0[1] == 0.0);
    CHECK(y0[2] == 0.0);

    Eigen::Vector3d y = factor_map(fam, ParamVector(Eigen::Vector2d(1.0, 1.0)), X);
    CHECK(y[0] == Catch::Approx(2.0));
    CHECK(y[1] == Catch::Approx(7.0));
    CHECK(y[2] == Catch::Approx(5.0));

    CHECK(moment_expand({0.0}) == Eigen::Vector3d(1.0, 0.0, 0.0));
    CHECK(moment_expand({1.0}) == Eigen::Vector3d(1.0, 1.0, 1.0));
    CHECK(moment_expand({2.0}) == Eigen::Vector3d(1.0, 2.0, 4.0));
}

TEST_CASE("decomposition identity pi_{st}(X) = (1,s,s^2).f_t(X)") {
    Rng rng(137);
    for (int trial = 0; trial < 500; ++trial) {
        const int m = 1 + static_cast<int>(rng.below(5));
        auto fam = random_family(rng, m);
        ParamVector t(rng.in_ball(m, 2.0));
        Point X = random_point(rng, m + 2);
        const Eigen::Vector3d y = factor_map(fam, t, X);
        for (double s : {0.0, 0.5, 1.0, 1.7}) {
            const double via_moment = moment_project({s}, y);
            const double direct = project(fam, ParamVector((s * t.t).eval()), X);
            CAPTURE(trial, m, s);
            CHECK(close_mixed(direct, via_moment, 1e-12));
        }
    }
}

TEST_CASE("project is linear in X and depends on differences") {
    Rng rng(991);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + static_cast<int>(rng.below(4));
        auto fam = random_family(rng, m);
        ParamVector t(rng.in_annulus(m));
        Point X = random_point(rng, m + 2);
        Point Y = random_point(rng, m + 2);
        const double a = rng.uniform(-2.0, 2.0);

        Point aXpY(a * X.r1 + Y.r1, a * X.w + Y.w, a * X.r2 + Y.r2);
        CHECK(close_mixed(project(fam, t, aXpY),
                          a * project(fam, t, X) + project(fam, t, Y), 1e-12));

        // pi_t(X) - pi_t(Y) is a function of X - Y only.
        Point shift = random_point(rng, m + 2);
        Point Xs(X.r1 + shift.r1, X.w + shift.w, X.r2 + shift.r2);
        Point Ys(Y.r1 + shift.r1, Y.w + shift.w, Y.r2 + shift.r2);
        CHECK(close_mixed(project(fam, t, X) - project(fam, t, Y),
                          project(fam, t, Xs) - project(fam, t, Ys), 1e-12));
    }
}

TEST_CASE("factor_map scaling in t") {
    Rng rng(555);
    auto fam = random_family(rng, 3);
    Point X = random_point(rng, 5);
    ParamVector t(rng.in_annulus(3));
    const Eigen::Vector3d y = factor_map(fam, t, X);
    for (double s : {0.5, 2.0, 3.0}) {
        const Eigen::Vector3d ys = factor_map(fam, ParamVector((s * t.t).eval()), X);
        CHECK(ys[0] == y[0]);                                   // independent of t
        CHECK(close_mixed(ys[1], s * y[1], 1e-12));             // linear
        CHECK(close_mixed(ys[2], s * s * y[2], 1e-12));         // quadratic
    }
}

TEST_CASE("validate_family reports invariants and constants") {
    auto ok = validate_family(ProjectionFamily::standard(3));
    CHECK(ok.valid());
    CHECK(ok.q_min == Catch::Approx(0.5));
    CHECK(ok.l_op_norm == Catch::Approx(1.0));

    auto singular = validate_family(
        ProjectionFamily(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)));
    CHECK_FALSE(singular.valid());
    CHECK_FALSE(singular.l_invertible);
    CHECK(singular.q_positive_definite);

    Eigen::MatrixXd Qneg = Eigen::MatrixXd::Identity(2, 2);
    Qneg(1, 1) = -0.25;
    auto indefinite = validate_family(ProjectionFamily(Eigen::MatrixXd::Identity(2, 2), Qneg));
    CHECK_FALSE(indefinite.valid());
    CHECK_FALSE(indefinite.q_positive_definite);
    CHECK(indefinite.q_min == Catch::Approx(-0.25));
}

TEST_CASE("annulus membership uses closed inequalities") {
    CHECK(ParamVector(Eigen::Vector2d(1.0, 0.0)).in_annulus());
    CHECK(ParamVector(Eigen::Vector2d(2.0, 0.0)).in_annulus());
    CHECK_FALSE(ParamVector(Eigen::Vector2d(0.99, 0.0)).in_annulus());
    CHECK_FALSE(ParamVector(Eigen::Vector2d(2.001, 0.0)).in_annulus());
}

TEST_CASE("annulus_volume closed form") {
    CHECK(annulus_volume(1) == Catch::Approx(2.0));           // [-2,-1] u [1,2]
    CHECK(annulus_volume(2) == Catch::Approx(3.0 * std::numbers::pi));
    // Monte Carlo cross-check in R^3: 4/3 pi (8 - 1).
    CHECK(annulus_volume(3) == Catch::Approx(4.0 / 3.0 * std::numbers::pi * 7.0));
}

TEST_CASE("annulus sampling stays in B and matches volume fraction") {
    Rng rng(2024);
    const int m = 2;
    int hits = 0;
    const int total = 20000;
    for (int i = 0; i < total; ++i) {
        Eigen::VectorXd t = rng.in_annulus(m);
        ParamVector p(t);
        REQUIRE(p.in_annulus());
        if (t[0] > 0) ++hits;  // symmetry sanity
    }
    CHECK(std::fabs(hits / static_cast<double>(total) - 0.5) < 0.02);
}
