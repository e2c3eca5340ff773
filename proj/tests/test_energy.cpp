#include <catch2/catch_amalgamated.hpp>

#include <restproj/energy.hpp>
#include <restproj/generators.hpp>
#include <restproj/random.hpp>

#include <sstream>

using namespace restproj;

namespace {

WeightedPoints random_measure(Rng& rng, int dim, int atoms) {
    Eigen::MatrixXd pts(dim, atoms);
    for (int j = 0; j < atoms; ++j) pts.col(j) = rng.in_ball(dim, 0.5);
    Eigen::VectorXd w(atoms);
    for (int j = 0; j < atoms; ++j) w[j] = rng.uniform(0.01, 1.0);
    w /= w.sum();
    return WeightedPoints(std::move(pts), std::move(w));
}

std::vector<ParamVector> annulus_samples(Rng& rng, int m, int count) {
    std::vector<ParamVector> ts;
    ts.reserve(count);
    for (int i = 0; i < count; ++i) ts.emplace_back(rng.in_annulus(m));
    return ts;
}

PointCloud segment_cloud(int n, int count) {
    UniformSegmentSpec spec;
    spec.n = n;
    spec.count = count;
    return generate(spec, 0);
}

}  // namespace

TEST_CASE("truncated_norm floors at delta0") {
    Eigen::Vector3d x(0.1, 0.2, 0.3);
    CHECK(truncated_norm(x, x, 0.25) == 0.25);
    Eigen::Vector3d y = x + Eigen::Vector3d(1.0, 0.0, 0.0);
    CHECK(truncated_norm(x, y, 0.25) == 1.0);
    Eigen::Vector3d z = x + Eigen::Vector3d(0.1, 0.0, 0.0);
    CHECK(truncated_norm(x, z, 0.25) == 0.25);
    CHECK_THROWS_AS(truncated_norm(x, Eigen::Vector2d(0.0, 0.0), 0.25),
                    std::invalid_argument);
}

TEST_CASE("TruncatedEnergyParams validates ranges") {
    CHECK_THROWS_AS(TruncatedEnergyParams(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(TruncatedEnergyParams(1.2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(TruncatedEnergyParams(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TruncatedEnergyParams(0.5, 2.0), std::invalid_argument);
}

TEST_CASE("truncated_energy hand examples") {
    // Single atom at X: the self-distance floors at delta0 = 0.5, alpha = 1.
    Eigen::MatrixXd one = Eigen::MatrixXd::Zero(3, 1);
    auto rho1 = WeightedPoints::uniform(one);
    CHECK(truncated_energy(rho1, Eigen::Vector3d::Zero(), {1.0, 0.5}) == 2.0);

    // Two atoms at distance 1, evaluated at one of them: 1/2*2 + 1/2*1.
    Eigen::MatrixXd two = Eigen::MatrixXd::Zero(3, 2);
    two(0, 1) = 1.0;
    auto rho2 = WeightedPoints::uniform(two);
    CHECK(truncated_energy(rho2, two.col(0), {1.0, 0.5}) == 1.5);
}

TEST_CASE("truncated_energy >= 1 on diameter-1 supports") {
    Rng rng(808);
    for (int trial = 0; trial < 50; ++trial) {
        auto rho = random_measure(rng, 3, 2 + static_cast<int>(rng.below(40)));
        Eigen::VectorXd x = rng.in_ball(3, 0.5);
        TruncatedEnergyParams params(rng.uniform(0.1, 1.0),
                                     std::ldexp(1.0, -1 - static_cast<int>(rng.below(8))));
        CHECK(truncated_energy(rho, x, params) >= 1.0 - 1e-12);
    }
}

TEST_CASE("truncated_energy equals 1 when delta0 = 1") {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(3, 4);
    pts(0, 1) = 0.5;
    pts(1, 2) = -0.5;
    pts(2, 3) = 0.25;
    auto rho = WeightedPoints::uniform(pts);
    CHECK(truncated_energy(rho, Eigen::Vector3d::Zero(), {0.7, 1.0}) == 1.0);
}

TEST_CASE("truncated_energy is monotone in delta0 and in distance") {
    Rng rng(505);
    for (int trial = 0; trial < 50; ++trial) {
        auto rho = random_measure(rng, 3, 16);
        Eigen::VectorXd x = rng.in_ball(3, 0.5);
        const double alpha = rng.uniform(0.2, 1.0);
        const double coarse = truncated_energy(rho, x, {alpha, 0.25});
        const double fine = truncated_energy(rho, x, {alpha, 0.125});
        CHECK(coarse <= fine + 1e-12);
    }
    // Moving an atom farther from X can only lower the energy.
    Eigen::MatrixXd near_pts = Eigen::MatrixXd::Zero(3, 2);
    near_pts(0, 1) = 0.3;
    Eigen::MatrixXd far_pts = near_pts;
    far_pts(0, 1) = 0.9;
    TruncatedEnergyParams params(0.8, 0.125);
    CHECK(truncated_energy(WeightedPoints::uniform(far_pts), Eigen::Vector3d::Zero(), params) <
          truncated_energy(WeightedPoints::uniform(near_pts), Eigen::Vector3d::Zero(), params));
}

TEST_CASE("ball_mass_bound_check hand examples") {
    Eigen::MatrixXd two = Eigen::MatrixXd::Zero(3, 2);
    two(0, 1) = 1.0;
    auto rho = WeightedPoints::uniform(two);
    auto check = ball_mass_bound_check(rho, two.col(0), {1.0, 0.5}, 1.5);
    REQUIRE(check.applicable);
    CHECK(check.passes);

    // Single atom, equality case R = delta0^{-alpha}.
    Eigen::MatrixXd one = Eigen::MatrixXd::Zero(3, 1);
    auto atom = WeightedPoints::uniform(one);
    const double alpha = 0.6, delta0 = 0.125;
    auto equality = ball_mass_bound_check(atom, one.col(0), {alpha, delta0},
                                          std::pow(delta0, -alpha));
    REQUIRE(equality.applicable);
    CHECK(equality.passes);

    // Hypothesis violated: R below the actual energy.
    auto rejected = ball_mass_bound_check(rho, two.col(0), {1.0, 0.5}, 1.0);
    CHECK_FALSE(rejected.applicable);
}

TEST_CASE("ball mass bound holds on randomized instances") {
    Rng rng(161803);
    for (int trial = 0; trial < 300; ++trial) {
        auto rho = random_measure(rng, 2 + static_cast<int>(rng.below(3)),
                                  2 + static_cast<int>(rng.below(60)));
        Eigen::VectorXd x = rng.in_ball(static_cast<int>(rho.atoms.rows()), 0.5);
        TruncatedEnergyParams params(rng.uniform(0.1, 1.0),
                                     std::ldexp(1.0, -1 - static_cast<int>(rng.below(9))));
        const double energy = truncated_energy(rho, x, params);
        auto check = ball_mass_bound_check(rho, x, params, energy);
        REQUIRE(check.applicable);
        CHECK(check.passes);
    }
}

TEST_CASE("annuli_profile partitions the cloud") {
    // Singleton: all mass in the core band k0, weighted value 2^{k0 alpha}.
    Eigen::MatrixXd one = Eigen::MatrixXd::Zero(3, 1);
    PointCloud singleton(one, 0.0625, 0.5, 1.0);
    auto profile = annuli_profile(singleton, 0, 0.5);
    REQUIRE(profile.per_k.size() == 5);
    CHECK(profile.per_k.back().count == 1);
    CHECK(profile.per_k.back().weighted == Catch::Approx(std::exp2(4 * 0.5)));
    for (std::size_t k = 0; k + 1 < profile.per_k.size(); ++k)
        CHECK(profile.per_k[k].count == 0);

    // Uniform grid, alpha = 1: every weighted value stays below 4.
    auto grid = segment_cloud(3, 256);
    for (int index : {0, 17, 128, 255}) {
        auto bands = annuli_profile(grid, index, 1.0);
        int total = 0;
        for (const auto& band : bands.per_k) {
            total += band.count;
            CHECK(band.weighted <= 4.0);
        }
        CHECK(total == grid.size());  // exact partition
    }
}

TEST_CASE("annuli masses sum to one on random clouds") {
    Rng rng(42424);
    Eigen::MatrixXd pts(4, 200);
    for (int j = 0; j < 200; ++j) pts.col(j) = rng.in_ball(4, 0.5);
    PointCloud cloud(std::move(pts), 0.0078125, 0.9, 8.0);
    for (int index : {0, 3, 77, 199}) {
        auto profile = annuli_profile(cloud, index, 0.9);
        int total = 0;
        double mass = 0.0;
        for (const auto& band : profile.per_k) {
            total += band.count;
            mass += band.mass;
        }
        CHECK(total == cloud.size());
        CHECK(mass == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("per-t mean energy is constant when points differ only in r1") {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(4, 2);
    pts(0, 0) = -0.25;
    pts(0, 1) = 0.25;
    PointCloud cloud(std::move(pts), 0.125, 1.0, 4.0);
    auto fam = ProjectionFamily::standard(2);
    Rng rng(1);
    auto ts = annulus_samples(rng, 2, 12);
    auto report = average_projected_energy(cloud, fam, {1.0, 0.125}, ts);
    for (const auto& sample : report.per_t)
        CHECK(sample.mean_energy == report.per_t.front().mean_energy);
    CHECK(report.std_error == 0.0);
}

TEST_CASE("average_projected_energy validates input") {
    auto cloud = segment_cloud(4, 64);
    auto fam = ProjectionFamily::standard(2);
    CHECK_THROWS_AS(average_projected_energy(cloud, fam, {1.0, cloud.delta0()}, {}),
                    std::invalid_argument);
    std::vector<ParamVector> outside{ParamVector(Eigen::Vector2d(0.1, 0.1))};
    CHECK_THROWS_AS(average_projected_energy(cloud, fam, {1.0, cloud.delta0()}, outside),
                    std::invalid_argument);
}

TEST_CASE("segment energy grows logarithmically with the scale floor") {
    auto fam = ProjectionFamily::standard(2);
    Rng rng(7);
    auto ts = annulus_samples(rng, 2, 8);
    double previous = 0.0;
    double kappa = 0.0;
    for (int k0 : {8, 9, 10}) {
        auto cloud = segment_cloud(4, 1 << k0);
        REQUIRE(cloud.delta0() == std::ldexp(1.0, -k0));
        auto report = average_projected_energy(cloud, fam, {1.0, cloud.delta0()}, ts);
        kappa = report.mc_integral / k0;
        if (previous > 0.0) {
            const double growth = report.mc_integral - previous;
            CHECK(growth > 0.0);
            CHECK(growth <= kappa);  // one dyadic step adds at most kappa
        }
        previous = report.mc_integral;
    }
    CHECK(kappa > 0.0);
}

TEST_CASE("results are independent of the thread count") {
    auto cloud = segment_cloud(4, 256);
    auto fam = ProjectionFamily::standard(2);
    Rng rng(99);
    auto ts = annulus_samples(rng, 2, 6);
    auto serial = average_projected_energy(cloud, fam, {1.0, cloud.delta0()}, ts, 1);
    auto threaded = average_projected_energy(cloud, fam, {1.0, cloud.delta0()}, ts, 4);
    REQUIRE(serial.per_t.size() == threaded.per_t.size());
    for (std::size_t i = 0; i < serial.per_t.size(); ++i)
        CHECK(serial.per_t[i].mean_energy == threaded.per_t[i].mean_energy);
    CHECK(serial.mc_integral == threaded.mc_integral);
}

TEST_CASE("select_good_sets keeps everything when energies are flat") {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(4, 2);
    pts(0, 0) = -0.25;
    pts(0, 1) = 0.25;
    PointCloud cloud(std::move(pts), 0.125, 1.0, 4.0);
    auto fam = ProjectionFamily::standard(2);
    Rng rng(3);
    auto ts = annulus_samples(rng, 2, 10);
    auto sets = select_good_sets(cloud, fam, {1.0, 0.125}, 0.05, ts);
    CHECK(sets.rejected_t_fraction == 0.0);
    REQUIRE(sets.good_profiles.size() == ts.size());
    for (const auto& profile : sets.good_profiles)
        CHECK(profile.surviving.size() == 2);  // F_t = F
}

TEST_CASE("select_good_sets obeys the Markov fractions") {
    Rng rng(246);
    Eigen::MatrixXd pts(4, 128);
    for (int j = 0; j < 128; ++j) pts.col(j) = rng.in_ball(4, 0.5);
    PointCloud cloud(std::move(pts), 0.0078125, 1.0, 32.0);
    auto fam = ProjectionFamily::standard(2);
    auto ts = annulus_samples(rng, 2, 40);
    const double eps = 0.04;
    auto sets = select_good_sets(cloud, fam, {0.9, cloud.delta0()}, eps, ts);
    // Markov with the measured grand mean: the t-cut loses at most
    // delta0^{2 eps}; within a kept t the X-cut loses at most delta0^{eps}.
    const double t_budget = std::pow(cloud.delta0(), 2.0 * eps);
    CHECK(sets.rejected_t_fraction <= t_budget + 1e-12);
    CHECK(sets.rejected_t_fraction <= std::pow(cloud.delta0(), eps));
    const double x_budget = std::pow(cloud.delta0(), eps);
    CHECK(sets.max_rejected_x_fraction <= x_budget + 1e-12);
}

TEST_CASE("surviving pairs chain into the ball mass bound") {
    Rng rng(135);
    Eigen::MatrixXd pts(4, 96);
    for (int j = 0; j < 96; ++j) pts.col(j) = rng.in_ball(4, 0.5);
    PointCloud cloud(std::move(pts), 0.015625, 1.0, 32.0);
    auto fam = ProjectionFamily::standard(2);
    auto ts = annulus_samples(rng, 2, 8);
    TruncatedEnergyParams params(0.8, cloud.delta0());
    auto sets = select_good_sets(cloud, fam, params, 0.05, ts);

    std::size_t good_index = 0;
    for (std::size_t i = 0; i < sets.per_t.size(); ++i) {
        if (!sets.per_t[i].good) continue;
        const auto& profile = sets.good_profiles[good_index++];
        const auto image = factor_image(cloud, fam, sets.per_t[i].t);
        auto mu_t = WeightedPoints::uniform(image);
        for (int j : profile.surviving) {
            auto check =
                ball_mass_bound_check(mu_t, image.col(j), params, sets.x_threshold);
            REQUIRE(check.applicable);
            CHECK(check.passes);
        }
    }
}

TEST_CASE("surviving fractions are monotone in epsilon") {
    Rng rng(864);
    Eigen::MatrixXd pts(3, 80);
    for (int j = 0; j < 80; ++j) pts.col(j) = rng.in_ball(3, 0.5);
    PointCloud cloud(std::move(pts), 0.03125, 1.0, 32.0);
    auto fam = ProjectionFamily::standard(1);
    auto ts = annulus_samples(rng, 1, 16);
    double last_t = -1.0, last_x = -1.0;
    for (double eps : {0.02, 0.05, 0.1, 0.3}) {
        auto sets = select_good_sets(cloud, fam, {0.7, cloud.delta0()}, eps, ts);
        const double kept_t = 1.0 - sets.rejected_t_fraction;
        const double kept_x = 1.0 - sets.max_rejected_x_fraction;
        CHECK(kept_t >= last_t);
        CHECK(kept_x >= last_x - 1e-12);
        last_t = kept_t;
        last_x = kept_x;
    }
}

TEST_CASE("energy and annuli CSV exports") {
    EnergyProfile profile;
    profile.per_point = {{0, 1.5}, {1, 2.25}};
    profile.threshold_used = 3.0;
    std::ostringstream energy_csv;
    write_energy_profile_csv(energy_csv, profile);
    CHECK(energy_csv.str() == "index,energy\n0,1.5\n1,2.25\n");

    AnnuliProfile annuli;
    annuli.per_k = {{0, 3, 0.75, 0.75}, {1, 1, 0.25, 0.5}};
    std::ostringstream annuli_csv;
    write_annuli_csv(annuli_csv, annuli);
    CHECK(annuli_csv.str() == "k,mass,weighted\n0,0.75,0.75\n1,0.25,0.5\n");
}
