#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hynoma/scenario.hpp"
#include "oracles.hpp"

using namespace hynoma;

TEST_CASE("default protocol scenario has the documented shape") {
    GenConfig cfg; // U=4, L=3, K=10 dB, exponents (3,2), noise 1e-9
    cfg.rng_seed = 7;
    const Scenario s = generate_scenario(cfg);
    CHECK(s.num_users == 4);
    CHECK(s.error_dims == 3);
    CHECK(s.noise_var == 1e-9);
    CHECK(s.ball_radius == 0.025);
    for (int u = 1; u < 4; ++u) CHECK(s.bs_gain(u - 1) > s.bs_gain(u)); // sorted
    for (int u = 0; u < 4; ++u) {
        CHECK(s.poly[u].dim() == 3);
        CHECK(s.poly[u].is_diagonal());
        CHECK((s.poly[u].u - 5.0 * s.poly[u].l).norm() == doctest::Approx(0.0));
        CHECK(s.alpha[u].minCoeff() > 0.0);
    }
    for (int j = 0; j < 4; ++j)
        for (int t = 0; t <= j; ++t) {
            CHECK(s.sic_residual(j, t) >= 0.0);
            CHECK(s.sic_residual(j, t) <= 0.1);
        }
    for (int u = 1; u < 4; ++u)
        for (int t = 0; t < u; ++t) CHECK(s.uu_gain(u, t) > 0.0);
}

TEST_CASE("single user has no inter-user data") {
    GenConfig cfg;
    cfg.num_users = 1;
    const Scenario s = generate_scenario(cfg);
    CHECK(s.num_users == 1);
    CHECK(s.kappa[0].empty());
    const auto rep = validate_scenario(s);
    CHECK(rep.links.size() == 1);
}

TEST_CASE("fixed seed reproduces the scenario bit for bit") {
    GenConfig cfg;
    cfg.rng_seed = 12345;
    const std::string a = scenario_to_json(generate_scenario(cfg));
    const std::string b = scenario_to_json(generate_scenario(cfg));
    CHECK(a == b);
}

TEST_CASE("invalid configurations are rejected with field-level errors") {
    GenConfig cfg;
    cfg.num_users = 0;
    CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
    cfg = GenConfig{};
    cfg.noise_var = 0.0;
    CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
    cfg = GenConfig{};
    cfg.l_range = {0.0, 1.0};
    CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
}

TEST_CASE("zero-uncertainty twin reports nominal worst cases") {
    GenConfig cfg;
    cfg.rng_seed = 3;
    const Scenario s = generate_scenario(cfg).without_uncertainty();
    const auto rep = validate_scenario(s);
    for (const auto& d : rep.links)
        CHECK(d.worst_product == doctest::Approx(d.nominal_product).epsilon(1e-12));
    CHECK(rep.all_feasible);
}

TEST_CASE("zero shift vector pins the BS-gain worst case at nominal") {
    GenConfig cfg;
    cfg.rng_seed = 5;
    Scenario s = generate_scenario(cfg);
    s.alpha[1].setZero();
    CHECK(s.worst_bs_gain(1, Sense::Min) == doctest::Approx(s.bs_gain(1)).epsilon(1e-12));
}

TEST_CASE("worst-case link gains match the brute-force oracle") {
    Rng check_rng(99);
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        GenConfig cfg;
        cfg.rng_seed = seed;
        const Scenario s = generate_scenario(cfg);
        for (int u = 0; u < s.num_users; ++u)
            for (int t = 0; t <= u; ++t) {
                const double lib = s.worst_link_gain(u, t, Sense::Min);
                const double ref = test::brute_bilinear(
                    s.bs_gain(u), s.alpha[u], s.poly[u], s.uu_gain_at(u, t), s.kappa_at(u, t),
                    s.ball_radius, Sense::Min, check_rng.substream(seed * 16 + u * 4 + t));
                CHECK(lib == doctest::Approx(ref).epsilon(1e-9));
            }
    }
}

TEST_CASE("dense mode produces full Gram matrices") {
    GenConfig cfg;
    cfg.uncertainty_mode = UncertaintyMode::Dense;
    cfg.rng_seed = 17;
    const Scenario s = generate_scenario(cfg);
    bool any_offdiag = false;
    for (const auto& p : s.poly)
        if (!p.is_diagonal()) any_offdiag = true;
    CHECK(any_offdiag);
    const auto rep = validate_scenario(s);
    CHECK(rep.all_feasible); // generation retries until the sets are usable
}

TEST_CASE("sorting invariant holds for many seeds") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        GenConfig cfg;
        cfg.rng_seed = seed;
        const Scenario s = generate_scenario(cfg);
        for (int u = 1; u < s.num_users; ++u) CHECK(s.bs_gain(u - 1) > s.bs_gain(u));
    }
}

TEST_CASE("scaling the geometry reduces gains in expectation") {
    const double factor = 1.5;
    const int n = 1000;
    double mean_a = 0.0, mean_b = 0.0, sq_a = 0.0, sq_b = 0.0;
    for (int k = 0; k < n; ++k) {
        GenConfig base;
        base.num_users = 2;
        base.rng_seed = 1000 + k;
        GenConfig far = base;
        far.center_offset *= factor;
        far.square_side *= factor;
        const double ga = generate_scenario(base).bs_gain.mean();
        const double gb = generate_scenario(far).bs_gain.mean();
        mean_a += ga;
        mean_b += gb;
        sq_a += ga * ga;
        sq_b += gb * gb;
    }
    mean_a /= n;
    mean_b /= n;
    const double var = (sq_a / n - mean_a * mean_a) + (sq_b / n - mean_b * mean_b);
    const double sigma = std::sqrt(var / n);
    CHECK(mean_a - mean_b > 3.0 * sigma);
}

TEST_CASE("scenario JSON round-trips exactly") {
    GenConfig cfg;
    cfg.rng_seed = 77;
    const Scenario s = generate_scenario(cfg);
    const std::string j1 = scenario_to_json(s);
    const Scenario back = scenario_from_json(j1);
    CHECK(scenario_to_json(back) == j1);
    CHECK(j1.find("\"format_version\"") != std::string::npos);
}

TEST_CASE("genconfig JSON round-trip and validation") {
    GenConfig cfg;
    cfg.num_users = 3;
    cfg.uncertainty_mode = UncertaintyMode::Dense;
    const GenConfig back = genconfig_from_json(genconfig_to_json(cfg));
    CHECK(back.num_users == 3);
    CHECK(back.uncertainty_mode == UncertaintyMode::Dense);
    CHECK_THROWS_AS(genconfig_from_json("{\"num_users\": 0}"), std::invalid_argument);
    CHECK_THROWS_AS(genconfig_from_json("not json"), std::invalid_argument);
}
