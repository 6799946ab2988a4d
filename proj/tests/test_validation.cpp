#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "secbeam/algorithms.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/model.hpp"
#include "secbeam/validation.hpp"

using namespace secbeam;

namespace {

NetworkConfig oracle_cfg() {
    NetworkConfig cfg;
    cfg.K = 2;
    cfg.N_k = 2;
    cfg.N1_k = 1;
    cfg.M = 3;
    cfg.N_ev = 2;
    cfg.e_min = 1e-7;
    return cfg;
}

void require_all_pass(const std::vector<val::OracleReport>& reports) {
    for (const val::OracleReport& r : reports) {
        INFO(r.name << ": max violation " << r.max_violation << " tol " << r.tolerance
                    << " over " << r.samples << " samples");
        CHECK(r.pass);
        CHECK(r.samples > 0);
        CHECK(r.pass == (r.max_violation <= r.tolerance));
    }
}

} // namespace

TEST_CASE("tangency suite passes on random expansions") {
    NetworkConfig cfg = oracle_cfg();
    for (int e = 0; e < 20; ++e) {
        cfg.seed = 400 + static_cast<std::uint64_t>(e);
        const ChannelSet cs = generate_channels(cfg);
        Rng rng = Rng::stream(cfg.seed, 0xE0);
        const sca::Iterate it = val::random_expansion_iterate(cs, cfg, rng);
        require_all_pass(val::tangency_suite(it, cs, cfg));
    }
}

TEST_CASE("domination suite finds no violations inside validity regions") {
    NetworkConfig cfg = oracle_cfg();
    cfg.seed = 450;
    const ChannelSet cs = generate_channels(cfg);
    Rng rng = Rng::stream(cfg.seed, 0xE0);
    const sca::Iterate it = val::random_expansion_iterate(cs, cfg, rng);
    const auto reports = val::domination_suite(it, cs, cfg, 250, 99);
    require_all_pass(reports);
    CHECK(reports.size() == 8);
}

TEST_CASE("inner constraints imply the originals on sampled points") {
    NetworkConfig cfg = oracle_cfg();
    cfg.seed = 460;
    const ChannelSet cs = generate_channels(cfg);
    Rng rng = Rng::stream(cfg.seed, 0xE0);
    const sca::Iterate it = val::random_expansion_iterate(cs, cfg, rng);
    const auto reports = val::soundness_suite(it, cs, cfg, 250, 77);
    require_all_pass(reports);
    CHECK(reports.size() == 3);
    for (const auto& r : reports) CHECK(r.samples >= 250);
}

TEST_CASE("scalar inequality battery passes at full sample count") {
    const auto reports = val::scalar_battery(20240801, 10000, 1e-12);
    require_all_pass(reports);
    CHECK(reports.size() == 10);
    for (const auto& r : reports) CHECK(r.samples == 10000);
}

TEST_CASE("verification driver merges reports and passes") {
    NetworkConfig cfg = oracle_cfg();
    val::VerifySettings s;
    s.expansions = 10;
    s.domination_expansions = 3;
    s.domination_samples = 40;
    s.soundness_points = 90;
    s.battery_samples = 2000;
    const auto reports = val::run_verification(cfg, s);
    require_all_pass(reports);
    CHECK(val::all_pass(reports));

    const nlohmann::json j = val::oracle_reports_to_json(reports);
    CHECK(j.at("all_pass").get<bool>());
    CHECK(j.at("checks").size() == reports.size());
}

TEST_CASE("grid oracle sweeps the matched-filter grid deterministically") {
    NetworkConfig cfg;
    cfg.K = 1;
    cfg.N_k = 1;
    cfg.N1_k = 1;
    cfg.M = 2;
    cfg.N_ev = 1;
    cfg.eps0 = 0.0;
    cfg.eps1 = 0.0;
    cfg.e_min = 1e-7;
    cfg.seed = 470;
    ChannelSet cs = generate_channels(cfg);
    for (auto& row : cs.Hev)
        for (auto& m : row) m.setZero();

    SECTION("zero transmit power cannot meet the harvest threshold") {
        val::GridSpec spec;
        spec.power_fractions = {0.0};
        const val::GridResult res = val::grid_oracle(cs, cfg, spec);
        CHECK(!res.found);
        CHECK(res.feasible == 0);
        CHECK(res.evaluated == static_cast<std::size_t>(spec.mu_points));
    }

    SECTION("best value matches the closed form at the returned point") {
        const val::GridResult res = val::grid_oracle(cs, cfg);
        REQUIRE(res.found);
        CHECK(res.evaluated == 25 * 50);  // 5 levels ^ 2 beams * 50 splits
        const double p_info = res.best_x.xI[0][0].squaredNorm();
        const double gain = cs.h[0][0][0].squaredNorm();
        const double closed = std::log1p(p_info * gain / cfg.sigma_a2) / res.best_mu;
        CHECK(res.best_value == Catch::Approx(closed).margin(1e-12));

        const val::GridResult again = val::grid_oracle(cs, cfg);
        CHECK(again.best_value == res.best_value);
        CHECK(again.best_mu == res.best_mu);
        CHECK(again.feasible == res.feasible);
    }

    SECTION("instances beyond the tiny class are rejected") {
        NetworkConfig big = oracle_cfg();
        big.K = 2;
        big.N_k = 3;
        const ChannelSet cs_big = generate_channels(big);
        CHECK_THROWS_AS(val::grid_oracle(cs_big, big), std::invalid_argument);
    }
}

TEST_CASE("path following dominates the grid oracle from its own start") {
    NetworkConfig cfg;
    cfg.K = 1;
    cfg.N_k = 2;
    cfg.N1_k = 1;
    cfg.M = 2;
    cfg.N_ev = 1;
    cfg.e_min = 1e-7;
    cfg.seed = 480;
    const ChannelSet cs = generate_channels(cfg);

    const val::GridResult grid = val::grid_oracle(cs, cfg);
    REQUIRE(grid.found);

    const sca::Iterate start =
        sca::make_iterate(cs, sca::rotate_phases(grid.best_x, cs, cfg), grid.best_mu, cfg);
    const alg::RunTrace tr = alg::run_secrecy(cs, cfg, start);
    CHECK(tr.final_objective >= grid.best_value - 1e-6);
    CHECK(tr.audit.all_pass);
}
