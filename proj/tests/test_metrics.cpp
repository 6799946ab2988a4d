#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "secbeam/metrics.hpp"

using namespace secbeam;
using testutil::random_beams;
using testutil::synthetic_channels;

namespace {

NetworkConfig small_cfg() {
    NetworkConfig cfg;
    cfg.K = 2;
    cfg.N_k = 2;
    cfg.N1_k = 1;
    cfg.M = 3;
    cfg.N_ev = 2;
    return cfg;
}

// Independent re-derivation of the secrecy rate straight from the SINR
// definitions, with a different accumulation layout than the library.
double secrecy_oracle(const ChannelSet& cs, const BeamformerSet& x, double eta,
                      const NetworkConfig& cfg, int k, int n) {
    long double num_ue = std::norm(cs.h[k][k][n].dot(x.xI[k][n])) -
                         cs.eps_ue[k][k][n] * x.xI[k][n].squaredNorm();
    if (num_ue < 0.0L) num_ue = 0.0L;
    long double den_ue = cfg.sigma_a2;
    for (int kb = 0; kb < cfg.K; ++kb)
        for (int nb = 0; nb < cfg.N_k; ++nb) {
            if (kb == k && nb == n) continue;
            den_ue += std::norm(cs.h[kb][k][n].dot(x.xI[kb][nb])) +
                      cs.eps_ue[kb][k][n] * x.xI[kb][nb].squaredNorm();
        }

    long double num_ev = (cs.Hev[k][k].adjoint() * x.xI[k][n]).squaredNorm() +
                         cs.eps_ev[k][k] * x.xI[k][n].squaredNorm();
    long double den_ev = cfg.N_ev * cfg.sigma_a2 / (1.0 - eta);
    for (int kb = 0; kb < cfg.K; ++kb)
        for (int nb = 0; nb < cfg.N1_k; ++nb)
            den_ev += eta / (1.0 - eta) *
                      ((cs.Hev[kb][k].adjoint() * x.xE[kb][nb]).squaredNorm() -
                       cs.eps_ev[kb][k] * x.xE[kb][nb].squaredNorm());
    for (int kb = 0; kb < cfg.K; ++kb)
        for (int nb = 0; nb < cfg.N_k; ++nb) {
            if (kb == k && nb == n) continue;
            den_ev += (cs.Hev[kb][k].adjoint() * x.xI[kb][nb]).squaredNorm() -
                      cs.eps_ev[kb][k] * x.xI[kb][nb].squaredNorm();
        }

    return (1.0 - eta) * std::log(1.0 + static_cast<double>(num_ue / den_ue)) -
           std::log(1.0 + static_cast<double>(num_ev / den_ev));
}

} // namespace

TEST_CASE("time split factories") {
    const auto a = TimeSplit::from_eta(0.5);
    CHECK(a.mu == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(a.consistent());
    const auto b = TimeSplit::from_mu(4.0);
    CHECK(b.eta == Catch::Approx(0.75).epsilon(1e-14));
    CHECK(b.consistent());
    CHECK_THROWS_AS(TimeSplit::from_eta(0.0), std::invalid_argument);
    CHECK_THROWS_AS(TimeSplit::from_eta(1.0), std::invalid_argument);
    CHECK_THROWS_AS(TimeSplit::from_mu(1.0), std::invalid_argument);
}

TEST_CASE("harvested energy") {
    auto cfg = small_cfg();
    Rng rng(1);
    const auto cs = synthetic_channels(cfg, rng);
    const auto ts = TimeSplit::from_eta(0.5);

    SECTION("zero beams leave only amplified noise") {
        const auto e = harvested_energy(cs, BeamformerSet::zeros(cfg), ts, cfg);
        for (int k = 0; k < cfg.K; ++k)
            for (int n1 = 0; n1 < cfg.N1_k; ++n1)
                CHECK(e[k][n1] == Catch::Approx(cfg.zeta * ts.eta * cfg.sigma_a2).epsilon(1e-12));
    }

    SECTION("single-term direct value") {
        NetworkConfig c1;
        c1.K = 1;
        c1.N_k = 1;
        c1.N1_k = 1;
        c1.M = 1;
        c1.N_ev = 1;
        c1.zeta = 0.5;
        c1.sigma_a2 = 1e-30;
        Rng r2(2);
        auto cs1 = synthetic_channels(c1, r2);
        cs1.h[0][0][0](0) = std::complex<double>(1.0, 0.0);
        BeamformerSet x = BeamformerSet::zeros(c1);
        x.xE[0][0](0) = std::complex<double>(0.0, std::sqrt(2.0)); // |h^H x|^2 = 2
        const auto e = harvested_energy(cs1, x, TimeSplit::from_eta(0.5), c1);
        CHECK(e[0][0] == Catch::Approx(0.5).epsilon(1e-12));
    }

    SECTION("quadratic homogeneity in the energy beams") {
        auto x = random_beams(cfg, rng, 0.3);
        auto x2 = x;
        for (auto& cell : x2.xE)
            for (auto& v : cell) v *= 2.0;
        const auto e1 = harvested_energy(cs, x, ts, cfg);
        const auto e2 = harvested_energy(cs, x2, ts, cfg);
        const double base = cfg.zeta * ts.eta * cfg.sigma_a2;
        for (int k = 0; k < cfg.K; ++k)
            for (int n1 = 0; n1 < cfg.N1_k; ++n1)
                CHECK(e2[k][n1] - base == Catch::Approx(4.0 * (e1[k][n1] - base)).epsilon(1e-10));
    }
}

TEST_CASE("worst-case UE rate") {
    auto cfg = small_cfg();
    Rng rng(3);
    const auto cs = synthetic_channels(cfg, rng);
    const auto ts = TimeSplit::from_eta(0.4);

    SECTION("zero information beams give zero rate") {
        const auto r = worst_ue_rate(cs, BeamformerSet::zeros(cfg), ts, cfg);
        for (const auto& row : r)
            for (double v : row) CHECK(v == 0.0);
    }

    SECTION("unit-SINR direct value") {
        NetworkConfig c1;
        c1.K = 1;
        c1.N_k = 1;
        c1.N1_k = 1;
        c1.M = 1;
        c1.N_ev = 1;
        c1.eps0 = 0.0;
        c1.eps1 = 0.0;
        Rng r2(4);
        auto cs1 = synthetic_channels(c1, r2);
        cs1.h[0][0][0](0) = std::complex<double>(1.0, 0.0);
        cs1.eps_ue[0][0][0] = 0.0;
        BeamformerSet x = BeamformerSet::zeros(c1);
        x.xI[0][0](0) = std::sqrt(c1.sigma_a2); // |h^H x|^2 = sigma_a2
        const auto r = worst_ue_rate(cs1, x, TimeSplit::from_eta(0.25), c1);
        CHECK(r[0][0] == Catch::Approx(0.75 * std::log(2.0)).epsilon(1e-12));
    }

    SECTION("numerator clamps when uncertainty dominates") {
        auto cfg2 = cfg;
        cfg2.eps1 = 1e9; // radii rebuilt below
        Rng r2(5);
        auto cs2 = synthetic_channels(cfg2, r2);
        auto x = random_beams(cfg2, r2, 0.2);
        const auto r = worst_ue_rate(cs2, x, ts, cfg2);
        for (int k = 0; k < cfg2.K; ++k)
            for (int n = 0; n < cfg2.N_k; ++n) {
                REQUIRE(signal_margin(cs2, x, cfg2, k, n) < 0.0);
                CHECK(r[k][n] == 0.0);
            }
    }
}

TEST_CASE("worst-case EV SINR") {
    auto cfg = small_cfg();
    Rng rng(6);
    const auto ts = TimeSplit::from_eta(0.5);

    SECTION("zero wiretap channels and eps0 give zero SINR") {
        auto cfg0 = cfg;
        cfg0.eps0 = 0.0;
        auto cs = synthetic_channels(cfg0, rng);
        for (int kb = 0; kb < cfg0.K; ++kb)
            for (int k = 0; k < cfg0.K; ++k) {
                cs.Hev[kb][k].setZero();
                cs.eps_ev[kb][k] = 0.0;
            }
        const auto x = random_beams(cfg0, rng, 0.2);
        const auto s = worst_ev_sinr(cs, x, ts, cfg0);
        for (const auto& row : s)
            for (double v : row) CHECK(v == 0.0);
    }

    SECTION("noise-only denominator") {
        auto cs = synthetic_channels(cfg, rng);
        BeamformerSet x = BeamformerSet::zeros(cfg);
        for (int m = 0; m < cfg.M; ++m) x.xI[0][0](m) = 0.05 * rng.cnormal();
        const auto s = worst_ev_sinr(cs, x, ts, cfg);
        const double expect =
            ev_signal(cs, x, cfg, 0, 0) / (cfg.N_ev * cfg.sigma_a2 / (1.0 - ts.eta));
        CHECK(s[0][0] == Catch::Approx(expect).epsilon(1e-12));
    }

    SECTION("more energy-phase time strictly lowers the EV SINR") {
        auto cs = synthetic_channels(cfg, rng);
        const auto x = random_beams(cfg, rng, 0.2);
        REQUIRE(ev_signal(cs, x, cfg, 0, 0) > 0.0);
        const auto lo = worst_ev_sinr(cs, x, TimeSplit::from_eta(0.3), cfg);
        const auto hi = worst_ev_sinr(cs, x, TimeSplit::from_eta(0.7), cfg);
        CHECK(hi[0][0] < lo[0][0]);
    }

    SECTION("nonpositive denominator raises") {
        auto cfg2 = cfg;
        cfg2.eps0 = 1e12;
        Rng r2(7);
        auto cs2 = synthetic_channels(cfg2, r2);
        const auto x = random_beams(cfg2, r2, 0.2);
        CHECK_THROWS_AS(worst_ev_sinr(cs2, x, ts, cfg2), MetricError);
    }
}

TEST_CASE("secrecy rate agrees with an independent oracle") {
    auto cfg = small_cfg();
    Rng rng(8);
    const auto cs = synthetic_channels(cfg, rng);
    const auto ts = TimeSplit::from_eta(0.45);
    const auto x = random_beams(cfg, rng, 0.15);

    const auto f = secrecy_rate(cs, x, ts, cfg);
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n)
            CHECK(f[k][n] ==
                  Catch::Approx(secrecy_oracle(cs, x, ts.eta, cfg, k, n)).epsilon(1e-10));

    SECTION("degenerate eavesdropper reduces to the UE rate") {
        auto cfg0 = cfg;
        cfg0.eps0 = 0.0;
        Rng r2(9);
        auto cs0 = synthetic_channels(cfg0, r2);
        for (int kb = 0; kb < cfg0.K; ++kb)
            for (int k = 0; k < cfg0.K; ++k) {
                cs0.Hev[kb][k].setZero();
                cs0.eps_ev[kb][k] = 0.0;
            }
        const auto x0 = random_beams(cfg0, r2, 0.15);
        const auto fr = secrecy_rate(cs0, x0, ts, cfg0);
        const auto ur = worst_ue_rate(cs0, x0, ts, cfg0);
        for (int k = 0; k < cfg0.K; ++k)
            for (int n = 0; n < cfg0.N_k; ++n)
                CHECK(fr[k][n] == Catch::Approx(ur[k][n]).margin(1e-15));
    }

    SECTION("all-zero beams give zero secrecy rate") {
        const auto f0 = secrecy_rate(cs, BeamformerSet::zeros(cfg), ts, cfg);
        for (const auto& row : f0)
            for (double v : row) CHECK(v == 0.0);
    }
}

TEST_CASE("power accounting") {
    auto cfg = small_cfg();
    Rng rng(10);
    const auto ts = TimeSplit::from_eta(0.5);

    SECTION("equal split") {
        auto x = BeamformerSet::zeros(cfg);
        x.xE[0][0](0) = 1.0;
        x.xI[0][0](0) = 1.0;
        const auto p = powers(x, ts, cfg);
        CHECK(p.g_k[0] == Catch::Approx(1.0).epsilon(1e-14));
        CHECK(p.g_k[1] == 0.0);
    }

    SECTION("additivity and zero case") {
        const auto x = random_beams(cfg, rng, 0.3);
        const auto p = powers(x, ts, cfg);
        double s = 0.0;
        for (double v : p.g_k) s += v;
        CHECK(p.g == s);
        CHECK(powers(BeamformerSet::zeros(cfg), ts, cfg).g == 0.0);
    }

    SECTION("mu-form power identity") {
        const auto x = random_beams(cfg, rng, 0.3);
        for (double eta : {0.2, 0.5, 0.8}) {
            const auto tse = TimeSplit::from_eta(eta);
            for (int k = 0; k < cfg.K; ++k)
                CHECK(cell_power_mu(x, tse.mu, cfg, k) ==
                      Catch::Approx(cell_power(x, tse, cfg, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("mu-form EV rate term matches the eta form") {
    auto cfg = small_cfg();
    Rng rng(11);
    const auto cs = synthetic_channels(cfg, rng);
    const auto x = random_beams(cfg, rng, 0.2);
    for (double eta : {0.25, 0.5, 0.75}) {
        const auto ts = TimeSplit::from_eta(eta);
        for (int k = 0; k < cfg.K; ++k)
            for (int n = 0; n < cfg.N_k; ++n)
                CHECK(f2_term_mu(cs, x, ts.mu, cfg, k, n) ==
                      Catch::Approx(f2_term(cs, x, eta, cfg, k, n)).epsilon(1e-10));
    }
}

TEST_CASE("secrecy energy efficiency values") {
    NetworkConfig cfg;
    cfg.K = 1;
    cfg.N_k = 2;
    cfg.N1_k = 1;
    cfg.M = 5;
    cfg.N_ev = 1;
    Rng rng(12);
    const auto cs = synthetic_channels(cfg, rng);
    const auto ts = TimeSplit::from_eta(0.5);

    SECTION("documented denominator value") {
        auto x = BeamformerSet::zeros(cfg);
        // g_k = 0.5*0 + 0.5*0.4 = 0.2 W -> denominator 0.2/0.2 + 5*0.6 + 2.5 = 6.5 W.
        x.xI[0][0](0) = std::sqrt(0.4);
        CHECK(see_denominator(x, ts, cfg, 0) == Catch::Approx(6.5).epsilon(1e-14));
    }

    SECTION("zero beams give zero SEE") {
        const auto see = see_values(cs, BeamformerSet::zeros(cfg), ts, cfg);
        CHECK(see[0] == 0.0);
    }

    SECTION("definitional identity SEE * denominator = cell secrecy sum") {
        const auto x = random_beams(cfg, rng, 0.2);
        const auto see = see_values(cs, x, ts, cfg);
        const auto f = secrecy_rate(cs, x, ts, cfg);
        const double num = f[0][0] + f[0][1];
        CHECK(see[0] * see_denominator(x, ts, cfg, 0) == Catch::Approx(num).epsilon(1e-12));
    }
}

TEST_CASE("feasibility audit") {
    auto cfg = small_cfg();
    Rng rng(13);
    const auto cs = synthetic_channels(cfg, rng);
    const auto ts = TimeSplit::from_eta(0.5);
    const double tol = 1e-6;

    SECTION("zero beams fail the harvested-energy family") {
        REQUIRE(cfg.e_min > cfg.zeta * ts.eta * cfg.sigma_a2);
        const auto rep = feasibility_audit(cs, BeamformerSet::zeros(cfg), ts, cfg, tol);
        CHECK_FALSE(rep.all_pass);
        REQUIRE(rep.find("harvested_energy") != nullptr);
        CHECK_FALSE(rep.find("harvested_energy")->pass);
        CHECK(rep.find("per_beam_cap")->pass);
        CHECK(rep.find("cell_power")->pass);
        CHECK(rep.find("network_power")->pass);
        CHECK(rep.find("eta_range")->pass);
    }

    SECTION("constructed per-beam violation is caught") {
        auto x = BeamformerSet::zeros(cfg);
        x.xI[0][0](0) = std::sqrt(cfg.Pk_max * (1.0 + 3.0 * tol));
        const auto rep = feasibility_audit(cs, x, ts, cfg, tol);
        CHECK_FALSE(rep.find("per_beam_cap")->pass);
    }

    SECTION("strongly driven beams satisfy EH and fail power caps") {
        auto x = random_beams(cfg, rng, 10.0 * std::sqrt(cfg.Pk_max));
        const auto rep = feasibility_audit(cs, x, ts, cfg, tol);
        CHECK(rep.find("harvested_energy")->pass);
        CHECK_FALSE(rep.find("cell_power")->pass);
    }

    SECTION("mu-form audit mirrors the eta-form families") {
        const auto x = random_beams(cfg, rng, 0.05);
        const auto mu_rep = feasibility_audit_mu(cs, x, 2.0, cfg, tol);
        REQUIRE(mu_rep.find("cell_power_mu") != nullptr);
        REQUIRE(mu_rep.find("mu_range") != nullptr);
        CHECK(mu_rep.find("mu_range")->pass);
    }
}

TEST_CASE("metric report aggregates and serializes") {
    auto cfg = small_cfg();
    Rng rng(14);
    const auto cs = synthetic_channels(cfg, rng);
    const auto ts = TimeSplit::from_eta(0.5);
    const auto x = random_beams(cfg, rng, 0.15);

    const auto rep = compute_metrics(cs, x, ts, cfg);
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            CHECK(rep.secrecy[k][n] ==
                  Catch::Approx(rep.ue_rate[k][n] - rep.f2[k][n]).margin(1e-15));
            CHECK(rep.min_secrecy <= rep.secrecy[k][n]);
        }
    CHECK(rep.min_secrecy == Catch::Approx(min_secrecy_rate(cs, x, ts, cfg)).margin(1e-15));

    const auto j = metric_report_to_json(rep);
    CHECK(j["min_secrecy_bits"].get<double>() ==
          Catch::Approx(rep.min_secrecy / std::log(2.0)).epsilon(1e-12));

    const auto csv = metric_report_to_csv(rep);
    CHECK(csv.rfind("cell,ue,", 0) == 0);
    // header + one row per UE
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + cfg.K * cfg.N_k);
}
