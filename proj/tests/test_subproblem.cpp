#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "secbeam/conic/certify.hpp"
#include "secbeam/conic/solver.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/sca/expansion.hpp"
#include "secbeam/sca/subproblem.hpp"

using namespace secbeam;
using namespace secbeam::sca;

namespace {

// Small network with a low harvest threshold so that aligned beams at
// moderate power make every constraint family strictly feasible.
NetworkConfig sub_cfg() {
    NetworkConfig cfg;
    cfg.K = 2;
    cfg.N_k = 2;
    cfg.N1_k = 1;
    cfg.M = 3;
    cfg.N_ev = 2;
    cfg.e_min = 1e-7;
    return cfg;
}

// Matched-filter beams with separate information / energy power shares of the
// per-cell budget. A large energy share drives the jamming floor up and the
// leakage rate down, which keeps per-user secrecy comfortably positive.
BeamformerSet split_beams(const ChannelSet& cs, const NetworkConfig& cfg, double info_share,
                          double energy_share) {
    BeamformerSet x = BeamformerSet::zeros(cfg);
    const double pi = info_share * cfg.Pk_max / cfg.N_k;
    const double pe = energy_share * cfg.Pk_max / cfg.N1_k;
    for (int k = 0; k < cfg.K; ++k) {
        for (int n = 0; n < cfg.N_k; ++n)
            x.xI[k][n] = std::sqrt(pi) * cs.h[k][k][n].normalized();
        for (int n1 = 0; n1 < cfg.N1_k; ++n1)
            x.xE[k][n1] = std::sqrt(pe) * cs.h[k][k][n1].normalized();
    }
    return x;
}

// Scaled feasibility of a point in the assembled program: every equality row
// within tol of its right-hand side (relative to the largest term) and every
// cone membership within tol of exact.
void require_point_feasible(const Subproblem& sp, const Eigen::VectorXd& z, double tol) {
    const conic::ConicProgram& p = sp.program;
    std::vector<double> lhs(p.rhs.size(), 0.0);
    std::vector<double> rowmax(p.rhs.size(), 0.0);
    for (const conic::EqualityTerm& t : p.terms) {
        const double c = t.coef * z(static_cast<long>(t.var));
        lhs[t.row] += c;
        rowmax[t.row] = std::max(rowmax[t.row], std::abs(c));
    }
    for (std::size_t r = 0; r < p.rhs.size(); ++r) {
        const double scale = std::max({1.0, rowmax[r], std::abs(p.rhs[r])});
        INFO("equality row " << r);
        REQUIRE(std::abs(lhs[r] - p.rhs[r]) <= tol * scale);
    }
    for (std::size_t ci = 0; ci < p.cones.size(); ++ci) {
        const conic::ConeSlice& c = p.cones[ci];
        const Eigen::VectorXd v =
            z.segment(static_cast<long>(c.start), static_cast<long>(c.dim));
        const double scale = std::max(1.0, v.norm());
        INFO("cone " << ci << " starting at " << p.names[c.start]);
        switch (c.type) {
        case conic::ConeType::NonNegative:
            REQUIRE(v.minCoeff() >= -tol * scale);
            break;
        case conic::ConeType::SecondOrder:
            REQUIRE(v(0) >= v.tail(v.size() - 1).norm() - tol * scale);
            break;
        case conic::ConeType::RotatedSecondOrder:
            REQUIRE(v(0) >= -tol * scale);
            REQUIRE(v(1) >= -tol * scale);
            REQUIRE(v(0) * v(1) >=
                    v.tail(v.size() - 2).squaredNorm() - tol * scale * scale);
            break;
        }
    }
}

double objective_at(const Subproblem& sp, const Eigen::VectorXd& z) {
    double v = 0.0;
    for (std::size_t j = 0; j < sp.program.variable_count(); ++j)
        v += sp.program.objective[j] * z(static_cast<long>(j));
    return v;
}

// True transformed-objective value at a point: worst per-user secrecy term.
double true_secrecy_value(const ChannelSet& cs, const BeamformerSet& x, double mu,
                          const NetworkConfig& cfg, bool with_ev) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            const double f2 = with_ev ? f2_term_mu(cs, x, mu, cfg, k, n) : 0.0;
            worst = std::min(worst, f1_term(cs, x, cfg, k, n) / mu - f2);
        }
    return worst;
}

// True per-cell efficiency value: summed secrecy terms over consumed power.
double true_efficiency_value(const ChannelSet& cs, const BeamformerSet& x, double mu,
                             const NetworkConfig& cfg) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.K; ++k) {
        double num = 0.0;
        for (int n = 0; n < cfg.N_k; ++n)
            num += f1_term(cs, x, cfg, k, n) / mu - f2_term_mu(cs, x, mu, cfg, k, n);
        const double tau = cell_power_mu(x, mu, cfg, k) / cfg.xi + cfg.M * cfg.P_A + cfg.P_c;
        worst = std::min(worst, num / tau);
    }
    return worst;
}

} // namespace

TEST_CASE("secrecy subproblem: expansion point is feasible and assembly is deterministic") {
    NetworkConfig cfg = sub_cfg();
    const ChannelSet cs = generate_channels(cfg);
    const BeamformerSet x = rotate_phases(split_beams(cs, cfg, 0.3, 0.5), cs, cfg);
    const Iterate it = make_iterate(cs, x, 2.2, cfg);
    REQUIRE(feasibility_audit_mu(cs, x, it.mu, cfg, 1e-9).all_pass);

    const Subproblem sp = assemble_secrecy_subproblem(it, cs, cfg);
    REQUIRE(sp.kind == SubproblemKind::Secrecy);
    REQUIRE(sp.units.size() == sp.program.variable_count());
    REQUIRE(sp.expansion_z.size() == sp.program.variable_count());

    const Eigen::VectorXd z0 = sp.expansion_vector();
    require_point_feasible(sp, z0, 1e-9);

    // The epigraph starts at the worst per-user bound value, which tangency
    // makes equal to the true objective at the expansion point.
    const double obj0 = objective_at(sp, z0);
    REQUIRE(obj0 == Catch::Approx(sp.value(z0, sp.objective_var)).margin(1e-15));
    REQUIRE(obj0 ==
            Catch::Approx(true_secrecy_value(cs, x, it.mu, cfg, true)).epsilon(1e-9));

    // Deterministic: assembling the same iterate twice gives identical programs.
    const Subproblem sp2 = assemble_secrecy_subproblem(it, cs, cfg);
    REQUIRE(conic::program_to_json(sp.program).dump() ==
            conic::program_to_json(sp2.program).dump());
}

TEST_CASE("secrecy subproblem: solve, certify, ascend, and round-trip the solution") {
    NetworkConfig cfg = sub_cfg();
    const ChannelSet cs = generate_channels(cfg);
    const BeamformerSet x = rotate_phases(split_beams(cs, cfg, 0.3, 0.5), cs, cfg);
    const Iterate it = make_iterate(cs, x, 2.2, cfg);
    const Subproblem sp = assemble_secrecy_subproblem(it, cs, cfg);

    const conic::SolveResult res = conic::solve(sp.program, 1e-8);
    REQUIRE(res.status == conic::SolveStatus::Optimal);

    const conic::CertifyReport cert = conic::certify(sp.program, res, 1e-7);
    INFO((cert.failures.empty() ? std::string("certified") : cert.failures.front()));
    REQUIRE(cert.pass);

    // Ascent at the subproblem level: the expansion point is feasible, so the
    // optimum cannot be below its value.
    const double obj0 = objective_at(sp, sp.expansion_vector());
    REQUIRE(res.objective >= obj0 - 1e-7 * std::max(1.0, std::abs(obj0)));

    // Extraction round trip: beams, mu, and the epigraph claims all match the
    // physics recomputed from the extracted variables.
    const Extraction ex = extract_solution(sp, res, cfg);
    REQUIRE(ex.mu > 1.0);
    REQUIRE(ex.mu <= mu_trust_cap(it) + 1e-7);
    REQUIRE(ex.objective == Catch::Approx(res.objective).margin(1e-12));

    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            const double Fv = sp.value(res.z, sp.F[k][n]);
            const double nuv = sp.value(res.z, sp.nu[k][n]);
            const double sv = sp.value(res.z, sp.s[k][n]);
            const double gv = sp.value(res.z, sp.gamma[k][n]);
            const double bv = sp.value(res.z, sp.beta[k][n]);
            const double phiv = phi(cs, ex.x, cfg, k, n);
            const double Sv = ev_signal(cs, ex.x, cfg, k, n);
            const double qv = q_denominator_mu(cs, ex.x, ex.mu, cfg, k, n);
            REQUIRE(Fv * nuv >= phiv - 1e-6 * phiv);
            REQUIRE(sv * gv >= Sv - 1e-6 * std::max(Sv, 1e-30));
            REQUIRE(bv >= gv * gv - 1e-6 * gv * gv);
            // The floor split keeps gamma a sound under-estimate of the true
            // worst-case eavesdropper floor.
            REQUIRE(gv <= qv * (1.0 + 1e-6));
            REQUIRE(gv > 0.0);
        }

    // The solved step is a valid next iterate: better true objective, still
    // feasible for the original transformed constraints.
    const BeamformerSet xr = rotate_phases(ex.x, cs, cfg);
    const double truev = true_secrecy_value(cs, xr, ex.mu, cfg, true);
    REQUIRE(truev >= res.objective - 1e-6 * std::max(1.0, std::abs(res.objective)));
    REQUIRE(truev >= true_secrecy_value(cs, x, it.mu, cfg, true) -
                         1e-7 * std::max(1.0, std::abs(truev)));
    REQUIRE(feasibility_audit_mu(cs, xr, ex.mu, cfg, 1e-6).all_pass);
    const Iterate next = make_iterate(cs, xr, ex.mu, cfg);
    check_iterate(next, cs, cfg);
}

TEST_CASE("no-eavesdropper subproblem omits leakage machinery and still ascends") {
    NetworkConfig cfg = sub_cfg();
    const ChannelSet cs = generate_channels(cfg);
    const BeamformerSet x = rotate_phases(split_beams(cs, cfg, 0.3, 0.5), cs, cfg);
    const Iterate it = make_iterate(cs, x, 2.2, cfg, /*with_ev=*/false);

    const Subproblem sp = assemble_secrecy_noeve_subproblem(it, cs, cfg);
    require_point_feasible(sp, sp.expansion_vector(), 1e-9);
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            REQUIRE(sp.s[k][n] == Subproblem::npos);
            REQUIRE(sp.gamma[k][n] == Subproblem::npos);
            REQUIRE(sp.beta[k][n] == Subproblem::npos);
        }

    const conic::SolveResult res = conic::solve(sp.program, 1e-8);
    REQUIRE(res.status == conic::SolveStatus::Optimal);
    REQUIRE(conic::certify(sp.program, res, 1e-7).pass);

    const double obj0 = objective_at(sp, sp.expansion_vector());
    REQUIRE(res.objective >= obj0 - 1e-7 * std::max(1.0, std::abs(obj0)));

    const Extraction ex = extract_solution(sp, res, cfg);
    const BeamformerSet xr = rotate_phases(ex.x, cs, cfg);
    const double truev = true_secrecy_value(cs, xr, ex.mu, cfg, false);
    REQUIRE(truev >= res.objective - 1e-6 * std::max(1.0, std::abs(res.objective)));
    REQUIRE(feasibility_audit_mu(cs, xr, ex.mu, cfg, 1e-6).all_pass);
    const Iterate next = make_iterate(cs, xr, ex.mu, cfg, /*with_ev=*/false);
    check_iterate(next, cs, cfg);
}

TEST_CASE("efficiency subproblem: expansion feasibility, ascent, and power consistency") {
    NetworkConfig cfg = sub_cfg();
    cfg.r_qos = 0.01;
    const ChannelSet cs = generate_channels(cfg);
    const BeamformerSet x = rotate_phases(split_beams(cs, cfg, 0.1, 0.7), cs, cfg);
    const Iterate it = make_iterate(cs, x, 2.2, cfg);

    // Scenario precondition: every user clears the rate floor at the
    // expansion point, otherwise the step is not assemblable.
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n)
            REQUIRE(it.f1[k][n] / it.mu - it.f2bar[k][n] >= cfg.r_qos);

    const Subproblem sp = assemble_see_subproblem(it, cs, cfg);
    REQUIRE(sp.kind == SubproblemKind::EnergyEfficiency);
    require_point_feasible(sp, sp.expansion_vector(), 1e-9);

    const double obj0 = objective_at(sp, sp.expansion_vector());
    REQUIRE(obj0 ==
            Catch::Approx(true_efficiency_value(cs, x, it.mu, cfg)).epsilon(1e-9));

    const conic::SolveResult res = conic::solve(sp.program, 1e-8);
    REQUIRE(res.status == conic::SolveStatus::Optimal);
    REQUIRE(conic::certify(sp.program, res, 1e-7).pass);
    REQUIRE(res.objective >= obj0 - 1e-7 * std::max(1.0, std::abs(obj0)));

    const Extraction ex = extract_solution(sp, res, cfg);
    REQUIRE(ex.mu > 1.0);

    // The squared consumed-power epigraph dominates the true consumed power,
    // so the bounded efficiency is a sound lower estimate of the true one.
    const BeamformerSet xr = rotate_phases(ex.x, cs, cfg);
    for (int k = 0; k < cfg.K; ++k) {
        const double tv = sp.value(res.z, sp.t[k]);
        const double tau_true =
            cell_power_mu(xr, ex.mu, cfg, k) / cfg.xi + cfg.M * cfg.P_A + cfg.P_c;
        REQUIRE(std::sqrt(tv) >= tau_true * (1.0 - 1e-6));
        REQUIRE(tv <= 3.0 * it.tau[k] * it.tau[k] + 1e-6);
    }
    const double truev = true_efficiency_value(cs, xr, ex.mu, cfg);
    REQUIRE(truev >= res.objective - 1e-6 * std::max(1.0, std::abs(res.objective)));
    REQUIRE(truev >= true_efficiency_value(cs, x, it.mu, cfg) -
                         1e-7 * std::max(1.0, std::abs(truev)));
    REQUIRE(feasibility_audit_mu(cs, xr, ex.mu, cfg, 1e-6).all_pass);

    // Every user still clears the rate floor after the step.
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n)
            REQUIRE(f1_term(cs, xr, cfg, k, n) / ex.mu -
                        f2_term_mu(cs, xr, ex.mu, cfg, k, n) >=
                    cfg.r_qos - 1e-6);
}

TEST_CASE("beam-gain initializer maximizes the worst aligned energy margin") {
    NetworkConfig cfg = sub_cfg();
    const ChannelSet cs = generate_channels(cfg);
    const double mu0 = 2.0;
    const BeamformerSet ref = split_beams(cs, cfg, 0.3, 0.5);

    const Subproblem sp = assemble_init_beamgain(cs, cfg, mu0, ref);
    REQUIRE(sp.kind == SubproblemKind::InitBeamGain);
    REQUIRE(sp.fixed_mu == mu0);
    REQUIRE(sp.mu == Subproblem::npos);

    const conic::SolveResult res = conic::solve(sp.program, 1e-8);
    REQUIRE(res.status == conic::SolveStatus::Optimal);
    REQUIRE(conic::certify(sp.program, res, 1e-7).pass);

    const Extraction ex = extract_solution(sp, res, cfg);
    REQUIRE(ex.mu == mu0);

    // Objective value equals the worst recomputed margin.
    const double thr = std::sqrt(cfg.e_min / (cfg.zeta * (1.0 - 1.0 / mu0)));
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.K; ++k)
        for (int n1 = 0; n1 < cfg.N1_k; ++n1)
            worst = std::min(worst,
                             cs.h[k][k][n1].dot(ex.x.xE[k][n1]).real() - thr);
    REQUIRE(worst == Catch::Approx(res.objective).margin(1e-6 * std::max(1.0, thr)));
    REQUIRE(worst > 0.0);

    // The encoded cuts hold at the solution: per-beam caps, budgets at mu0,
    // and the configured rate floor for every served user.
    const double chi = std::sqrt(std::expm1(cfg.r_min * mu0));
    for (int k = 0; k < cfg.K; ++k) {
        double e = 0.0, i = 0.0;
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
            e += ex.x.xE[k][n1].squaredNorm();
            REQUIRE(ex.x.xE[k][n1].squaredNorm() <= cfg.Pk_max * (1.0 + 1e-7));
        }
        for (int n = 0; n < cfg.N_k; ++n) {
            i += ex.x.xI[k][n].squaredNorm();
            double intf = cfg.sigma_a2;
            for (int kb = 0; kb < cfg.K; ++kb)
                for (int nb = 0; nb < cfg.N_k; ++nb) {
                    if (kb == k && nb == n) continue;
                    intf += std::norm(cs.h[kb][k][n].dot(ex.x.xI[kb][nb]));
                }
            REQUIRE(cs.h[k][k][n].dot(ex.x.xI[k][n]).real() >=
                    chi * std::sqrt(intf) * (1.0 - 1e-6) - 1e-12);
        }
        REQUIRE((1.0 - 1.0 / mu0) * e + i / mu0 <= cfg.Pk_max * (1.0 + 1e-7));
    }
}

TEST_CASE("harvest initializer maximizes the worst linearized harvest margin") {
    NetworkConfig cfg = sub_cfg();
    const ChannelSet cs = generate_channels(cfg);
    const double mu0 = 2.0;

    // Incumbent from the beam-gain phase keeps the linearization sensible.
    const BeamformerSet ref = split_beams(cs, cfg, 0.3, 0.5);
    const Subproblem spB = assemble_init_beamgain(cs, cfg, mu0, ref);
    const conic::SolveResult resB = conic::solve(spB.program, 1e-8);
    REQUIRE(resB.status == conic::SolveStatus::Optimal);
    const BeamformerSet incumbent = extract_solution(spB, resB, cfg).x;

    const Subproblem sp = assemble_init_harvest(cs, cfg, mu0, incumbent);
    REQUIRE(sp.kind == SubproblemKind::InitHarvest);

    const conic::SolveResult res = conic::solve(sp.program, 1e-8);
    REQUIRE(res.status == conic::SolveStatus::Optimal);
    REQUIRE(conic::certify(sp.program, res, 1e-7).pass);

    const Extraction ex = extract_solution(sp, res, cfg);

    Iterate shell;
    shell.x = incumbent;
    shell.mu = mu0;
    const std::vector<EhInner> ehs = inner_eh_constraint(shell, cs, cfg);
    double worst = std::numeric_limits<double>::infinity();
    for (const EhInner& e : ehs)
        worst = std::min(worst, eh_inner_lhs(e, ex.x, cfg) - eh_inner_rhs(e, mu0));
    const double scale = std::max(cfg.e_min / cfg.zeta, cfg.sigma_a2);
    REQUIRE(worst == Catch::Approx(res.objective).margin(1e-6 * std::max(1.0, scale)));

    // Iterating from the incumbent can only improve the worst margin.
    double worst0 = std::numeric_limits<double>::infinity();
    for (const EhInner& e : ehs)
        worst0 = std::min(worst0, eh_inner_lhs(e, incumbent, cfg) - eh_inner_rhs(e, mu0));
    REQUIRE(worst >= worst0 - 1e-7 * std::max(1.0, std::abs(worst0)));

    // A positive margin certifies the transformed harvested-energy constraint.
    if (worst > 0.0) {
        for (int k = 0; k < cfg.K; ++k)
            for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
                const double harvested = harvested_power(cs, ex.x, cfg, k, n1);
                REQUIRE(harvested >= cfg.e_min / cfg.zeta * (1.0 + 1.0 / (mu0 - 1.0)) *
                                         (1.0 - 1e-9));
            }
    }
}
