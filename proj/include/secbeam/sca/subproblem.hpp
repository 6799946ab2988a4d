#pragma once

// Assembly of the path-following subproblems into the canonical cone form.
//
// Every bound produced by the expansion layer turns into equality rows plus
// second-order / rotated-second-order cone memberships over scaled variables:
//
//   - each beamformer lives inside its own per-beam cap cone
//     (norm, re/im coordinates), so the per-beam power limit is the cone's
//     linear cap row;
//   - every squared norm that appears in several places is routed through the
//     beam's norm variable: a cone coordinate c with link row c = sqrt(eps) *
//     norm over-estimates the corresponding uncertainty mass, which is sound
//     because each such mass only ever tightens a constraint and the
//     over-estimate is exact at the optimum;
//   - every ratio/reciprocal gets a named epigraph variable tied by a rotated
//     cone (quadratic-over-linear, reciprocal, squares);
//   - inequality rows close with explicit nonnegative slack variables.
//
// Scaling: each program variable z_j represents the physical value
// units[j] * z_j, with units chosen so the expansion point sits near 1.
// Rotated-cone coordinates use the geometric mean of the slot units so that
// cone membership in scaled coordinates is exactly cone membership in
// physical ones.  The expansion point itself is recorded in scaled form
// (expansion_z); for the iterative kinds it is feasible for the assembled
// program by construction and doubles as a self-check oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "secbeam/conic/program.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/model.hpp"
#include "secbeam/sca/expansion.hpp"

namespace secbeam::sca {

enum class SubproblemKind {
    Secrecy,           // max-min secrecy rate step
    SecrecyNoEve,      // leakage term forced to zero
    EnergyEfficiency,  // max-min per-cell secrecy energy efficiency step
    InitBeamGain,      // initializer phase 1: max-min energy-beam gain margin
    InitHarvest,       // initializer phase 2: max-min linearized harvest margin
};

inline const char* subproblem_kind_name(SubproblemKind k) {
    switch (k) {
    case SubproblemKind::Secrecy: return "secrecy";
    case SubproblemKind::SecrecyNoEve: return "secrecy-noeve";
    case SubproblemKind::EnergyEfficiency: return "energy-efficiency";
    case SubproblemKind::InitBeamGain: return "init-beamgain";
    case SubproblemKind::InitHarvest: return "init-harvest";
    }
    return "unknown";
}

// One assembled cone program plus the bookkeeping needed to map the solver's
// answer back to physical quantities and to reproduce the expansion point.
struct Subproblem {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    SubproblemKind kind = SubproblemKind::Secrecy;
    conic::ConicProgram program;
    std::vector<double> units;        // physical value = units[j] * z[j]
    std::vector<double> expansion_z;  // scaled expansion/reference point
    double fixed_mu = 0.0;            // initializer kinds run at a fixed mu

    // Variable locations. Beam entries point at the first coordinate of the
    // interleaved (re, im) antenna block.
    std::vector<std::vector<std::size_t>> xE;  // [k][n1]
    std::vector<std::vector<std::size_t>> xI;  // [k][n]
    std::size_t mu = npos;
    std::size_t objective_var = npos;

    // Epigraph locations for diagnostics/round-trip checks (npos when absent).
    std::vector<std::vector<std::size_t>> F;      // [k][n] interference-over-nu
    std::vector<std::vector<std::size_t>> nu;     // [k][n]
    std::vector<std::vector<std::size_t>> s;      // [k][n] leakage-over-gamma
    std::vector<std::vector<std::size_t>> gamma;  // [k][n]
    std::vector<std::vector<std::size_t>> beta;   // [k][n]
    std::vector<std::size_t> t;    // [k] squared consumed-power (ratio kind)
    std::vector<std::size_t> tau;  // [k] consumed-power (ratio kind)

    double value(const Eigen::VectorXd& z, std::size_t j) const {
        return units[j] * z(static_cast<long>(j));
    }
    Eigen::VectorXd expansion_vector() const {
        return Eigen::Map<const Eigen::VectorXd>(expansion_z.data(),
                                                 static_cast<long>(expansion_z.size()));
    }
};

// Physical solution recovered from a solver result.
struct Extraction {
    BeamformerSet x;
    double mu = 0.0;        // fixed_mu for the initializer kinds
    double objective = 0.0; // epigraph value in physical units
};

namespace detail {

// Equality-row / cone-slice builder that tracks per-variable units and the
// scaled expansion point alongside the raw program.
class Assembler {
public:
    conic::ConicProgram program;
    std::vector<double> units;
    std::vector<double> z0;

    std::size_t var(const std::string& name, double unit, double phys0) {
        if (!(unit > 0.0) || !std::isfinite(unit))
            throw std::invalid_argument("nonpositive scaling unit for variable " + name);
        const std::size_t j = program.add_variable(name);
        units.push_back(unit);
        z0.push_back(phys0 / unit);
        return j;
    }

    void maximize(std::size_t j) { program.objective[j] = units[j]; }

    std::size_t row(double rhs_phys) { return program.add_equality(rhs_phys); }

    void term(std::size_t r, std::size_t v, double phys_coef) {
        program.add_term(r, v, phys_coef * units[v]);
    }

    // Closes an inequality as row + sign*slack = rhs with slack >= 0;
    // phys0 is the slack value at the expansion point, scale its typical
    // magnitude. A materially negative phys0 means the expansion point is
    // infeasible for the row being encoded.
    std::size_t slack(std::size_t r, const std::string& name, double scale, double phys0,
                      double sign = 1.0) {
        if (phys0 < -1e-6 * std::max(scale, 1e-30))
            throw ExpansionError(-1, -1, "expansion point infeasible at " + name);
        const double v0 = std::max(phys0, 0.0);
        const std::size_t j = var(name, std::max({v0, scale, 1e-30}), v0);
        program.add_cone(conic::ConeType::NonNegative, j, 1);
        term(r, j, sign);
        return j;
    }

    void fix(std::size_t v, double phys) {
        const std::size_t r = row(phys);
        term(r, v, 1.0);
    }

    // copy = master_coef * master + shift
    void link(std::size_t copy, std::size_t master, double master_coef = 1.0,
              double shift = 0.0) {
        const std::size_t r = row(shift);
        term(r, copy, 1.0);
        term(r, master, -master_coef);
    }

    // Adds the terms of phys_coef * Re{a^H x} (or Im) over an interleaved
    // (re, im) beam block starting at `first`.
    void re_inner(std::size_t r, std::size_t first, const Vec& a, double phys_coef) {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const std::size_t base = first + 2 * static_cast<std::size_t>(i);
            term(r, base, phys_coef * a(i).real());
            term(r, base + 1, phys_coef * a(i).imag());
        }
    }
    void im_inner(std::size_t r, std::size_t first, const Vec& a, double phys_coef) {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const std::size_t base = first + 2 * static_cast<std::size_t>(i);
            term(r, base, -phys_coef * a(i).imag());
            term(r, base + 1, phys_coef * a(i).real());
        }
    }

    // Cone under construction; no other variables may be created between
    // begin and close so the slice stays contiguous.
    struct Cone {
        std::string stem;
        std::size_t a = Subproblem::npos;
        std::size_t b = Subproblem::npos;
        double uw = 0.0;
        std::size_t dim = 0;
        bool rotated = true;
    };

    Cone rsoc(const std::string& stem, double ua, double a0, double ub, double b0) {
        Cone c;
        c.stem = stem;
        c.a = var(stem + ".epi", ua, a0);
        c.b = var(stem + ".den", ub, b0);
        c.uw = std::sqrt(ua * ub);
        c.dim = 2;
        return c;
    }
    Cone soc(const std::string& stem, double ut, double t0) {
        Cone c;
        c.stem = stem;
        c.rotated = false;
        c.a = var(stem + ".t", ut, t0);
        c.uw = ut;
        c.dim = 1;
        return c;
    }

    // Divides every equality row by its largest scaled coefficient so the
    // constraint matrix is row-wise O(1); equality scaling changes neither
    // the feasible set nor the cones, only the conditioning.
    void normalize_rows() {
        std::vector<double> s(program.rhs.size(), 0.0);
        for (const conic::EqualityTerm& t : program.terms)
            s[t.row] = std::max(s[t.row], std::abs(t.coef));
        for (std::size_t r = 0; r < s.size(); ++r)
            s[r] = std::max({s[r], std::abs(program.rhs[r]), 1e-300});
        for (conic::EqualityTerm& t : program.terms) t.coef /= s[t.row];
        for (std::size_t r = 0; r < s.size(); ++r) program.rhs[r] /= s[r];
    }
    std::size_t coord(Cone& c, double phys0) {
        const std::size_t j = var(c.stem + ".w" + std::to_string(c.dim), c.uw, phys0);
        ++c.dim;
        return j;
    }
    void close(const Cone& c) {
        program.add_cone(c.rotated ? conic::ConeType::RotatedSecondOrder
                                   : conic::ConeType::SecondOrder,
                         c.a, c.dim);
    }
};

inline double guard_unit(double v, double fallback) {
    return std::max(std::abs(v), fallback);
}

// Per-beam cap cones hosting the beamformer coordinates; fills the beam and
// norm index tables and emits norm <= sqrt(Pk_max) cap rows.
inline void build_beams(Assembler& A, Subproblem& sp, const BeamformerSet& x0,
                        const NetworkConfig& cfg, std::vector<std::vector<std::size_t>>& nE,
                        std::vector<std::vector<std::size_t>>& nI) {
    const double sP = std::sqrt(cfg.Pk_max);
    sp.xE.assign(cfg.K, std::vector<std::size_t>(cfg.N1_k, Subproblem::npos));
    sp.xI.assign(cfg.K, std::vector<std::size_t>(cfg.N_k, Subproblem::npos));
    nE.assign(cfg.K, std::vector<std::size_t>(cfg.N1_k, Subproblem::npos));
    nI.assign(cfg.K, std::vector<std::size_t>(cfg.N_k, Subproblem::npos));

    auto add_beam = [&](const std::string& stem, const Vec& v0, std::size_t& norm_idx,
                        std::size_t& first_idx) {
        Assembler::Cone c = A.soc(stem, sP, v0.norm());
        norm_idx = c.a;
        first_idx = Subproblem::npos;
        for (int i = 0; i < cfg.M; ++i) {
            const std::size_t jr = A.coord(c, v0(i).real());
            if (i == 0) first_idx = jr;
            A.coord(c, v0(i).imag());
        }
        A.close(c);
        const std::size_t r = A.row(sP);
        A.term(r, norm_idx, 1.0);
        A.slack(r, stem + ".cap", sP, sP - v0.norm());
    };

    for (int k = 0; k < cfg.K; ++k) {
        for (int n1 = 0; n1 < cfg.N1_k; ++n1)
            add_beam("xE(" + std::to_string(k) + "," + std::to_string(n1) + ")",
                     x0.xE[k][n1], nE[k][n1], sp.xE[k][n1]);
        for (int n = 0; n < cfg.N_k; ++n)
            add_beam("xI(" + std::to_string(k) + "," + std::to_string(n) + ")",
                     x0.xI[k][n], nI[k][n], sp.xI[k][n]);
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Iterative subproblems (secrecy / no-eve / energy efficiency)
// ---------------------------------------------------------------------------

namespace detail {

inline Subproblem assemble_sca_subproblem(SubproblemKind kind, const Iterate& it,
                                          const ChannelSet& cs, const NetworkConfig& cfg) {
    const bool with_ev = kind != SubproblemKind::SecrecyNoEve;
    const bool ratio = kind == SubproblemKind::EnergyEfficiency;
    check_iterate(it, cs, cfg);

    const int K = cfg.K, N = cfg.N_k, N1 = cfg.N1_k;
    const double ml = it.mu - 1.0;
    const double sigma = std::sqrt(cfg.sigma_a2);

    const std::vector<RateMinorant> f1m = minorant_f1(it, cs, cfg);
    std::vector<EvRateMajorant> f2M;
    std::vector<FloorLinearization> floors;
    if (with_ev) {
        f2M = majorant_f2(it, cs, cfg);
        floors = floor_linearizations(it, cs, cfg);
    }
    const std::vector<PowerInner> powers = inner_power_constraints(it, cfg);
    const std::vector<EhInner> ehs = inner_eh_constraint(it, cs, cfg);
    std::vector<SeeRateMinorant> phis;
    std::vector<SeeEvMajorant> psis;
    if (ratio) {
        phis = see_minorant_phi(it, cs, cfg);
        psis = see_majorant_psi(it, cs, cfg);
    }

    Assembler A;
    Subproblem sp;
    sp.kind = kind;
    auto grid = [&](std::vector<std::vector<std::size_t>>& v) {
        v.assign(K, std::vector<std::size_t>(N, Subproblem::npos));
    };
    grid(sp.F);
    grid(sp.nu);
    grid(sp.s);
    grid(sp.gamma);
    grid(sp.beta);

    std::vector<std::vector<std::size_t>> nE, nI;
    build_beams(A, sp, it.x, cfg, nE, nI);

    sp.mu = A.var("mu", it.mu, it.mu);

    // Per-user bound values at the expansion point: tangency makes them equal
    // the cached metric values, except that a user whose rate minorant is
    // degenerate (zero worst-case margin) contributes a zero rate term.
    auto is_active = [&](std::size_t idx) {
        const RateMinorant& m = f1m[idx];
        return m.active() && m.d * m.phi_expansion >= m.floor;
    };
    std::vector<double> val0(static_cast<std::size_t>(K) * N, 0.0);
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n) {
            const std::size_t idx = static_cast<std::size_t>(k) * N + n;
            val0[idx] = (is_active(idx) ? it.f1[k][n] / it.mu : 0.0) -
                        (with_ev ? it.f2bar[k][n] : 0.0);
        }

    // Objective epigraph. Rate kinds: min over users of the bounded secrecy
    // term; ratio kind: min over cells of the bounded per-cell efficiency.
    double obj0 = std::numeric_limits<double>::infinity();
    if (ratio) {
        for (int k = 0; k < K; ++k) {
            double cell = 0.0;
            for (int n = 0; n < N; ++n)
                cell += val0[static_cast<std::size_t>(k) * N + n];
            obj0 = std::min(obj0, cell / it.tau[k]);
        }
    } else {
        for (int k = 0; k < K; ++k)
            for (int n = 0; n < N; ++n)
                obj0 = std::min(obj0, val0[static_cast<std::size_t>(k) * N + n]);
    }
    sp.objective_var = A.var("objective", guard_unit(obj0, 1e-2), obj0);
    A.maximize(sp.objective_var);

    // Reciprocal chain rho >= 1/(mu-1) (+ its square for the floor rows).
    std::size_t rho = Subproblem::npos;
    {
        Assembler::Cone c = A.rsoc("recip_mu", 1.0 / ml, 1.0 / ml, ml, ml);
        A.link(c.b, sp.mu, 1.0, -1.0);
        const std::size_t one = A.coord(c, 1.0);
        A.close(c);
        A.fix(one, 1.0);
        rho = c.a;
    }
    std::size_t rsq = Subproblem::npos;
    if (with_ev) {
        Assembler::Cone c = A.rsoc("recip_mu_sq", 1.0 / (ml * ml), 1.0 / (ml * ml), 1.0, 1.0);
        const std::size_t pc = A.coord(c, 1.0 / ml);
        A.close(c);
        A.fix(c.b, 1.0);
        A.link(pc, rho);
        rsq = c.a;
    }

    // Trust region on mu (kept strictly interior at the expansion point).
    if (with_ev) {
        const double cap = mu_trust_cap(it);
        const double delta = 1e-9 * std::max(1.0, cap);
        const std::size_t r = A.row(cap - delta);
        A.term(r, sp.mu, 1.0);
        A.slack(r, "mu_trust", it.mu, cap - delta - it.mu);
    }

    // Per-cell power epigraphs.
    std::vector<std::size_t> pe(K, Subproblem::npos), qi(K, Subproblem::npos),
        ee(K, Subproblem::npos);
    for (int k = 0; k < K; ++k) {
        const std::string kk = std::to_string(k);
        double pe0 = 0.0, qi0 = 0.0;
        for (int n1 = 0; n1 < N1; ++n1) pe0 += it.x.xE[k][n1].squaredNorm();
        for (int n = 0; n < N; ++n) qi0 += it.x.xI[k][n].squaredNorm();
        qi0 /= it.mu;
        {
            Assembler::Cone c =
                A.rsoc("pe(" + kk + ")", guard_unit(pe0, 1e-9 * cfg.Pk_max), pe0, 1.0, 1.0);
            std::vector<std::size_t> coords(N1);
            for (int n1 = 0; n1 < N1; ++n1)
                coords[n1] = A.coord(c, it.x.xE[k][n1].norm());
            A.close(c);
            A.fix(c.b, 1.0);
            for (int n1 = 0; n1 < N1; ++n1) A.link(coords[n1], nE[k][n1]);
            pe[k] = c.a;
        }
        {
            Assembler::Cone c = A.rsoc("qi(" + kk + ")", guard_unit(qi0, 1e-9 * cfg.Pk_max),
                                       qi0, it.mu, it.mu);
            std::vector<std::size_t> coords(N);
            for (int n = 0; n < N; ++n) coords[n] = A.coord(c, it.x.xI[k][n].norm());
            A.close(c);
            A.link(c.b, sp.mu);
            for (int n = 0; n < N; ++n) A.link(coords[n], nI[k][n]);
            qi[k] = c.a;
        }
        if (with_ev) {
            double ee0 = 0.0;
            bool any = false;
            for (int kb = 0; kb < K; ++kb) {
                if (cs.eps_ev[kb][k] > 0.0) any = true;
                for (int nb = 0; nb < N1; ++nb)
                    ee0 += cs.eps_ev[kb][k] * it.x.xE[kb][nb].squaredNorm();
            }
            if (any) {
                Assembler::Cone c =
                    A.rsoc("ee(" + kk + ")", guard_unit(ee0, 1e-12), ee0, 1.0, 1.0);
                std::vector<std::pair<std::size_t, std::pair<int, int>>> coords;
                for (int kb = 0; kb < K; ++kb) {
                    const double eps = cs.eps_ev[kb][k];
                    if (!(eps > 0.0)) continue;
                    for (int nb = 0; nb < N1; ++nb)
                        coords.push_back(
                            {A.coord(c, std::sqrt(eps) * it.x.xE[kb][nb].norm()), {kb, nb}});
                }
                A.close(c);
                A.fix(c.b, 1.0);
                for (const auto& [j, kn] : coords)
                    A.link(j, nE[kn.first][kn.second], std::sqrt(cs.eps_ev[kn.first][k]));
                ee[k] = c.a;
            }
        }
    }

    // Ratio-kind scaffolding: mu^2 epigraph and per-cell consumed-power chain.
    std::size_t msq = Subproblem::npos;
    std::vector<std::size_t> tauv(K, Subproblem::npos), recip(K, Subproblem::npos);
    if (ratio) {
        sp.t.assign(K, Subproblem::npos);
        sp.tau.assign(K, Subproblem::npos);
        {
            Assembler::Cone c = A.rsoc("mu_sq", it.mu * it.mu, it.mu * it.mu, 1.0, 1.0);
            const std::size_t mc = A.coord(c, it.mu);
            A.close(c);
            A.fix(c.b, 1.0);
            A.link(mc, sp.mu);
            msq = c.a;
        }
        for (int k = 0; k < K; ++k) {
            const std::string kk = std::to_string(k);
            const double tl = it.tau[k] * it.tau[k];
            tauv[k] = A.var("tau(" + kk + ")", it.tau[k], it.tau[k]);
            sp.tau[k] = tauv[k];
            {
                Assembler::Cone c = A.rsoc("tpow(" + kk + ")", tl, tl, 1.0, 1.0);
                const std::size_t tc = A.coord(c, it.tau[k]);
                A.close(c);
                A.fix(c.b, 1.0);
                A.link(tc, tauv[k]);
                sp.t[k] = c.a;
            }
            {
                Assembler::Cone c = A.rsoc("recip_tau(" + kk + ")", 1.0 / it.tau[k],
                                           1.0 / it.tau[k], it.tau[k], it.tau[k]);
                const std::size_t one = A.coord(c, 1.0);
                A.close(c);
                A.link(c.b, tauv[k]);
                A.fix(one, 1.0);
                recip[k] = c.a;
            }
            // Consumed power must fit under tau: inner transmit-power
            // over-estimate divided by the amplifier efficiency plus the
            // static dissipation.
            {
                const PowerInner& pw = powers[k];
                const std::size_t r = A.row(-(cfg.M * cfg.P_A + cfg.P_c));
                A.term(r, pe[k], 1.0 / cfg.xi);
                A.term(r, qi[k], 1.0 / cfg.xi);
                for (int n1 = 0; n1 < N1; ++n1)
                    A.re_inner(r, sp.xE[k][n1], pw.xE_l[n1], -2.0 / (cfg.xi * it.mu));
                A.term(r, sp.mu, pw.xE_norm_l / (cfg.xi * it.mu * it.mu));
                A.term(r, tauv[k], -1.0);
                const double used = it.gbar[k] / cfg.xi + cfg.M * cfg.P_A + cfg.P_c;
                A.slack(r, "tau_floor(" + kk + ")", it.tau[k], it.tau[k] - used);
            }
            // Trust region on t.
            {
                const double cap = 3.0 * tl;
                const double delta = 1e-9 * std::max(1.0, cap);
                const std::size_t r = A.row(cap - delta);
                A.term(r, sp.t[k], 1.0);
                A.slack(r, "t_trust(" + kk + ")", tl, cap - delta - tl);
            }
        }
    }

    // Per-user bound machinery.
    std::vector<std::vector<std::size_t>> sv(K, std::vector<std::size_t>(N, Subproblem::npos));
    for (int k = 0; k < K; ++k) {
        for (int n = 0; n < N; ++n) {
            const std::size_t idx = static_cast<std::size_t>(k) * N + n;
            const std::string kn = "(" + std::to_string(k) + "," + std::to_string(n) + ")";
            const RateMinorant& m = f1m[idx];
            const Vec& h_own = cs.h[k][k][n];
            const double margin = m.d * m.phi_expansion;
            const bool active = is_active(idx);

            if (active) {
                // Interference-over-nu epigraph F99: F * nu >= phi(x).
                const double uF = m.phi_expansion / m.nu_expansion;
                Assembler::Cone c = A.rsoc("phi" + kn, uF, uF, m.nu_expansion, m.nu_expansion);
                sp.F[k][n] = c.a;
                sp.nu[k][n] = c.b;
                const std::size_t sig = A.coord(c, sigma);
                std::vector<std::pair<std::size_t, std::pair<int, int>>> pairs;
                std::vector<std::pair<std::size_t, std::pair<int, int>>> masses;
                for (int kb = 0; kb < K; ++kb)
                    for (int nb = 0; nb < N; ++nb) {
                        if (kb == k && nb == n) continue;
                        const std::complex<double> v =
                            cs.h[kb][k][n].dot(it.x.xI[kb][nb]);
                        pairs.push_back({A.coord(c, v.real()), {kb, nb}});
                        A.coord(c, v.imag());
                    }
                for (int kb = 0; kb < K; ++kb)
                    for (int nb = 0; nb < N; ++nb) {
                        if (kb == k && nb == n) continue;
                        const double eps = cs.eps_ue[kb][k][n];
                        if (!(eps > 0.0)) continue;
                        masses.push_back(
                            {A.coord(c, std::sqrt(eps) * it.x.xI[kb][nb].norm()), {kb, nb}});
                    }
                A.close(c);
                A.fix(sig, sigma);
                for (const auto& [j, kb_nb] : pairs) {
                    const Vec& hx = cs.h[kb_nb.first][k][n];
                    std::size_t r = A.row(0.0);
                    A.term(r, j, 1.0);
                    A.re_inner(r, sp.xI[kb_nb.first][kb_nb.second], hx, -1.0);
                    r = A.row(0.0);
                    A.term(r, j + 1, 1.0);
                    A.im_inner(r, sp.xI[kb_nb.first][kb_nb.second], hx, -1.0);
                }
                for (const auto& [j, kb_nb] : masses)
                    A.link(j, nI[kb_nb.first][kb_nb.second],
                           std::sqrt(cs.eps_ue[kb_nb.first][k][n]));

                // nu floor.
                {
                    const std::size_t r = A.row(m.floor);
                    A.term(r, sp.nu[k][n], 1.0);
                    A.slack(r, "nu_floor" + kn, m.nu_expansion, m.nu_expansion - m.floor,
                            -1.0);
                }
                // Own-beam uncertainty mass and the nu cap row.
                std::size_t tq = Subproblem::npos;
                if (m.eps > 0.0) {
                    const double tq0 = m.eps * it.x.xI[k][n].squaredNorm();
                    Assembler::Cone cq = A.rsoc("own_mass" + kn,
                                                guard_unit(tq0, 1e-6 * m.eps * cfg.Pk_max),
                                                tq0, 1.0, 1.0);
                    const std::size_t cc =
                        A.coord(cq, std::sqrt(m.eps) * it.x.xI[k][n].norm());
                    A.close(cq);
                    A.fix(cq.b, 1.0);
                    A.link(cc, nI[k][n], std::sqrt(m.eps));
                    tq = cq.a;
                }
                {
                    const std::size_t r = A.row(-m.re_expansion * m.re_expansion);
                    A.term(r, sp.nu[k][n], 1.0);
                    if (tq != Subproblem::npos) A.term(r, tq, 1.0);
                    A.re_inner(r, sp.xI[k][n], h_own, -2.0 * m.re_expansion);
                    A.slack(r, "nu_cap" + kn, guard_unit(margin, 1e-30),
                            margin - m.nu_expansion);
                }
            }

            // Aligned inner product stays real nonnegative.
            {
                const std::size_t r = A.row(0.0);
                A.re_inner(r, sp.xI[k][n], h_own, 1.0);
                A.slack(r, "aligned" + kn, h_own.norm() * std::sqrt(cfg.Pk_max),
                        h_own.dot(it.x.xI[k][n]).real(), -1.0);
            }

            std::size_t e_mass = Subproblem::npos;
            if (with_ev) {
                const EvRateMajorant& Mj = f2M[idx];
                // Leakage-over-gamma epigraph: s * gamma >= S(x).
                {
                    Assembler::Cone c =
                        A.rsoc("leak" + kn, guard_unit(Mj.s_expansion, 1e-6), Mj.s_expansion,
                               Mj.gamma_expansion, Mj.gamma_expansion);
                    sp.s[k][n] = c.a;
                    sp.gamma[k][n] = c.b;
                    const Mat& Hv = cs.Hev[k][k];
                    std::vector<std::size_t> pairs;
                    for (int j = 0; j < cfg.N_ev; ++j) {
                        const std::complex<double> v = Hv.col(j).dot(it.x.xI[k][n]);
                        pairs.push_back(A.coord(c, v.real()));
                        A.coord(c, v.imag());
                    }
                    std::size_t mass = Subproblem::npos;
                    if (Mj.eps_ev > 0.0)
                        mass = A.coord(c, std::sqrt(Mj.eps_ev) * it.x.xI[k][n].norm());
                    A.close(c);
                    for (int j = 0; j < cfg.N_ev; ++j) {
                        const Vec col = Hv.col(j);
                        std::size_t r = A.row(0.0);
                        A.term(r, pairs[static_cast<std::size_t>(j)], 1.0);
                        A.re_inner(r, sp.xI[k][n], col, -1.0);
                        r = A.row(0.0);
                        A.term(r, pairs[static_cast<std::size_t>(j)] + 1, 1.0);
                        A.im_inner(r, sp.xI[k][n], col, -1.0);
                    }
                    if (mass != Subproblem::npos)
                        A.link(mass, nI[k][n], std::sqrt(Mj.eps_ev));
                }
                // beta >= gamma^2.
                {
                    const double g2 = Mj.gamma_expansion * Mj.gamma_expansion;
                    Assembler::Cone c = A.rsoc("betasq" + kn, g2, g2, 1.0, 1.0);
                    const std::size_t gc = A.coord(c, Mj.gamma_expansion);
                    A.close(c);
                    A.fix(c.b, 1.0);
                    A.link(gc, sp.gamma[k][n]);
                    sp.beta[k][n] = c.a;
                }
                // Interfering-information uncertainty mass over (mu - 1).
                {
                    double ei0 = 0.0;
                    bool any = false;
                    for (int kb = 0; kb < K; ++kb) {
                        if (!(cs.eps_ev[kb][k] > 0.0)) continue;
                        for (int nb = 0; nb < N; ++nb) {
                            if (kb == k && nb == n) continue;
                            any = true;
                            ei0 += cs.eps_ev[kb][k] * it.x.xI[kb][nb].squaredNorm();
                        }
                    }
                    if (any) {
                        Assembler::Cone c =
                            A.rsoc("ev_intf_mass" + kn, guard_unit(ei0 / ml, 1e-12),
                                   ei0 / ml, ml, ml);
                        std::vector<std::pair<std::size_t, std::pair<int, int>>> coords;
                        for (int kb = 0; kb < K; ++kb) {
                            const double eps = cs.eps_ev[kb][k];
                            if (!(eps > 0.0)) continue;
                            for (int nb = 0; nb < N; ++nb) {
                                if (kb == k && nb == n) continue;
                                coords.push_back(
                                    {A.coord(c, std::sqrt(eps) * it.x.xI[kb][nb].norm()),
                                     {kb, nb}});
                            }
                        }
                        A.close(c);
                        A.link(c.b, sp.mu, 1.0, -1.0);
                        for (const auto& [j, kb_nb] : coords)
                            A.link(j, nI[kb_nb.first][kb_nb.second],
                                   std::sqrt(cs.eps_ev[kb_nb.first][k]));
                        e_mass = c.a;
                    }
                }
                // Floor split row tying beta to the linearized floor.
                {
                    const FloorLinearization& fl = floors[idx];
                    const double g = fl.gamma_l * ml;
                    const double c_mu =
                        (fl.intf_norm_l + cfg.N_ev * cfg.sigma_a2) / (ml * ml);
                    const double rhs = -fl.jam_norm_l + fl.intf_norm_l / (ml * ml) +
                                       cfg.N_ev * cfg.sigma_a2 *
                                           (1.0 + 2.0 / ml + 1.0 / (ml * ml));
                    const std::size_t r = A.row(rhs);
                    A.term(r, sp.beta[k][n], 0.5 / g);
                    A.term(r, rsq, 0.5 * g);
                    if (e_mass != Subproblem::npos) A.term(r, e_mass, 1.0);
                    if (ee[k] != Subproblem::npos) A.term(r, ee[k], 1.0);
                    for (int kb = 0; kb < K; ++kb)
                        for (int nb = 0; nb < N1; ++nb)
                            A.re_inner(r, sp.xE[kb][nb],
                                       fl.jam_w[static_cast<std::size_t>(kb) * N1 + nb],
                                       -2.0);
                    for (int kb = 0; kb < K; ++kb)
                        for (int nb = 0; nb < N; ++nb)
                            A.re_inner(r, sp.xI[kb][nb],
                                       fl.intf_w[static_cast<std::size_t>(kb) * N + nb],
                                       -2.0 / ml);
                    A.term(r, sp.mu, c_mu);
                    const double slack0 =
                        floor_lin_value(fl, cs, it.x, it.mu, cfg) -
                        floor_constraint_lhs(fl, fl.gamma_l * fl.gamma_l, it.mu);
                    A.slack(r, "ev_floor" + kn, fl.gamma_l / ml, slack0);
                }
            }

            // Ratio-kind leakage chain: v^2 <= t*beta, sv * v >= S(x).
            if (ratio) {
                const SeeEvMajorant& Pj = psis[idx];
                const double tl = Pj.t_l;
                const double v0 = Pj.tau_l * Pj.gamma_expansion;
                const std::size_t v_master = A.var("v" + kn, v0, v0);
                {
                    Assembler::Cone c =
                        A.rsoc("vsq" + kn, tl, tl,
                               Pj.gamma_expansion * Pj.gamma_expansion,
                               Pj.gamma_expansion * Pj.gamma_expansion);
                    const std::size_t vc = A.coord(c, v0);
                    A.close(c);
                    A.link(c.a, sp.t[k]);
                    A.link(c.b, sp.beta[k][n]);
                    A.link(vc, v_master);
                }
                {
                    const double sv0 = Pj.s_expansion / Pj.tau_l;
                    Assembler::Cone c =
                        A.rsoc("ratio_leak" + kn, guard_unit(sv0, 1e-9), sv0, v0, v0);
                    const Mat& Hv = cs.Hev[k][k];
                    std::vector<std::size_t> pairs;
                    for (int j = 0; j < cfg.N_ev; ++j) {
                        const std::complex<double> v = Hv.col(j).dot(it.x.xI[k][n]);
                        pairs.push_back(A.coord(c, v.real()));
                        A.coord(c, v.imag());
                    }
                    std::size_t mass = Subproblem::npos;
                    if (Pj.eps_ev > 0.0)
                        mass = A.coord(c, std::sqrt(Pj.eps_ev) * it.x.xI[k][n].norm());
                    A.close(c);
                    A.link(c.b, v_master);
                    for (int j = 0; j < cfg.N_ev; ++j) {
                        const Vec col = Hv.col(j);
                        std::size_t r = A.row(0.0);
                        A.term(r, pairs[static_cast<std::size_t>(j)], 1.0);
                        A.re_inner(r, sp.xI[k][n], col, -1.0);
                        r = A.row(0.0);
                        A.term(r, pairs[static_cast<std::size_t>(j)] + 1, 1.0);
                        A.im_inner(r, sp.xI[k][n], col, -1.0);
                    }
                    if (mass != Subproblem::npos)
                        A.link(mass, nI[k][n], std::sqrt(Pj.eps_ev));
                    sv[k][n] = c.a;
                }
            }

            // Per-user objective / QoS rows.
            const double user_bound0 = val0[idx];
            if (!ratio) {
                double rhs = active ? m.a : 0.0;
                const std::size_t r =
                    A.row(with_ev
                              ? rhs - f2M[idx].f2_expansion +
                                    f2M[idx].slope * f2M[idx].s_expansion
                              : rhs);
                A.term(r, sp.objective_var, 1.0);
                if (active) {
                    A.term(r, sp.F[k][n], m.b);
                    A.term(r, sp.mu, m.c);
                }
                if (with_ev) A.term(r, sp.s[k][n], f2M[idx].slope);
                A.slack(r, "objective" + kn, guard_unit(rhs, 1.0), user_bound0 - obj0);
            } else {
                const double rhs = (active ? m.a : 0.0) - f2M[idx].f2_expansion +
                                   f2M[idx].slope * f2M[idx].s_expansion - cfg.r_qos;
                const std::size_t r = A.row(rhs);
                if (active) {
                    A.term(r, sp.F[k][n], m.b);
                    A.term(r, sp.mu, m.c);
                }
                A.term(r, sp.s[k][n], f2M[idx].slope);
                A.slack(r, "qos" + kn, guard_unit(rhs, 1.0), user_bound0 - cfg.r_qos);
            }
        }
    }

    // Ratio-kind per-cell objective rows.
    if (ratio) {
        for (int k = 0; k < K; ++k) {
            const std::string kk = std::to_string(k);
            double rhs = 0.0, c_msq = 0.0, c_t = 0.0, c_recip = 0.0, cell0 = 0.0;
            for (int n = 0; n < N; ++n) {
                const std::size_t idx = static_cast<std::size_t>(k) * N + n;
                const SeeRateMinorant& Ph = phis[idx];
                const SeeEvMajorant& Pj = psis[idx];
                rhs += Ph.A + 3.0 * Pj.slope * Pj.s_expansion / (2.0 * Pj.tau_l);
                c_msq += Ph.C * Ph.tau_l / (2.0 * Ph.mu_l);
                c_t += Ph.C * Ph.mu_l / (2.0 * Ph.tau_l) +
                       Pj.slope * Pj.s_expansion / (2.0 * Pj.tau_l * Pj.t_l);
                c_recip += Pj.f2_expansion;
                cell0 += val0[idx];
            }
            cell0 /= it.tau[k];
            const std::size_t r = A.row(rhs);
            A.term(r, sp.objective_var, 1.0);
            for (int n = 0; n < N; ++n) {
                const std::size_t idx = static_cast<std::size_t>(k) * N + n;
                if (phis[idx].active()) A.term(r, sp.F[k][n], phis[idx].B);
                A.term(r, sv[k][n], psis[idx].slope);
            }
            A.term(r, msq, c_msq);
            A.term(r, sp.t[k], c_t);
            A.term(r, recip[k], c_recip);
            A.slack(r, "cell_objective(" + kk + ")", guard_unit(cell0, 1e-2), cell0 - obj0);
        }
    }

    // Transmit-power budgets (inner form).
    for (int k = 0; k < K; ++k) {
        const PowerInner& pw = powers[k];
        const std::size_t r = A.row(cfg.Pk_max);
        A.term(r, pe[k], 1.0);
        A.term(r, qi[k], 1.0);
        for (int n1 = 0; n1 < N1; ++n1)
            A.re_inner(r, sp.xE[k][n1], pw.xE_l[n1], -2.0 / it.mu);
        A.term(r, sp.mu, pw.xE_norm_l / (it.mu * it.mu));
        A.slack(r, "cell_power(" + std::to_string(k) + ")", cfg.Pk_max,
                cfg.Pk_max - it.gbar[k]);
    }
    {
        const PowerInner& nw = powers[static_cast<std::size_t>(K)];
        const std::size_t r = A.row(cfg.P_max);
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
            A.term(r, pe[k], 1.0);
            A.term(r, qi[k], 1.0);
            total += it.gbar[k];
            for (int n1 = 0; n1 < N1; ++n1)
                A.re_inner(r, sp.xE[k][n1],
                           nw.xE_l[static_cast<std::size_t>(k) * N1 + n1], -2.0 / it.mu);
        }
        A.term(r, sp.mu, nw.xE_norm_l / (it.mu * it.mu));
        A.slack(r, "network_power", cfg.P_max, cfg.P_max - total);
    }

    // Harvested-energy thresholds (linearized inner form).
    for (const EhInner& e : ehs) {
        const std::string kn =
            "(" + std::to_string(e.k) + "," + std::to_string(e.n1) + ")";
        const std::size_t r =
            A.row(e.e_min_over_zeta - cfg.sigma_a2 + e.lin_norm_l);
        for (int kb = 0; kb < K; ++kb)
            for (int nb = 0; nb < N1; ++nb)
                A.re_inner(r, sp.xE[kb][nb],
                           e.lin_w[static_cast<std::size_t>(kb) * N1 + nb], 2.0);
        A.term(r, rho, -e.e_min_over_zeta);
        const double slack0 = eh_inner_lhs(e, it.x, cfg) - eh_inner_rhs(e, it.mu);
        // Feasibility bar and slack unit follow the requirement at the current
        // mu (with its 1/(mu-1) amplification), matching the audit's scaling;
        // a bare e_min-sized bar rejects steps that are tight to solver
        // precision on an active harvest constraint.
        A.slack(r, "harvest" + kn,
                std::max({eh_inner_rhs(e, it.mu), e.e_min_over_zeta, cfg.sigma_a2}),
                slack0, -1.0);
    }

    A.normalize_rows();
    sp.program = std::move(A.program);
    sp.units = std::move(A.units);
    sp.expansion_z = std::move(A.z0);
    conic::validate_program(sp.program);
    return sp;
}

// Shared constraint set of the initializer programs: per-beam caps, the SOC
// rate cuts at the configured floor, and exact power budgets at the fixed mu.
inline void init_common(Assembler& A, Subproblem& sp, const ChannelSet& cs,
                        const NetworkConfig& cfg, double mu0, const BeamformerSet& ref,
                        std::vector<std::vector<std::size_t>>& nE,
                        std::vector<std::vector<std::size_t>>& nI) {
    const int K = cfg.K, N = cfg.N_k, N1 = cfg.N1_k;
    const double sigma = std::sqrt(cfg.sigma_a2);
    build_beams(A, sp, ref, cfg, nE, nI);

    const double chi = std::sqrt(std::expm1(cfg.r_min * mu0));
    for (int k = 0; k < K; ++k)
        for (int n = 0; n < N; ++n) {
            const std::string kn = "(" + std::to_string(k) + "," + std::to_string(n) + ")";
            const Vec& h_own = cs.h[k][k][n];
            const double uT =
                guard_unit(h_own.norm() * std::sqrt(cfg.Pk_max), 1e-12);
            Assembler::Cone c =
                A.soc("rate" + kn, uT, h_own.dot(ref.xI[k][n]).real() / chi);
            const std::size_t sig = A.coord(c, sigma);
            std::vector<std::pair<std::size_t, std::pair<int, int>>> pairs;
            for (int kb = 0; kb < K; ++kb)
                for (int nb = 0; nb < N; ++nb) {
                    if (kb == k && nb == n) continue;
                    const std::complex<double> v = cs.h[kb][k][n].dot(ref.xI[kb][nb]);
                    pairs.push_back({A.coord(c, v.real()), {kb, nb}});
                    A.coord(c, v.imag());
                }
            A.close(c);
            A.fix(sig, sigma);
            for (const auto& [j, kb_nb] : pairs) {
                const Vec& hx = cs.h[kb_nb.first][k][n];
                std::size_t r = A.row(0.0);
                A.term(r, j, 1.0);
                A.re_inner(r, sp.xI[kb_nb.first][kb_nb.second], hx, -1.0);
                r = A.row(0.0);
                A.term(r, j + 1, 1.0);
                A.im_inner(r, sp.xI[kb_nb.first][kb_nb.second], hx, -1.0);
            }
            {
                const std::size_t r = A.row(0.0);
                A.term(r, c.a, 1.0);
                A.re_inner(r, sp.xI[k][n], h_own, -1.0 / chi);
            }
        }

    // Exact transmit-power budgets at the fixed mu.
    std::vector<std::size_t> pe(K), qi(K);
    std::vector<double> cell0(K, 0.0);
    for (int k = 0; k < K; ++k) {
        double pe0 = 0.0, qi0 = 0.0;
        for (int n1 = 0; n1 < N1; ++n1) pe0 += ref.xE[k][n1].squaredNorm();
        for (int n = 0; n < N; ++n) qi0 += ref.xI[k][n].squaredNorm();
        {
            Assembler::Cone c = A.rsoc("pe(" + std::to_string(k) + ")",
                                       guard_unit(pe0, 1e-9 * cfg.Pk_max), pe0, 1.0, 1.0);
            std::vector<std::size_t> coords(static_cast<std::size_t>(N1));
            for (int n1 = 0; n1 < N1; ++n1)
                coords[static_cast<std::size_t>(n1)] = A.coord(c, ref.xE[k][n1].norm());
            A.close(c);
            A.fix(c.b, 1.0);
            for (int n1 = 0; n1 < N1; ++n1)
                A.link(coords[static_cast<std::size_t>(n1)], nE[k][n1]);
            pe[k] = c.a;
        }
        {
            Assembler::Cone c = A.rsoc("qi(" + std::to_string(k) + ")",
                                       guard_unit(qi0, 1e-9 * cfg.Pk_max), qi0, 1.0, 1.0);
            std::vector<std::size_t> coords(static_cast<std::size_t>(N));
            for (int n = 0; n < N; ++n)
                coords[static_cast<std::size_t>(n)] = A.coord(c, ref.xI[k][n].norm());
            A.close(c);
            A.fix(c.b, 1.0);
            for (int n = 0; n < N; ++n)
                A.link(coords[static_cast<std::size_t>(n)], nI[k][n]);
            qi[k] = c.a;
        }
        cell0[k] = (1.0 - 1.0 / mu0) * pe0 + qi0 / mu0;
        const std::size_t r = A.row(cfg.Pk_max);
        A.term(r, pe[k], 1.0 - 1.0 / mu0);
        A.term(r, qi[k], 1.0 / mu0);
        A.slack(r, "cell_power(" + std::to_string(k) + ")", cfg.Pk_max,
                cfg.Pk_max - cell0[k]);
    }
    {
        const std::size_t r = A.row(cfg.P_max);
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
            A.term(r, pe[k], 1.0 - 1.0 / mu0);
            A.term(r, qi[k], 1.0 / mu0);
            total += cell0[k];
        }
        A.slack(r, "network_power", cfg.P_max, cfg.P_max - total);
    }
}

} // namespace detail

inline Subproblem assemble_secrecy_subproblem(const Iterate& it, const ChannelSet& cs,
                                              const NetworkConfig& cfg) {
    return detail::assemble_sca_subproblem(SubproblemKind::Secrecy, it, cs, cfg);
}

inline Subproblem assemble_secrecy_noeve_subproblem(const Iterate& it, const ChannelSet& cs,
                                                    const NetworkConfig& cfg) {
    return detail::assemble_sca_subproblem(SubproblemKind::SecrecyNoEve, it, cs, cfg);
}

inline Subproblem assemble_see_subproblem(const Iterate& it, const ChannelSet& cs,
                                          const NetworkConfig& cfg) {
    return detail::assemble_sca_subproblem(SubproblemKind::EnergyEfficiency, it, cs, cfg);
}

// Initializer phase 1: maximize the minimum over zone-1 UEs of the aligned
// energy-beam amplitude margin against the harvest threshold at mu0. The
// reference beams provide the scaling/reference point and must respect the
// power budgets at mu0; they need not satisfy the SOC rate cuts.
inline Subproblem assemble_init_beamgain(const ChannelSet& cs, const NetworkConfig& cfg,
                                         double mu0, const BeamformerSet& reference) {
    if (!(mu0 > 1.0)) throw std::invalid_argument("mu0 must be > 1");
    detail::Assembler A;
    Subproblem sp;
    sp.kind = SubproblemKind::InitBeamGain;
    sp.fixed_mu = mu0;
    std::vector<std::vector<std::size_t>> nE, nI;
    detail::init_common(A, sp, cs, cfg, mu0, reference, nE, nI);

    const double thr = std::sqrt(cfg.e_min / (cfg.zeta * (1.0 - 1.0 / mu0)));
    const double scale = std::max(thr, std::sqrt(cfg.sigma_a2));
    double obj0 = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> margin(cfg.K, std::vector<double>(cfg.N1_k, 0.0));
    for (int k = 0; k < cfg.K; ++k)
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
            margin[k][n1] = cs.h[k][k][n1].dot(reference.xE[k][n1]).real() - thr;
            obj0 = std::min(obj0, margin[k][n1]);
        }
    sp.objective_var = A.var("objective", detail::guard_unit(obj0, scale), obj0);
    A.maximize(sp.objective_var);
    for (int k = 0; k < cfg.K; ++k)
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
            const std::size_t r = A.row(-thr);
            A.term(r, sp.objective_var, 1.0);
            A.re_inner(r, sp.xE[k][n1], cs.h[k][k][n1], -1.0);
            A.slack(r, "beam_gain(" + std::to_string(k) + "," + std::to_string(n1) + ")",
                    scale, margin[k][n1] - obj0);
        }

    A.normalize_rows();
    sp.program = std::move(A.program);
    sp.units = std::move(A.units);
    sp.expansion_z = std::move(A.z0);
    conic::validate_program(sp.program);
    return sp;
}

// Initializer phase 2: maximize the minimum over zone-1 UEs of the harvest
// margin linearized around the incumbent energy beams (which also provide the
// reference point), under the same constraint set as phase 1. A positive
// optimum certifies the linearized harvested-energy constraint at mu0.
inline Subproblem assemble_init_harvest(const ChannelSet& cs, const NetworkConfig& cfg,
                                        double mu0, const BeamformerSet& incumbent) {
    if (!(mu0 > 1.0)) throw std::invalid_argument("mu0 must be > 1");
    detail::Assembler A;
    Subproblem sp;
    sp.kind = SubproblemKind::InitHarvest;
    sp.fixed_mu = mu0;
    std::vector<std::vector<std::size_t>> nE, nI;
    detail::init_common(A, sp, cs, cfg, mu0, incumbent, nE, nI);

    Iterate shell;
    shell.x = incumbent;
    shell.mu = mu0;
    const std::vector<EhInner> ehs = inner_eh_constraint(shell, cs, cfg);

    double obj0 = std::numeric_limits<double>::infinity();
    std::vector<double> margin(ehs.size(), 0.0);
    for (std::size_t i = 0; i < ehs.size(); ++i) {
        margin[i] = eh_inner_lhs(ehs[i], incumbent, cfg) - eh_inner_rhs(ehs[i], mu0);
        obj0 = std::min(obj0, margin[i]);
    }
    const double scale = std::max(cfg.e_min / cfg.zeta, cfg.sigma_a2);
    sp.objective_var = A.var("objective", detail::guard_unit(obj0, scale), obj0);
    A.maximize(sp.objective_var);
    for (std::size_t i = 0; i < ehs.size(); ++i) {
        const EhInner& e = ehs[i];
        const std::size_t r = A.row(-e.lin_norm_l - eh_inner_rhs(e, mu0));
        A.term(r, sp.objective_var, 1.0);
        for (int kb = 0; kb < cfg.K; ++kb)
            for (int nb = 0; nb < cfg.N1_k; ++nb)
                A.re_inner(r, sp.xE[kb][nb],
                           e.lin_w[static_cast<std::size_t>(kb) * cfg.N1_k + nb], -2.0);
        A.slack(r, "harvest_gain(" + std::to_string(e.k) + "," + std::to_string(e.n1) + ")",
                scale, margin[i] - obj0);
    }

    A.normalize_rows();
    sp.program = std::move(A.program);
    sp.units = std::move(A.units);
    sp.expansion_z = std::move(A.z0);
    conic::validate_program(sp.program);
    return sp;
}

// Maps a solver answer back to physical beams, mu, and the objective value.
inline Extraction extract_solution(const Subproblem& sp, const conic::SolveResult& res,
                                   const NetworkConfig& cfg) {
    if (static_cast<std::size_t>(res.z.size()) != sp.program.variable_count())
        throw std::invalid_argument("solution size does not match the program");
    Extraction out;
    out.x.xE.assign(cfg.K, std::vector<Vec>(cfg.N1_k, Vec::Zero(cfg.M)));
    out.x.xI.assign(cfg.K, std::vector<Vec>(cfg.N_k, Vec::Zero(cfg.M)));
    auto read_beam = [&](std::size_t first, Vec& v) {
        for (int i = 0; i < cfg.M; ++i)
            v(i) = {sp.value(res.z, first + 2 * static_cast<std::size_t>(i)),
                    sp.value(res.z, first + 2 * static_cast<std::size_t>(i) + 1)};
    };
    for (int k = 0; k < cfg.K; ++k) {
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) read_beam(sp.xE[k][n1], out.x.xE[k][n1]);
        for (int n = 0; n < cfg.N_k; ++n) read_beam(sp.xI[k][n], out.x.xI[k][n]);
    }
    out.mu = sp.mu == Subproblem::npos ? sp.fixed_mu : sp.value(res.z, sp.mu);
    out.objective = sp.value(res.z, sp.objective_var);
    return out;
}

} // namespace secbeam::sca
