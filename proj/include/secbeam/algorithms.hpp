#pragma once

// Path-following drivers on top of the subproblem layer:
//
//   initialize_secrecy  builds a feasible starting point by maximizing the
//                       worst energy-beam margin, then the worst linearized
//                       harvest margin, over a schedule of time-split values;
//   run_secrecy         iterates the max-min secrecy step to convergence;
//   run_secrecy_noeve   the same with the leakage term forced to zero;
//   initialize_see      adds the per-user rate floor to the starting point;
//   run_see             iterates the max-min efficiency step.
//
// Every iteration solves one cone program, re-audits the KKT conditions at a
// multiple of the solver tolerance, and re-expands at the extracted point; the
// recorded per-iteration objective is always recomputed from the metric
// definitions, never read back from the solver. Traces are serializable to
// JSON and CSV for the experiment harness.

#include <chrono>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "secbeam/config.hpp"
#include "secbeam/conic/certify.hpp"
#include "secbeam/conic/solver.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/model.hpp"
#include "secbeam/sca/expansion.hpp"
#include "secbeam/sca/subproblem.hpp"
#include "secbeam/units.hpp"

namespace secbeam::alg {

// ---------------------------------------------------------------------------
// Settings, traces, errors
// ---------------------------------------------------------------------------

struct RunSettings {
    // Stop when the relative true-objective change stays below rel_tol for
    // `consecutive` iterations. The path-following tail contracts linearly
    // (~3%/iteration on dense small-cell draws), so the default detects the
    // plateau at roughly plotting resolution (1e-3 of a ~2 bit objective)
    // rather than grinding out digits far below the cross-seed spread.
    double rel_tol = 1e-3;       // relative true-objective change per step
    int consecutive = 2;         // small-change streak required to stop
    int max_iterations = 100;
    double solver_tol = 1e-8;
    double certify_factor = 10.0; // KKT re-audit at certify_factor * solver_tol
    double audit_tol = 1e-6;      // feasibility audits of realized points
};

struct IterationRecord {
    int iter = 0;
    double true_objective = 0.0;        // recomputed metric value, nats
    double subproblem_objective = 0.0;  // certified bound value, nats
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    double seconds = 0.0;
};

struct RunTrace {
    std::string mode;  // "secrecy", "secrecy-noeve", "see"
    std::vector<IterationRecord> iterations;
    sca::Iterate final_iterate;
    std::string termination;  // "converged" or "max-iterations"
    double final_objective = 0.0;  // nats (rate) or nats/joule (efficiency)

    // Efficiency decomposition of the binding cell (efficiency mode only).
    int see_worst_cell = -1;
    double see_numerator = 0.0;    // summed secrecy terms, nats
    double see_denominator = 0.0;  // consumed power, watts

    // Final-point feasibility audit in the original time-split form.
    FeasibilityReport audit;
};

class AlgorithmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Initialization exhausted its schedule; carries the smallest constraint
// shortfall seen (relative scale, 0 means a feasible point existed but the
// expansion machinery rejected it).
class InitializationError : public AlgorithmError {
public:
    InitializationError(const std::string& what, double shortfall)
        : AlgorithmError(what), best_shortfall(shortfall) {}
    double best_shortfall;
};

// A subproblem failed to solve or certify mid-run; carries the trace of all
// completed iterations.
class SolveFailure : public AlgorithmError {
public:
    SolveFailure(const std::string& what, RunTrace t)
        : AlgorithmError(what), trace(std::move(t)) {}
    RunTrace trace;
};

// ---------------------------------------------------------------------------
// True objective values from an iterate's caches (the caches are recomputed
// from the metric definitions on every re-expansion)
// ---------------------------------------------------------------------------

inline double worst_secrecy_value(const sca::Iterate& it, const NetworkConfig& cfg) {
    double w = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n)
            w = std::min(w, it.f1[k][n] / it.mu - (it.has_ev ? it.f2bar[k][n] : 0.0));
    return w;
}

inline int worst_efficiency_cell(const sca::Iterate& it, const NetworkConfig& cfg) {
    int worst = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.K; ++k) {
        double num = 0.0;
        for (int n = 0; n < cfg.N_k; ++n) num += it.f1[k][n] / it.mu - it.f2bar[k][n];
        const double v = num / it.tau[k];
        if (v < best) {
            best = v;
            worst = k;
        }
    }
    return worst;
}

inline double worst_efficiency_value(const sca::Iterate& it, const NetworkConfig& cfg) {
    const int k = worst_efficiency_cell(it, cfg);
    double num = 0.0;
    for (int n = 0; n < cfg.N_k; ++n) num += it.f1[k][n] / it.mu - it.f2bar[k][n];
    return num / it.tau[k];
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

namespace detail {

// Aligned beams sharing one power level chosen to sit inside every transmit
// budget at the fixed time split (90% of the tightest budget).
inline BeamformerSet aligned_reference(const ChannelSet& cs, const NetworkConfig& cfg,
                                       double mu0) {
    const double c1 = (1.0 - 1.0 / mu0) * cfg.N1_k + cfg.N_k / mu0;
    const double p =
        0.9 * std::min({cfg.Pk_max / c1, cfg.P_max / (cfg.K * c1), cfg.Pk_max});
    BeamformerSet x = BeamformerSet::zeros(cfg);
    for (int k = 0; k < cfg.K; ++k) {
        for (int n = 0; n < cfg.N_k; ++n)
            x.xI[k][n] = std::sqrt(p) * cs.h[k][k][n].normalized();
        for (int n1 = 0; n1 < cfg.N1_k; ++n1)
            x.xE[k][n1] = std::sqrt(p) * cs.h[k][k][n1].normalized();
    }
    return x;
}

inline double audit_shortfall(const FeasibilityReport& rep) {
    double worst = 0.0;
    for (const ConstraintCheck& c : rep.checks) worst = std::max(worst, c.worst_violation);
    return worst;
}

} // namespace detail

// Feasible-point construction for the transformed max-min secrecy problem.
// For each candidate time split the worst aligned energy-beam margin is
// maximized first; while the realized point fails the transformed-constraint
// audit, the worst linearized harvest margin is re-maximized around the
// incumbent. The first candidate whose point passes the audit is expanded and
// returned; exhaustion raises InitializationError with the best shortfall.
inline sca::Iterate initialize_secrecy(const ChannelSet& cs, const NetworkConfig& cfg,
                                       const RunSettings& s = {}) {
    static constexpr double schedule[] = {1.11, 1.25, 1.5, 2.0, 4.0};
    constexpr int max_rounds = 30;
    double best_shortfall = std::numeric_limits<double>::infinity();

    for (double mu0 : schedule) {
        BeamformerSet x;
        try {
            const sca::Subproblem sp =
                sca::assemble_init_beamgain(cs, cfg, mu0, detail::aligned_reference(cs, cfg, mu0));
            const conic::SolveResult res = conic::solve(sp.program, s.solver_tol);
            if (res.status != conic::SolveStatus::Optimal) continue;
            x = sca::extract_solution(sp, res, cfg).x;
        } catch (const std::exception&) {
            continue;
        }

        double prev_margin = -std::numeric_limits<double>::infinity();
        for (int round = 0; round <= max_rounds; ++round) {
            const FeasibilityReport audit = feasibility_audit_mu(cs, x, mu0, cfg, s.audit_tol);
            if (audit.all_pass) {
                try {
                    return sca::make_iterate(cs, sca::rotate_phases(x, cs, cfg), mu0, cfg);
                } catch (const sca::ExpansionError&) {
                    best_shortfall = std::min(best_shortfall, 0.0);
                    break;  // degenerate expansion at this split; try the next
                }
            }
            best_shortfall = std::min(best_shortfall, detail::audit_shortfall(audit));
            if (round == max_rounds) break;

            try {
                const sca::Subproblem sp = sca::assemble_init_harvest(cs, cfg, mu0, x);
                const conic::SolveResult res = conic::solve(sp.program, s.solver_tol);
                if (res.status != conic::SolveStatus::Optimal) break;
                // No progress on a still-infeasible margin: the split is hopeless.
                if (res.objective <= 0.0 && res.objective <= prev_margin + 1e-12) break;
                prev_margin = res.objective;
                x = sca::extract_solution(sp, res, cfg).x;
            } catch (const std::exception&) {
                break;
            }
        }
    }

    std::ostringstream msg;
    msg << "initialization exhausted its time-split schedule; best relative constraint "
           "shortfall "
        << best_shortfall;
    throw InitializationError(msg.str(), best_shortfall);
}

// ---------------------------------------------------------------------------
// Path-following driver
// ---------------------------------------------------------------------------

namespace detail {

// Solve and independently re-audit the KKT conditions at certify_factor times
// the configured solver tolerance. The audit normalizes residuals per row and
// per variable, which is stricter than the solver's aggregate termination
// test; when an optimal solve misses the audit bar, re-solve up to two times
// at tighter tolerances before giving up.
inline std::pair<conic::SolveResult, conic::CertifyReport> solve_certified(
    const conic::ConicProgram& program, const RunSettings& s) {
    const double audit_tol = s.certify_factor * s.solver_tol;
    conic::SolveResult res = conic::solve(program, s.solver_tol);
    if (res.status != conic::SolveStatus::Optimal) return {std::move(res), {}};
    conic::CertifyReport cert = conic::certify(program, res, audit_tol);
    for (double tol = s.solver_tol / 10.0; !cert.pass && tol >= s.solver_tol / 100.0;
         tol /= 10.0) {
        conic::SolveResult retry = conic::solve(program, tol);
        if (retry.status != conic::SolveStatus::Optimal) break;
        res = std::move(retry);
        cert = conic::certify(program, res, audit_tol);
    }
    return {std::move(res), std::move(cert)};
}

inline sca::Subproblem assemble_step(sca::SubproblemKind kind, const sca::Iterate& it,
                                     const ChannelSet& cs, const NetworkConfig& cfg) {
    switch (kind) {
    case sca::SubproblemKind::Secrecy: return sca::assemble_secrecy_subproblem(it, cs, cfg);
    case sca::SubproblemKind::SecrecyNoEve:
        return sca::assemble_secrecy_noeve_subproblem(it, cs, cfg);
    case sca::SubproblemKind::EnergyEfficiency:
        return sca::assemble_see_subproblem(it, cs, cfg);
    default: throw AlgorithmError("not an iterative subproblem kind");
    }
}

inline RunTrace run_path(sca::SubproblemKind kind, const ChannelSet& cs,
                         const NetworkConfig& cfg, const sca::Iterate& start,
                         const RunSettings& s) {
    using clock = std::chrono::steady_clock;
    const bool with_ev = kind != sca::SubproblemKind::SecrecyNoEve;
    const bool ratio = kind == sca::SubproblemKind::EnergyEfficiency;

    RunTrace tr;
    tr.mode = ratio ? "see" : (with_ev ? "secrecy" : "secrecy-noeve");
    tr.termination = "max-iterations";

    sca::Iterate cur =
        sca::make_iterate(cs, sca::rotate_phases(start.x, cs, cfg), start.mu, cfg, with_ev);
    auto value = [&](const sca::Iterate& it) {
        return ratio ? worst_efficiency_value(it, cfg) : worst_secrecy_value(it, cfg);
    };
    double prev = value(cur);
    tr.iterations.push_back({0, prev, prev, 0.0, 0.0, 0.0, 0.0});

    int streak = 0;
    for (int iter = 1; iter <= s.max_iterations; ++iter) {
        const auto t0 = clock::now();
        sca::Subproblem sp;
        try {
            sp = assemble_step(kind, cur, cs, cfg);
        } catch (const sca::ExpansionError& e) {
            throw SolveFailure(std::string("subproblem assembly failed: ") + e.what(),
                               std::move(tr));
        }
        const auto [res, cert] = solve_certified(sp.program, s);
        if (res.status != conic::SolveStatus::Optimal)
            throw SolveFailure(std::string("subproblem solve returned ") +
                                   conic::solve_status_name(res.status),
                               std::move(tr));
        if (!cert.pass)
            throw SolveFailure("solution certification failed: " +
                                   (cert.failures.empty() ? std::string("unknown")
                                                          : cert.failures.front()),
                               std::move(tr));

        const sca::Extraction ex = sca::extract_solution(sp, res, cfg);
        if (!(ex.mu > 1.0)) throw SolveFailure("extracted time split out of range", std::move(tr));
        cur = sca::make_iterate(cs, sca::rotate_phases(ex.x, cs, cfg), ex.mu, cfg, with_ev);

        const double truev = value(cur);
        const double seconds =
            std::chrono::duration<double>(clock::now() - t0).count();
        tr.iterations.push_back({iter, truev, res.objective, res.primal_residual,
                                 res.dual_residual, res.gap, seconds});

        const double rel = std::abs(truev - prev) / std::max(std::abs(prev), 1e-9);
        prev = truev;
        if (rel <= s.rel_tol) {
            if (++streak >= s.consecutive) {
                tr.termination = "converged";
                break;
            }
        } else {
            streak = 0;
        }
    }

    tr.final_iterate = cur;
    tr.final_objective = prev;
    if (ratio) {
        tr.see_worst_cell = worst_efficiency_cell(cur, cfg);
        tr.see_numerator = 0.0;
        for (int n = 0; n < cfg.N_k; ++n)
            tr.see_numerator += cur.f1[tr.see_worst_cell][n] / cur.mu -
                                cur.f2bar[tr.see_worst_cell][n];
        tr.see_denominator = cur.tau[tr.see_worst_cell];
    }
    tr.audit = feasibility_audit(cs, cur.x, TimeSplit::from_mu(cur.mu), cfg, s.audit_tol);
    return tr;
}

} // namespace detail

inline RunTrace run_secrecy(const ChannelSet& cs, const NetworkConfig& cfg,
                            const sca::Iterate& start, const RunSettings& s = {}) {
    return detail::run_path(sca::SubproblemKind::Secrecy, cs, cfg, start, s);
}

inline RunTrace run_secrecy(const ChannelSet& cs, const NetworkConfig& cfg,
                            const RunSettings& s = {}) {
    return run_secrecy(cs, cfg, initialize_secrecy(cs, cfg, s), s);
}

inline RunTrace run_secrecy_noeve(const ChannelSet& cs, const NetworkConfig& cfg,
                                  const sca::Iterate& start, const RunSettings& s = {}) {
    return detail::run_path(sca::SubproblemKind::SecrecyNoEve, cs, cfg, start, s);
}

inline RunTrace run_secrecy_noeve(const ChannelSet& cs, const NetworkConfig& cfg,
                                  const RunSettings& s = {}) {
    return run_secrecy_noeve(cs, cfg, initialize_secrecy(cs, cfg, s), s);
}

// Starting point for the efficiency problem: the secrecy starting point,
// advanced by worst-user secrecy steps until every user clears the configured
// rate floor (the floor rows of the efficiency step require it).
inline sca::Iterate initialize_see(const ChannelSet& cs, const NetworkConfig& cfg,
                                   const RunSettings& s = {}) {
    constexpr int max_rounds = 20;
    sca::Iterate it = initialize_secrecy(cs, cfg, s);
    double best = worst_secrecy_value(it, cfg);
    for (int round = 0; round < max_rounds && best < cfg.r_qos; ++round) {
        const sca::Subproblem sp = sca::assemble_secrecy_subproblem(it, cs, cfg);
        const auto [res, cert] = detail::solve_certified(sp.program, s);
        if (res.status != conic::SolveStatus::Optimal || !cert.pass) break;
        const sca::Extraction ex = sca::extract_solution(sp, res, cfg);
        it = sca::make_iterate(cs, sca::rotate_phases(ex.x, cs, cfg), ex.mu, cfg);
        best = worst_secrecy_value(it, cfg);
    }
    if (best < cfg.r_qos) {
        std::ostringstream msg;
        msg << "rate floor " << cfg.r_qos
            << " unreachable during efficiency initialization; best worst-user value "
            << best;
        throw InitializationError(msg.str(), cfg.r_qos - best);
    }
    return it;
}

inline RunTrace run_see(const ChannelSet& cs, const NetworkConfig& cfg,
                        const sca::Iterate& start, const RunSettings& s = {}) {
    return detail::run_path(sca::SubproblemKind::EnergyEfficiency, cs, cfg, start, s);
}

inline RunTrace run_see(const ChannelSet& cs, const NetworkConfig& cfg,
                        const RunSettings& s = {}) {
    return run_see(cs, cfg, initialize_see(cs, cfg, s), s);
}

// ---------------------------------------------------------------------------
// Nominal per-step problem size
// ---------------------------------------------------------------------------

// Closed-form size of one secrecy step in the canonical decision variables
// (complex beams counted once each, plus the shared time split): K-linear and
// independent of channel realizations.
struct ProblemDimensions {
    int variables = 0;
    int linear_constraints = 0;
    int quadratic_constraints = 0;
};

inline ProblemDimensions problem_dimensions(const NetworkConfig& cfg) {
    ProblemDimensions d;
    d.variables = cfg.M * cfg.K * (cfg.N_k + cfg.N1_k) + 1;
    d.linear_constraints = 3 * cfg.K * cfg.N_k + cfg.K * cfg.N1_k + (cfg.K + 1);
    d.quadratic_constraints = 4 * cfg.K * cfg.N_k + 2 * cfg.K * cfg.N1_k + 1;
    return d;
}

// ---------------------------------------------------------------------------
// Trace serialization
// ---------------------------------------------------------------------------

inline nlohmann::json run_trace_to_json(const RunTrace& t) {
    nlohmann::json j;
    j["mode"] = t.mode;
    j["termination"] = t.termination;
    j["iterations_used"] = t.iterations.empty() ? 0 : t.iterations.back().iter;
    j["final_objective_nats"] = t.final_objective;
    j["final_objective_bits"] = nats_to_bits(t.final_objective);
    j["final_mu"] = t.final_iterate.mu;
    j["final_eta"] = 1.0 - 1.0 / t.final_iterate.mu;
    if (t.see_worst_cell >= 0) {
        j["see_worst_cell"] = t.see_worst_cell;
        j["see_numerator_nats"] = t.see_numerator;
        j["see_denominator_watts"] = t.see_denominator;
    }
    j["audit_pass"] = t.audit.all_pass;
    nlohmann::json its = nlohmann::json::array();
    for (const IterationRecord& r : t.iterations) {
        its.push_back({{"iter", r.iter},
                       {"true_obj_nats", r.true_objective},
                       {"true_obj_bits", nats_to_bits(r.true_objective)},
                       {"subproblem_obj", r.subproblem_objective},
                       {"primal_residual", r.primal_residual},
                       {"dual_residual", r.dual_residual},
                       {"gap", r.gap},
                       {"seconds", r.seconds}});
    }
    j["iterations"] = std::move(its);
    return j;
}

inline std::string run_trace_to_csv(const RunTrace& t) {
    std::ostringstream out;
    out.precision(12);
    out << "iter,true_obj_nats,true_obj_bits,subproblem_obj,primal_residual,dual_residual,"
           "gap,seconds\n";
    for (const IterationRecord& r : t.iterations)
        out << r.iter << ',' << r.true_objective << ',' << nats_to_bits(r.true_objective)
            << ',' << r.subproblem_objective << ',' << r.primal_residual << ','
            << r.dual_residual << ',' << r.gap << ',' << r.seconds << '\n';
    return out.str();
}

} // namespace secbeam::alg
