#pragma once

// Independent oracles certifying the bound layer without trusting the
// optimizer:
//
//   tangency_suite    every bound equals its target at its own expansion;
//   domination_suite  sampled points inside each bound's validity region
//                     never cross the claimed side;
//   soundness_suite   points satisfying an inner (approximated) constraint
//                     also satisfy the original constraint it replaces;
//   scalar_battery    the elementary scalar inequalities, sampled over their
//                     stated domains;
//   grid_oracle       exhaustive matched-filter grid search over the time
//                     split and per-beam powers, feasibility checked against
//                     the metric layer only.
//
// All targets are recomputed from the metric layer; the suites never read
// solver output. Sampling protocol: beam perturbations are Gaussian with
// scale 0.1 sqrt(Pk_max), the time split uniform in its trust region.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "secbeam/config.hpp"
#include "secbeam/metrics.hpp"
#include "secbeam/model.hpp"
#include "secbeam/rng.hpp"
#include "secbeam/sca/expansion.hpp"

namespace secbeam::val {

// ---------------------------------------------------------------------------
// Report type
// ---------------------------------------------------------------------------

struct OracleReport {
    std::string name;
    std::size_t samples = 0;
    double max_violation = 0.0;  // relative to the target's scale
    double tolerance = 0.0;
    bool pass = false;  // invariant: pass == (max_violation <= tolerance)
};

inline nlohmann::json oracle_reports_to_json(const std::vector<OracleReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const OracleReport& r : reports)
        arr.push_back({{"name", r.name},
                       {"samples", r.samples},
                       {"max_violation", r.max_violation},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass}});
    bool all = true;
    for (const OracleReport& r : reports) all = all && r.pass;
    return {{"checks", std::move(arr)}, {"all_pass", all}};
}

inline bool all_pass(const std::vector<OracleReport>& reports) {
    for (const OracleReport& r : reports)
        if (!r.pass) return false;
    return !reports.empty();
}

namespace detail {

inline void record(std::vector<OracleReport>& out, std::string name, std::size_t samples,
                   double max_violation, double tol) {
    out.push_back({std::move(name), samples, max_violation, tol, max_violation <= tol});
}

// Accumulate same-name reports (max violation, summed samples).
inline void merge(std::vector<OracleReport>& into, const std::vector<OracleReport>& add) {
    for (const OracleReport& r : add) {
        auto it = std::find_if(into.begin(), into.end(),
                               [&](const OracleReport& o) { return o.name == r.name; });
        if (it == into.end()) {
            into.push_back(r);
        } else {
            it->samples += r.samples;
            it->max_violation = std::max(it->max_violation, r.max_violation);
            it->pass = it->max_violation <= it->tolerance;
        }
    }
}

// Violation of the claim "bound <= target", relative to the larger magnitude
// (with a floor so identical tiny values never divide by zero).
inline double overshoot(double bound, double target, double scale_floor) {
    const double scale = std::max({std::abs(bound), std::abs(target), scale_floor});
    return (bound - target) / scale;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Random expansion points (for the sampled suites)
// ---------------------------------------------------------------------------

// Matched-filter beams with random per-class power shares, a small Gaussian
// perturbation, and a random time split; retried until the expansion
// machinery accepts the point. Used only to generate test expansions.
inline sca::Iterate random_expansion_iterate(const ChannelSet& cs, const NetworkConfig& cfg,
                                             Rng& rng) {
    for (int attempt = 0; attempt < 50; ++attempt) {
        const double info_share = 0.2 + 0.7 * rng.uniform();
        const double energy_share = 0.2 + 0.7 * rng.uniform();
        const double mu = 1.2 + 3.8 * rng.uniform();
        const double pi = info_share * cfg.Pk_max / cfg.N_k;
        const double pe = energy_share * cfg.Pk_max / cfg.N1_k;
        const double jitter = 0.05 * std::sqrt(cfg.Pk_max);
        BeamformerSet x = BeamformerSet::zeros(cfg);
        for (int k = 0; k < cfg.K; ++k) {
            for (int n = 0; n < cfg.N_k; ++n) {
                x.xI[k][n] = std::sqrt(pi) * cs.h[k][k][n].normalized();
                for (int m = 0; m < cfg.M; ++m) x.xI[k][n](m) += jitter * rng.cnormal();
            }
            for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
                x.xE[k][n1] = std::sqrt(pe) * cs.h[k][k][n1].normalized();
                for (int m = 0; m < cfg.M; ++m) x.xE[k][n1](m) += jitter * rng.cnormal();
            }
        }
        try {
            return sca::make_iterate(cs, sca::rotate_phases(x, cs, cfg), mu, cfg);
        } catch (const sca::ExpansionError&) {
            continue;
        }
    }
    throw std::runtime_error("could not draw a valid random expansion point");
}

// ---------------------------------------------------------------------------
// Tangency: every bound equals its target at its own expansion point
// ---------------------------------------------------------------------------

inline std::vector<OracleReport> tangency_suite(const sca::Iterate& it, const ChannelSet& cs,
                                                const NetworkConfig& cfg, double tol = 1e-9) {
    std::vector<OracleReport> out;
    const BeamformerSet& x = it.x;
    const double mu = it.mu;

    {
        double worst = 0.0;
        const auto ms = sca::minorant_f1(it, cs, cfg);
        for (const auto& m : ms) {
            const double b = sca::minorant_value(m, cs, x, mu, cfg);
            const double t =
                std::log1p(std::max(0.0, signal_margin_re(cs, x, cfg, m.k, m.n)) /
                           phi(cs, x, cfg, m.k, m.n)) /
                mu;
            worst = std::max(worst, std::isfinite(b) ? std::abs(b - t) / std::max(1.0, std::abs(t))
                                                     : 1.0);
        }
        detail::record(out, "rate-minorant-tangency", ms.size(), worst, tol);
    }

    {
        double worst = 0.0;
        const auto ms = sca::minorant_f1(it, cs, cfg);
        for (const auto& m : ms) {
            const double b = sca::psi_value(m, cs, x);
            const double re = m.re_expansion;
            worst = std::max(worst, std::abs(b - re * re) / std::max(1.0, re * re));
        }
        detail::record(out, "signal-square-tangency", ms.size(), worst, tol);
    }

    if (it.has_ev) {
        double worst = 0.0;
        const auto ms = sca::majorant_f2(it, cs, cfg);
        for (const auto& m : ms) {
            const double b = sca::ev_term_value(m, cs, x, m.gamma_expansion, cfg);
            const double t = f2_term_mu(cs, x, mu, cfg, m.k, m.n);
            worst = std::max(worst, std::abs(b - t) / std::max(1.0, std::abs(t)));
        }
        detail::record(out, "ev-majorant-tangency", ms.size(), worst, tol);
    }

    if (it.has_ev) {
        double worst_lin = 0.0, worst_split = 0.0;
        const auto fls = sca::floor_linearizations(it, cs, cfg);
        for (const auto& fl : fls) {
            const double target = q_denominator_mu(cs, x, mu, cfg, fl.k, fl.n) / (mu - 1.0);
            const double lin = sca::floor_lin_value(fl, cs, x, mu, cfg);
            worst_lin = std::max(worst_lin, std::abs(lin - target) / std::abs(target));
            const double split =
                sca::floor_constraint_lhs(fl, fl.gamma_l * fl.gamma_l, mu);
            const double direct = fl.gamma_l / (mu - 1.0);
            worst_split = std::max(worst_split, std::abs(split - direct) / std::abs(direct));
        }
        detail::record(out, "floor-linearization-tangency", fls.size(), worst_lin, tol);
        detail::record(out, "floor-split-tangency", fls.size(), worst_split, tol);
    }

    {
        double worst = 0.0;
        const auto ps = sca::inner_power_constraints(it, cfg);
        for (const auto& p : ps) {
            const double b = sca::power_inner_lhs(p, x, mu, cfg);
            const double t = (p.k < 0) ? network_power_mu(x, mu, cfg)
                                       : cell_power_mu(x, mu, cfg, p.k);
            worst = std::max(worst, std::abs(b - t) / std::max(std::abs(t), cfg.Pk_max));
        }
        detail::record(out, "power-inner-tangency", ps.size(), worst, tol);
    }

    {
        double worst = 0.0;
        const auto es = sca::inner_eh_constraint(it, cs, cfg);
        for (const auto& e : es) {
            const double b = sca::eh_inner_lhs(e, x, cfg);
            const double t = harvested_power(cs, x, cfg, e.k, e.n1) - cfg.sigma_a2;
            worst = std::max(worst, std::abs(b - t) / std::max(std::abs(t), cfg.sigma_a2));
        }
        detail::record(out, "harvest-inner-tangency", es.size(), worst, tol);
    }

    {
        double worst = 0.0;
        const auto ms = sca::see_minorant_phi(it, cs, cfg);
        for (const auto& m : ms) {
            const double b =
                sca::see_minorant_value(m, cs, x, mu, m.tau_l * m.tau_l, cfg);
            const double t =
                std::log1p(std::max(0.0, signal_margin_re(cs, x, cfg, m.k, m.n)) /
                           phi(cs, x, cfg, m.k, m.n)) /
                (mu * m.tau_l);
            worst = std::max(worst, std::isfinite(b) ? std::abs(b - t) / std::max(1.0, std::abs(t))
                                                     : 1.0);
        }
        detail::record(out, "ratio-minorant-tangency", ms.size(), worst, tol);
    }

    if (it.has_ev) {
        double worst = 0.0;
        const auto ms = sca::see_majorant_psi(it, cs, cfg);
        for (const auto& m : ms) {
            const double b = sca::see_majorant_value(
                m, cs, x, m.t_l, m.gamma_expansion * m.gamma_expansion, cfg);
            const double t = f2_term_mu(cs, x, mu, cfg, m.k, m.n) / m.tau_l;
            worst = std::max(worst, std::abs(b - t) / std::max(1.0, std::abs(t)));
        }
        detail::record(out, "ratio-majorant-tangency", ms.size(), worst, tol);
    }

    return out;
}

// ---------------------------------------------------------------------------
// Domination: bounds stay on the claimed side over their validity regions
// ---------------------------------------------------------------------------

namespace detail {

inline BeamformerSet perturbed(const BeamformerSet& base, const NetworkConfig& cfg, Rng& rng) {
    const double scale = 0.1 * std::sqrt(cfg.Pk_max);
    BeamformerSet x = base;
    for (int k = 0; k < cfg.K; ++k) {
        for (int n = 0; n < cfg.N_k; ++n)
            for (int m = 0; m < cfg.M; ++m) x.xI[k][n](m) += scale * rng.cnormal();
        for (int n1 = 0; n1 < cfg.N1_k; ++n1)
            for (int m = 0; m < cfg.M; ++m) x.xE[k][n1](m) += scale * rng.cnormal();
    }
    return x;
}

} // namespace detail

inline std::vector<OracleReport> domination_suite(const sca::Iterate& it, const ChannelSet& cs,
                                                  const NetworkConfig& cfg, int n_samples,
                                                  std::uint64_t seed, double tol = 1e-12) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    std::vector<OracleReport> out;
    Rng rng = Rng::stream(seed, 0xD0);

    const auto rate_ms = sca::minorant_f1(it, cs, cfg);
    const auto ev_ms = it.has_ev ? sca::majorant_f2(it, cs, cfg) : std::vector<sca::EvRateMajorant>{};
    const auto fls = it.has_ev ? sca::floor_linearizations(it, cs, cfg)
                               : std::vector<sca::FloorLinearization>{};
    const auto pows = sca::inner_power_constraints(it, cfg);
    const auto ehs = sca::inner_eh_constraint(it, cs, cfg);
    const auto see_ms = sca::see_minorant_phi(it, cs, cfg);
    const auto see_js = it.has_ev ? sca::see_majorant_psi(it, cs, cfg)
                                  : std::vector<sca::SeeEvMajorant>{};

    double w_rate = 0.0, w_ev = 0.0, w_floor_lin = 0.0, w_floor_split = 0.0;
    double w_pow = 0.0, w_eh = 0.0, w_see_min = 0.0, w_see_maj = 0.0;
    std::size_t n_rate = 0, n_ev = 0, n_floor = 0, n_pow = 0, n_eh = 0, n_see_min = 0,
                n_see_maj = 0;

    for (int s = 0; s < n_samples; ++s) {
        const BeamformerSet x = detail::perturbed(it.x, cfg, rng);
        // Time split uniform in the trust region (1, 2 mu_l - 1].
        const double mu = 1.0 + rng.uniform_pos() * (2.0 * it.mu - 2.0);

        for (const auto& m : rate_ms) {
            const double b = sca::minorant_value(m, cs, x, mu, cfg);
            if (!std::isfinite(b)) continue;  // outside the validity region
            const double t =
                std::log1p(std::max(0.0, signal_margin_re(cs, x, cfg, m.k, m.n)) /
                           phi(cs, x, cfg, m.k, m.n)) /
                mu;
            w_rate = std::max(w_rate, detail::overshoot(b, t, 1.0));
            ++n_rate;
        }

        for (const auto& m : ev_ms) {
            const double q = q_denominator_mu(cs, x, mu, cfg, m.k, m.n);
            if (!(q > 0.0)) continue;
            const double gamma = q * rng.uniform_pos();  // any floor below the true one
            const double b = sca::ev_term_value(m, cs, x, gamma, cfg);
            const double t = f2_term_mu(cs, x, mu, cfg, m.k, m.n);
            w_ev = std::max(w_ev, detail::overshoot(t, b, 1.0));
            ++n_ev;
        }

        for (const auto& fl : fls) {
            const double target = q_denominator_mu(cs, x, mu, cfg, fl.k, fl.n) / (mu - 1.0);
            const double lin = sca::floor_lin_value(fl, cs, x, mu, cfg);
            w_floor_lin =
                std::max(w_floor_lin, detail::overshoot(lin, target, cfg.sigma_a2));
            const double beta =
                fl.gamma_l * fl.gamma_l * std::exp(4.0 * (rng.uniform() - 0.5));
            const double lhs = std::sqrt(beta) / (mu - 1.0);
            const double rhs = sca::floor_constraint_lhs(fl, beta, mu);
            w_floor_split = std::max(w_floor_split, detail::overshoot(lhs, rhs, cfg.sigma_a2));
            ++n_floor;
        }

        for (const auto& p : pows) {
            const double b = sca::power_inner_lhs(p, x, mu, cfg);
            const double t = (p.k < 0) ? network_power_mu(x, mu, cfg)
                                       : cell_power_mu(x, mu, cfg, p.k);
            w_pow = std::max(w_pow, detail::overshoot(t, b, cfg.Pk_max));
            ++n_pow;
        }

        for (const auto& e : ehs) {
            const double b = sca::eh_inner_lhs(e, x, cfg);
            const double t = harvested_power(cs, x, cfg, e.k, e.n1) - cfg.sigma_a2;
            w_eh = std::max(w_eh, detail::overshoot(b, t, cfg.sigma_a2));
            ++n_eh;
        }

        for (const auto& m : see_ms) {
            // Trust region (0, 3 tau_l^2].
            const double t_var = 3.0 * m.tau_l * m.tau_l * rng.uniform_pos();
            const double b = sca::see_minorant_value(m, cs, x, mu, t_var, cfg);
            if (!std::isfinite(b)) continue;
            const double t =
                std::log1p(std::max(0.0, signal_margin_re(cs, x, cfg, m.k, m.n)) /
                           phi(cs, x, cfg, m.k, m.n)) /
                (mu * std::sqrt(t_var));
            w_see_min = std::max(w_see_min, detail::overshoot(b, t, 1.0));
            ++n_see_min;
        }

        for (const auto& m : see_js) {
            const double q = q_denominator_mu(cs, x, mu, cfg, m.k, m.n);
            if (!(q > 0.0)) continue;
            const double t_var = 3.0 * m.t_l * rng.uniform_pos();
            const double beta = q * q * rng.uniform_pos();  // sqrt(beta) <= true floor
            const double b = sca::see_majorant_value(m, cs, x, t_var, beta, cfg);
            const double t = f2_term_mu(cs, x, mu, cfg, m.k, m.n) / std::sqrt(t_var);
            w_see_maj = std::max(w_see_maj, detail::overshoot(t, b, 1.0));
            ++n_see_maj;
        }
    }

    detail::record(out, "rate-minorant-domination", n_rate, w_rate, tol);
    if (it.has_ev) detail::record(out, "ev-majorant-domination", n_ev, w_ev, tol);
    if (it.has_ev) {
        detail::record(out, "floor-linearization-domination", n_floor, w_floor_lin, tol);
        detail::record(out, "floor-split-domination", n_floor, w_floor_split, tol);
    }
    detail::record(out, "power-inner-domination", n_pow, w_pow, tol);
    detail::record(out, "harvest-inner-domination", n_eh, w_eh, tol);
    detail::record(out, "ratio-minorant-domination", n_see_min, w_see_min, tol);
    if (it.has_ev) detail::record(out, "ratio-majorant-domination", n_see_maj, w_see_maj, tol);
    return out;
}

// ---------------------------------------------------------------------------
// Soundness: inner constraints imply the originals they replace
// ---------------------------------------------------------------------------

inline std::vector<OracleReport> soundness_suite(const sca::Iterate& it, const ChannelSet& cs,
                                                 const NetworkConfig& cfg, int n_points,
                                                 std::uint64_t seed, double tol = 1e-9) {
    if (n_points < 1) throw std::invalid_argument("n_points must be >= 1");
    std::vector<OracleReport> out;
    Rng rng = Rng::stream(seed, 0x50);

    const auto fls = it.has_ev ? sca::floor_linearizations(it, cs, cfg)
                               : std::vector<sca::FloorLinearization>{};
    const auto pows = sca::inner_power_constraints(it, cfg);
    const auto ehs = sca::inner_eh_constraint(it, cs, cfg);

    double w_pow = 0.0, w_eh = 0.0, w_floor = 0.0;
    std::size_t n_pow = 0, n_eh = 0, n_floor = 0;
    const int max_draws = 50 * n_points;

    for (int s = 0; s < max_draws; ++s) {
        const bool enough = n_pow >= static_cast<std::size_t>(n_points) &&
                            n_eh >= static_cast<std::size_t>(n_points) &&
                            (fls.empty() || n_floor >= static_cast<std::size_t>(n_points));
        if (enough) break;
        const BeamformerSet x = detail::perturbed(it.x, cfg, rng);
        const double mu = 1.0 + rng.uniform_pos() * (2.0 * it.mu - 2.0);

        // Transformed transmit-power constraint.
        for (const auto& p : pows) {
            if (sca::power_inner_lhs(p, x, mu, cfg) > p.budget) continue;
            const double t = (p.k < 0) ? network_power_mu(x, mu, cfg)
                                       : cell_power_mu(x, mu, cfg, p.k);
            w_pow = std::max(w_pow, (t - p.budget) / p.budget);
            ++n_pow;
        }

        // Transformed harvested-energy constraint.
        for (const auto& e : ehs) {
            if (sca::eh_inner_lhs(e, x, cfg) < sca::eh_inner_rhs(e, mu)) continue;
            const double harvested =
                cfg.zeta * (1.0 - 1.0 / mu) * harvested_power(cs, x, cfg, e.k, e.n1);
            w_eh = std::max(w_eh, (cfg.e_min - harvested) / cfg.e_min);
            ++n_eh;
        }

        // Floor split + linearization (with the time-split trust region):
        // any beta admissible for the inner rows must satisfy the original
        // floor sqrt(beta) <= q(x, mu).
        for (const auto& fl : fls) {
            const double beta_max = sca::max_feasible_beta(fl, cs, x, mu, cfg);
            if (!(beta_max > 0.0)) continue;
            const double beta = beta_max * rng.uniform_pos();
            const double q = q_denominator_mu(cs, x, mu, cfg, fl.k, fl.n);
            w_floor = std::max(w_floor, (std::sqrt(beta) - q) / std::max(q, cfg.sigma_a2));
            ++n_floor;
        }
    }

    detail::record(out, "power-inner-soundness", n_pow, w_pow, tol);
    detail::record(out, "harvest-inner-soundness", n_eh, w_eh, tol);
    if (!fls.empty()) detail::record(out, "floor-inner-soundness", n_floor, w_floor, tol);
    return out;
}

// ---------------------------------------------------------------------------
// Scalar inequality battery (bridged into oracle reports)
// ---------------------------------------------------------------------------

inline std::vector<OracleReport> scalar_battery(std::uint64_t seed = 20240801,
                                                int n_samples = 10000, double tol = 1e-12) {
    std::vector<OracleReport> out;
    for (const sca::InequalityCheck& c : sca::appendix_inequality_suite(seed, n_samples, tol))
        out.push_back({c.name, static_cast<std::size_t>(c.samples), c.max_violation,
                       c.tolerance, c.pass});
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive matched-filter grid baseline
// ---------------------------------------------------------------------------

struct GridSpec {
    int mu_points = 50;
    double mu_min = 1.05;
    double mu_max = 20.0;
    // Per-beam power levels as fractions of the per-beam cap.
    std::vector<double> power_fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
    double audit_tol = 1e-9;
};

struct GridResult {
    bool found = false;
    double best_value = -std::numeric_limits<double>::infinity();  // nats
    BeamformerSet best_x;
    double best_mu = 0.0;
    std::size_t evaluated = 0;
    std::size_t feasible = 0;
};

// Deterministic sweep: every beam points along its own serving channel
// (matched filter); each beam's power takes every value of the fraction grid;
// the time split takes mu_points log-spaced values. A point counts only if
// the full original-constraint audit passes; the value is the worst-user
// secrecy rate from the metric layer.
inline GridResult grid_oracle(const ChannelSet& cs, const NetworkConfig& cfg,
                              const GridSpec& spec = {}) {
    if (cfg.K > 2 || cfg.N_k > 2 || cfg.M > 3)
        throw std::invalid_argument("grid oracle is restricted to tiny instances");
    if (spec.mu_points < 1 || spec.power_fractions.empty())
        throw std::invalid_argument("degenerate grid specification");

    const int beams = cfg.K * (cfg.N_k + cfg.N1_k);
    const std::size_t levels = spec.power_fractions.size();

    std::vector<Vec> dirs;  // unit matched-filter directions, xI first
    dirs.reserve(static_cast<std::size_t>(beams));
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) dirs.push_back(cs.h[k][k][n].normalized());
    for (int k = 0; k < cfg.K; ++k)
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) dirs.push_back(cs.h[k][k][n1].normalized());

    GridResult best;
    std::vector<std::size_t> idx(static_cast<std::size_t>(beams), 0);
    while (true) {
        BeamformerSet x = BeamformerSet::zeros(cfg);
        std::size_t b = 0;
        for (int k = 0; k < cfg.K; ++k)
            for (int n = 0; n < cfg.N_k; ++n, ++b)
                x.xI[k][n] = std::sqrt(spec.power_fractions[idx[b]] * cfg.Pk_max) * dirs[b];
        for (int k = 0; k < cfg.K; ++k)
            for (int n1 = 0; n1 < cfg.N1_k; ++n1, ++b)
                x.xE[k][n1] = std::sqrt(spec.power_fractions[idx[b]] * cfg.Pk_max) * dirs[b];

        for (int i = 0; i < spec.mu_points; ++i) {
            const double f = (spec.mu_points == 1)
                                 ? 0.0
                                 : static_cast<double>(i) / (spec.mu_points - 1);
            const double mu = spec.mu_min * std::pow(spec.mu_max / spec.mu_min, f);
            const TimeSplit ts = TimeSplit::from_mu(mu);
            ++best.evaluated;
            if (!feasibility_audit(cs, x, ts, cfg, spec.audit_tol).all_pass) continue;
            ++best.feasible;
            const double v = min_secrecy_rate(cs, x, ts, cfg);
            if (v > best.best_value) {
                best.found = true;
                best.best_value = v;
                best.best_x = x;
                best.best_mu = mu;
            }
        }

        // Odometer step over the per-beam level assignment.
        int pos = 0;
        while (pos < beams && ++idx[static_cast<std::size_t>(pos)] == levels) {
            idx[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == beams) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Full verification driver (CLI `verify`)
// ---------------------------------------------------------------------------

struct VerifySettings {
    std::uint64_t seed = 7001;
    int expansions = 100;           // tangency expansions
    int domination_expansions = 10; // expansions carrying sampled suites
    int domination_samples = 100;   // per expansion, per bound family
    int soundness_points = 1000;    // accepted points per inner constraint
    int battery_samples = 10000;
    double tangency_tol = 1e-9;
    double domination_tol = 1e-12;
    double soundness_tol = 1e-9;
    double battery_tol = 1e-12;
};

// Runs every sampled suite on freshly generated scenarios and merges the
// reports by name. Total sample counts: `expansions` tangency expansions,
// domination_expansions * domination_samples draws per bound family,
// `soundness_points` accepted points per inner constraint per expansion.
inline std::vector<OracleReport> run_verification(const NetworkConfig& base,
                                                  const VerifySettings& s = {}) {
    std::vector<OracleReport> merged;
    const int sound_per_expansion =
        std::max(1, s.soundness_points / std::max(1, s.domination_expansions));
    for (int e = 0; e < s.expansions; ++e) {
        NetworkConfig cfg = base;
        cfg.seed = s.seed + static_cast<std::uint64_t>(e);
        const ChannelSet cs = generate_channels(cfg);
        Rng rng = Rng::stream(cfg.seed, 0xE0);
        const sca::Iterate it = random_expansion_iterate(cs, cfg, rng);
        detail::merge(merged, tangency_suite(it, cs, cfg, s.tangency_tol));
        if (e < s.domination_expansions) {
            detail::merge(merged, domination_suite(it, cs, cfg, s.domination_samples,
                                                   cfg.seed, s.domination_tol));
            detail::merge(merged, soundness_suite(it, cs, cfg, sound_per_expansion,
                                                  cfg.seed, s.soundness_tol));
        }
    }
    detail::merge(merged, scalar_battery(s.seed, s.battery_samples, s.battery_tol));
    return merged;
}

} // namespace secbeam::val
