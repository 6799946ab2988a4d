#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "secbeam/config.hpp"
#include "secbeam/model.hpp"
#include "secbeam/units.hpp"

namespace secbeam {

// Energy beamformers xE[k][n1] (zone-1 UEs only) and information beamformers
// xI[k][n] (all UEs), each of length M.
struct BeamformerSet {
    std::vector<std::vector<Vec>> xE;
    std::vector<std::vector<Vec>> xI;

    static BeamformerSet zeros(const NetworkConfig& cfg) {
        BeamformerSet x;
        x.xE.assign(cfg.K, std::vector<Vec>(cfg.N1_k, Vec::Zero(cfg.M)));
        x.xI.assign(cfg.K, std::vector<Vec>(cfg.N_k, Vec::Zero(cfg.M)));
        return x;
    }
};

// Time split between the energy phase (fraction eta) and the information
// phase (1-eta), also carried as mu = 1/(1-eta) > 1.
struct TimeSplit {
    double eta = 0.5;
    double mu = 2.0;

    static TimeSplit from_eta(double eta) {
        if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
        return {eta, 1.0 / (1.0 - eta)};
    }
    static TimeSplit from_mu(double mu) {
        if (!(mu > 1.0)) throw std::invalid_argument("mu must be > 1");
        return {1.0 - 1.0 / mu, mu};
    }
    bool consistent(double rel_tol = 1e-12) const {
        return std::abs(mu * (1.0 - eta) - 1.0) <= rel_tol * std::max(1.0, std::abs(mu));
    }
};

// Raised when a worst-case eavesdropper denominator is nonpositive, i.e. the
// uncertainty radii are too large for a meaningful worst case.
struct MetricError : std::runtime_error {
    MetricError(int k_, int n_, const std::string& what_)
        : std::runtime_error(what_), k(k_), n(n_) {}
    int k;
    int n;
};

// ---------------- scalar building blocks ----------------

// Received energy-beam power at zone-1 UE (k, n1), antenna noise included.
inline double harvested_power(const ChannelSet& cs, const BeamformerSet& x,
                              const NetworkConfig& cfg, int k, int n1) {
    double p = cfg.sigma_a2;
    for (int kb = 0; kb < cfg.K; ++kb)
        for (int nb = 0; nb < cfg.N1_k; ++nb)
            p += std::norm(cs.h[kb][k][n1].dot(x.xE[kb][nb]));
    return p;
}

// Interference-plus-noise floor at UE (k, n): intra- and inter-cell
// information beams plus their worst-case uncertainty mass plus noise.
inline double phi(const ChannelSet& cs, const BeamformerSet& x,
                  const NetworkConfig& cfg, int k, int n) {
    double v = cfg.sigma_a2;
    for (int nb = 0; nb < cfg.N_k; ++nb) {
        if (nb == n) continue;
        v += std::norm(cs.h[k][k][n].dot(x.xI[k][nb]));
        v += cs.eps_ue[k][k][n] * x.xI[k][nb].squaredNorm();
    }
    for (int kb = 0; kb < cfg.K; ++kb) {
        if (kb == k) continue;
        for (int nb = 0; nb < cfg.N_k; ++nb) {
            v += std::norm(cs.h[kb][k][n].dot(x.xI[kb][nb]));
            v += cs.eps_ue[kb][k][n] * x.xI[kb][nb].squaredNorm();
        }
    }
    return v;
}

// Worst-case desired-signal power at UE (k, n), before clamping.
inline double signal_margin(const ChannelSet& cs, const BeamformerSet& x,
                            const NetworkConfig& cfg, int k, int n) {
    return std::norm(cs.h[k][k][n].dot(x.xI[k][n])) -
           cs.eps_ue[k][k][n] * x.xI[k][n].squaredNorm();
}

// Variant using only the real part of the aligned inner product (valid after
// phase rotation, where the real part equals the magnitude).
inline double signal_margin_re(const ChannelSet& cs, const BeamformerSet& x,
                               const NetworkConfig& cfg, int k, int n) {
    const double re = cs.h[k][k][n].dot(x.xI[k][n]).real();
    return re * re - cs.eps_ue[k][k][n] * x.xI[k][n].squaredNorm();
}

// Worst-case eavesdropper-side signal power for the UE-(k,n) stream.
inline double ev_signal(const ChannelSet& cs, const BeamformerSet& x,
                        const NetworkConfig& cfg, int k, int n) {
    return (cs.Hev[k][k].adjoint() * x.xI[k][n]).squaredNorm() +
           cs.eps_ev[k][k] * x.xI[k][n].squaredNorm();
}

namespace detail {

// Energy-phase jamming power towards the eavesdropper in cell k, minus its
// worst-case uncertainty mass.
inline double ev_jamming_margin(const ChannelSet& cs, const BeamformerSet& x,
                                const NetworkConfig& cfg, int k) {
    double v = 0.0;
    for (int kb = 0; kb < cfg.K; ++kb)
        for (int nb = 0; nb < cfg.N1_k; ++nb)
            v += (cs.Hev[kb][k].adjoint() * x.xE[kb][nb]).squaredNorm() -
                 cs.eps_ev[kb][k] * x.xE[kb][nb].squaredNorm();
    return v;
}

// Information-phase interference towards the eavesdropper in cell k for the
// UE-(k,n) stream, minus its worst-case uncertainty mass.
inline double ev_interference_margin(const ChannelSet& cs, const BeamformerSet& x,
                                     const NetworkConfig& cfg, int k, int n) {
    double v = 0.0;
    for (int nb = 0; nb < cfg.N_k; ++nb) {
        if (nb == n) continue;
        v += (cs.Hev[k][k].adjoint() * x.xI[k][nb]).squaredNorm() -
             cs.eps_ev[k][k] * x.xI[k][nb].squaredNorm();
    }
    for (int kb = 0; kb < cfg.K; ++kb) {
        if (kb == k) continue;
        for (int nb = 0; nb < cfg.N_k; ++nb)
            v += (cs.Hev[kb][k].adjoint() * x.xI[kb][nb]).squaredNorm() -
                 cs.eps_ev[kb][k] * x.xI[kb][nb].squaredNorm();
    }
    return v;
}

} // namespace detail

// Worst-case eavesdropper noise-plus-interference floor, eta form.
inline double q_denominator(const ChannelSet& cs, const BeamformerSet& x, double eta,
                            const NetworkConfig& cfg, int k, int n) {
    return eta / (1.0 - eta) * detail::ev_jamming_margin(cs, x, cfg, k) +
           detail::ev_interference_margin(cs, x, cfg, k, n) +
           cfg.N_ev * cfg.sigma_a2 / (1.0 - eta);
}

// Same floor in the mu variable (identical value at mu = 1/(1-eta)).
inline double q_denominator_mu(const ChannelSet& cs, const BeamformerSet& x, double mu,
                               const NetworkConfig& cfg, int k, int n) {
    return (mu - 1.0) * detail::ev_jamming_margin(cs, x, cfg, k) +
           detail::ev_interference_margin(cs, x, cfg, k, n) +
           mu * cfg.N_ev * cfg.sigma_a2;
}

// ---------------- spec'd per-UE metric operations ----------------

inline std::vector<std::vector<double>> harvested_energy(const ChannelSet& cs,
                                                         const BeamformerSet& x,
                                                         const TimeSplit& ts,
                                                         const NetworkConfig& cfg) {
    std::vector<std::vector<double>> e(cfg.K, std::vector<double>(cfg.N1_k, 0.0));
    for (int k = 0; k < cfg.K; ++k)
        for (int n1 = 0; n1 < cfg.N1_k; ++n1)
            e[k][n1] = cfg.zeta * ts.eta * harvested_power(cs, x, cfg, k, n1);
    return e;
}

// Natural-log rate term ln(1 + clamped worst-case SINR) for UE (k,n).
inline double f1_term(const ChannelSet& cs, const BeamformerSet& x,
                      const NetworkConfig& cfg, int k, int n) {
    const double num = std::max(0.0, signal_margin(cs, x, cfg, k, n));
    return std::log1p(num / phi(cs, x, cfg, k, n));
}

inline std::vector<std::vector<double>> worst_ue_rate(const ChannelSet& cs,
                                                      const BeamformerSet& x,
                                                      const TimeSplit& ts,
                                                      const NetworkConfig& cfg) {
    std::vector<std::vector<double>> r(cfg.K, std::vector<double>(cfg.N_k, 0.0));
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n)
            r[k][n] = (1.0 - ts.eta) * f1_term(cs, x, cfg, k, n);
    return r;
}

inline std::vector<std::vector<double>> worst_ev_sinr(const ChannelSet& cs,
                                                      const BeamformerSet& x,
                                                      const TimeSplit& ts,
                                                      const NetworkConfig& cfg) {
    std::vector<std::vector<double>> s(cfg.K, std::vector<double>(cfg.N_k, 0.0));
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            const double q = q_denominator(cs, x, ts.eta, cfg, k, n);
            if (!(q > 0.0))
                throw MetricError(k, n,
                                  "nonpositive eavesdropper noise floor at UE (" + std::to_string(k) +
                                      "," + std::to_string(n) + "): uncertainty radii too large");
            s[k][n] = ev_signal(cs, x, cfg, k, n) / q;
        }
    return s;
}

// EV-side rate term ln(1 + worst EV SINR), eta form.
inline double f2_term(const ChannelSet& cs, const BeamformerSet& x, double eta,
                      const NetworkConfig& cfg, int k, int n) {
    const double q = q_denominator(cs, x, eta, cfg, k, n);
    if (!(q > 0.0))
        throw MetricError(k, n, "nonpositive eavesdropper noise floor");
    return std::log1p(ev_signal(cs, x, cfg, k, n) / q);
}

// Same term in the mu variable.
inline double f2_term_mu(const ChannelSet& cs, const BeamformerSet& x, double mu,
                         const NetworkConfig& cfg, int k, int n) {
    const double q = q_denominator_mu(cs, x, mu, cfg, k, n);
    if (!(q > 0.0))
        throw MetricError(k, n, "nonpositive eavesdropper noise floor (mu form)");
    return std::log1p(ev_signal(cs, x, cfg, k, n) / q);
}

inline std::vector<std::vector<double>> secrecy_rate(const ChannelSet& cs,
                                                     const BeamformerSet& x,
                                                     const TimeSplit& ts,
                                                     const NetworkConfig& cfg) {
    std::vector<std::vector<double>> f(cfg.K, std::vector<double>(cfg.N_k, 0.0));
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n)
            f[k][n] = (1.0 - ts.eta) * f1_term(cs, x, cfg, k, n) -
                      f2_term(cs, x, ts.eta, cfg, k, n);
    return f;
}

// ---------------- power accounting ----------------

inline double cell_power(const BeamformerSet& x, const TimeSplit& ts,
                         const NetworkConfig& cfg, int k) {
    double e = 0.0, i = 0.0;
    for (int n1 = 0; n1 < cfg.N1_k; ++n1) e += x.xE[k][n1].squaredNorm();
    for (int n = 0; n < cfg.N_k; ++n) i += x.xI[k][n].squaredNorm();
    return ts.eta * e + (1.0 - ts.eta) * i;
}

struct PowerReport {
    std::vector<double> g_k;
    double g = 0.0;
};

inline PowerReport powers(const BeamformerSet& x, const TimeSplit& ts, const NetworkConfig& cfg) {
    PowerReport p;
    p.g_k.resize(cfg.K);
    for (int k = 0; k < cfg.K; ++k) {
        p.g_k[k] = cell_power(x, ts, cfg, k);
        p.g += p.g_k[k];
    }
    return p;
}

// Per-cell power in the mu variable (algebraically identical to cell_power at
// mu = 1/(1-eta)).
inline double cell_power_mu(const BeamformerSet& x, double mu, const NetworkConfig& cfg, int k) {
    double e = 0.0, i = 0.0;
    for (int n1 = 0; n1 < cfg.N1_k; ++n1) e += x.xE[k][n1].squaredNorm();
    for (int n = 0; n < cfg.N_k; ++n) i += x.xI[k][n].squaredNorm();
    return e + i / mu - e / mu;
}

inline double network_power_mu(const BeamformerSet& x, double mu, const NetworkConfig& cfg) {
    double g = 0.0;
    for (int k = 0; k < cfg.K; ++k) g += cell_power_mu(x, mu, cfg, k);
    return g;
}

// Total cell power drawn from the grid: amplifier-referred transmit power plus
// per-antenna and circuit dissipation.
inline double see_denominator(const BeamformerSet& x, const TimeSplit& ts,
                              const NetworkConfig& cfg, int k) {
    return cell_power(x, ts, cfg, k) / cfg.xi + cfg.M * cfg.P_A + cfg.P_c;
}

inline std::vector<double> see_values(const ChannelSet& cs, const BeamformerSet& x,
                                      const TimeSplit& ts, const NetworkConfig& cfg) {
    std::vector<double> see(cfg.K, 0.0);
    const auto f = secrecy_rate(cs, x, ts, cfg);
    for (int k = 0; k < cfg.K; ++k) {
        double num = 0.0;
        for (int n = 0; n < cfg.N_k; ++n) num += f[k][n];
        see[k] = num / see_denominator(x, ts, cfg, k);
    }
    return see;
}

// ---------------- feasibility audit ----------------

struct ConstraintCheck {
    std::string family;
    bool pass = true;
    double worst_violation = 0.0; // relative to the constraint's budget scale
    std::string worst_location;
};

struct FeasibilityReport {
    std::vector<ConstraintCheck> checks;
    bool all_pass = true;

    const ConstraintCheck* find(const std::string& family) const {
        for (const auto& c : checks)
            if (c.family == family) return &c;
        return nullptr;
    }
};

namespace detail {

inline void record(FeasibilityReport& rep, ConstraintCheck c, double tol) {
    c.pass = c.worst_violation <= tol;
    rep.all_pass = rep.all_pass && c.pass;
    rep.checks.push_back(std::move(c));
}

} // namespace detail

// Audits the original (eta-form) constraint families: per-beam caps, per-cell
// power, network power, harvested-energy thresholds, and eta in (0,1).
// Violations are reported relative to each budget/threshold so one tolerance
// applies across scales.
inline FeasibilityReport feasibility_audit(const ChannelSet& cs, const BeamformerSet& x,
                                           const TimeSplit& ts, const NetworkConfig& cfg,
                                           double tol) {
    FeasibilityReport rep;

    ConstraintCheck beam{"per_beam_cap"};
    for (int k = 0; k < cfg.K; ++k) {
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
            const double v = (x.xE[k][n1].squaredNorm() - cfg.Pk_max) / cfg.Pk_max;
            if (v > beam.worst_violation) {
                beam.worst_violation = v;
                beam.worst_location = "xE(" + std::to_string(k) + "," + std::to_string(n1) + ")";
            }
        }
        for (int n = 0; n < cfg.N_k; ++n) {
            const double v = (x.xI[k][n].squaredNorm() - cfg.Pk_max) / cfg.Pk_max;
            if (v > beam.worst_violation) {
                beam.worst_violation = v;
                beam.worst_location = "xI(" + std::to_string(k) + "," + std::to_string(n) + ")";
            }
        }
    }
    detail::record(rep, std::move(beam), tol);

    ConstraintCheck cell{"cell_power"};
    for (int k = 0; k < cfg.K; ++k) {
        const double v = (cell_power(x, ts, cfg, k) - cfg.Pk_max) / cfg.Pk_max;
        if (v > cell.worst_violation) {
            cell.worst_violation = v;
            cell.worst_location = "cell " + std::to_string(k);
        }
    }
    detail::record(rep, std::move(cell), tol);

    ConstraintCheck net{"network_power"};
    net.worst_violation = std::max(0.0, (powers(x, ts, cfg).g - cfg.P_max) / cfg.P_max);
    detail::record(rep, std::move(net), tol);

    ConstraintCheck eh{"harvested_energy"};
    for (int k = 0; k < cfg.K; ++k)
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
            const double need = cfg.e_min / (cfg.zeta * ts.eta);
            const double v = (need - harvested_power(cs, x, cfg, k, n1)) / need;
            if (v > eh.worst_violation) {
                eh.worst_violation = v;
                eh.worst_location = "UE(" + std::to_string(k) + "," + std::to_string(n1) + ")";
            }
        }
    detail::record(rep, std::move(eh), tol);

    ConstraintCheck eta{"eta_range"};
    eta.worst_violation = std::max({0.0, -ts.eta, ts.eta - 1.0});
    if (!(ts.eta > 0.0 && ts.eta < 1.0)) eta.worst_violation = std::max(eta.worst_violation, 1.0);
    detail::record(rep, std::move(eta), tol);

    return rep;
}

// Mu-form audit of the transformed constraint set (per-beam caps, transformed
// cell/network power, transformed harvested-energy threshold, mu > 1).
inline FeasibilityReport feasibility_audit_mu(const ChannelSet& cs, const BeamformerSet& x,
                                              double mu, const NetworkConfig& cfg, double tol) {
    FeasibilityReport rep;

    ConstraintCheck beam{"per_beam_cap"};
    for (int k = 0; k < cfg.K; ++k) {
        for (int n1 = 0; n1 < cfg.N1_k; ++n1)
            beam.worst_violation = std::max(
                beam.worst_violation, (x.xE[k][n1].squaredNorm() - cfg.Pk_max) / cfg.Pk_max);
        for (int n = 0; n < cfg.N_k; ++n)
            beam.worst_violation = std::max(
                beam.worst_violation, (x.xI[k][n].squaredNorm() - cfg.Pk_max) / cfg.Pk_max);
    }
    detail::record(rep, std::move(beam), tol);

    ConstraintCheck cell{"cell_power_mu"};
    for (int k = 0; k < cfg.K; ++k)
        cell.worst_violation = std::max(
            cell.worst_violation, (cell_power_mu(x, mu, cfg, k) - cfg.Pk_max) / cfg.Pk_max);
    detail::record(rep, std::move(cell), tol);

    ConstraintCheck net{"network_power_mu"};
    net.worst_violation =
        std::max(0.0, (network_power_mu(x, mu, cfg) - cfg.P_max) / cfg.P_max);
    detail::record(rep, std::move(net), tol);

    ConstraintCheck eh{"harvested_energy_mu"};
    for (int k = 0; k < cfg.K; ++k)
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
            const double need =
                cfg.e_min / cfg.zeta * (1.0 + 1.0 / (mu - 1.0)) - cfg.sigma_a2;
            const double v = (need - harvested_power(cs, x, cfg, k, n1)) / std::max(need, cfg.sigma_a2);
            eh.worst_violation = std::max(eh.worst_violation, v);
        }
    detail::record(rep, std::move(eh), tol);

    ConstraintCheck mu_range{"mu_range"};
    mu_range.worst_violation = std::max(0.0, 1.0 - mu);
    detail::record(rep, std::move(mu_range), tol);

    return rep;
}

// ---------------- aggregate report ----------------

struct MetricReport {
    std::vector<std::vector<double>> ue_rate;   // (1-eta) * f1, nats/s/Hz
    std::vector<std::vector<double>> f2;        // EV-side rate term, nats
    std::vector<std::vector<double>> secrecy;   // (1-eta)f1 - f2, nats
    std::vector<std::vector<double>> harvested; // zone-1 UEs, watts (per unit time)
    std::vector<double> g_k;
    double g = 0.0;
    std::vector<double> see; // nats/J/Hz per cell
    double min_secrecy = 0.0;
    double min_ue_rate = 0.0;
    double min_see = 0.0;
};

inline MetricReport compute_metrics(const ChannelSet& cs, const BeamformerSet& x,
                                    const TimeSplit& ts, const NetworkConfig& cfg) {
    MetricReport r;
    r.ue_rate = worst_ue_rate(cs, x, ts, cfg);
    r.secrecy = secrecy_rate(cs, x, ts, cfg);
    r.f2.assign(cfg.K, std::vector<double>(cfg.N_k, 0.0));
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n)
            r.f2[k][n] = r.ue_rate[k][n] - r.secrecy[k][n];
    r.harvested = harvested_energy(cs, x, ts, cfg);
    const auto p = powers(x, ts, cfg);
    r.g_k = p.g_k;
    r.g = p.g;
    r.see = see_values(cs, x, ts, cfg);

    r.min_secrecy = r.secrecy[0][0];
    r.min_ue_rate = r.ue_rate[0][0];
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            r.min_secrecy = std::min(r.min_secrecy, r.secrecy[k][n]);
            r.min_ue_rate = std::min(r.min_ue_rate, r.ue_rate[k][n]);
        }
    r.min_see = *std::min_element(r.see.begin(), r.see.end());
    return r;
}

inline double min_secrecy_rate(const ChannelSet& cs, const BeamformerSet& x,
                               const TimeSplit& ts, const NetworkConfig& cfg) {
    double m = 0.0;
    bool first = true;
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            const double f = (1.0 - ts.eta) * f1_term(cs, x, cfg, k, n) -
                             f2_term(cs, x, ts.eta, cfg, k, n);
            if (first || f < m) m = f;
            first = false;
        }
    return m;
}

inline nlohmann::json metric_report_to_json(const MetricReport& r) {
    nlohmann::json j;
    j["ue_rate_nats"] = r.ue_rate;
    j["f2_nats"] = r.f2;
    j["secrecy_nats"] = r.secrecy;
    j["harvested_watts"] = r.harvested;
    j["g_k_watts"] = r.g_k;
    j["g_watts"] = r.g;
    j["see_nats_per_joule"] = r.see;
    j["min_secrecy_nats"] = r.min_secrecy;
    j["min_secrecy_bits"] = nats_to_bits(r.min_secrecy);
    j["min_ue_rate_nats"] = r.min_ue_rate;
    j["min_see_nats_per_joule"] = r.min_see;
    j["min_see_bits_per_joule"] = nats_to_bits(r.min_see);
    return j;
}

// Row-per-UE CSV (zone-2 UEs report harvested = 0).
inline std::string metric_report_to_csv(const MetricReport& r) {
    std::ostringstream out;
    out << "cell,ue,ue_rate_bits,f2_bits,secrecy_bits,harvested_watts\n";
    out.precision(12);
    const int K = static_cast<int>(r.ue_rate.size());
    for (int k = 0; k < K; ++k) {
        const int N = static_cast<int>(r.ue_rate[k].size());
        const int N1 = static_cast<int>(r.harvested[k].size());
        for (int n = 0; n < N; ++n)
            out << k << ',' << n << ',' << nats_to_bits(r.ue_rate[k][n]) << ','
                << nats_to_bits(r.f2[k][n]) << ',' << nats_to_bits(r.secrecy[k][n]) << ','
                << (n < N1 ? r.harvested[k][n] : 0.0) << '\n';
    }
    return out.str();
}

} // namespace secbeam
