#pragma once

#include <cmath>
#include <complex>
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

// Successive-convex-approximation layer: everything here takes an expansion
// point (an Iterate) and produces explicit coefficients for the concave
// minorants, convex majorants, and inner-approximated constraints that the
// subproblem assembly turns into a cone program. All functions are pure;
// per-user bound construction shares no mutable state and may run in parallel.
namespace secbeam::sca {

// Raised when an expansion point violates a bound's precondition (negative
// worst-case signal margin, nonpositive eavesdropper floor, ...).
struct ExpansionError : std::runtime_error {
    ExpansionError(int k_, int n_, const std::string& what_)
        : std::runtime_error(what_), k(k_), n(n_) {}
    int k;
    int n;
};

// ---------------------------------------------------------------------------
// Piece descriptors
// ---------------------------------------------------------------------------

// Structural class of one term of a bound, i.e. which cone machinery the
// assembly needs for it.
enum class PieceKind {
    Linear,               // affine in the decision variables
    ConvexQuadratic,      // sum of squared norms
    QuadraticOverLinear,  // ||.||^2 / (positive affine), one rotated cone
    Reciprocal,           // 1/(positive affine) epigraph
    EpigraphCone,         // coupled cone pair (product lower bound of a ratio)
};

inline const char* piece_kind_name(PieceKind k) {
    switch (k) {
        case PieceKind::Linear: return "linear";
        case PieceKind::ConvexQuadratic: return "convex-quadratic";
        case PieceKind::QuadraticOverLinear: return "quadratic-over-linear";
        case PieceKind::Reciprocal: return "reciprocal";
        case PieceKind::EpigraphCone: return "epigraph-cone";
    }
    return "unknown";
}

// One term of one bound: its structural kind, a stable descriptive tag, the
// user (k, n) or cell (k, n = -1) it concerns (k = -1 for network-wide terms),
// and its named coefficients. Intended for inspection dumps and tests; the
// assembly consumes the typed structs below directly.
struct BoundPiece {
    PieceKind kind = PieceKind::Linear;
    std::string tag;
    int k = -1;
    int n = -1;
    nlohmann::json coeffs;
};

// Debug dump keyed by tag; each entry lists every piece carrying that tag.
inline nlohmann::json pieces_to_json(const std::vector<BoundPiece>& pieces) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& p : pieces) {
        nlohmann::json e;
        e["kind"] = piece_kind_name(p.kind);
        e["k"] = p.k;
        e["n"] = p.n;
        e["coeffs"] = p.coeffs;
        j[p.tag].push_back(std::move(e));
    }
    return j;
}

// ---------------------------------------------------------------------------
// Iterate: an expansion point with its auxiliary-variable values and caches
// ---------------------------------------------------------------------------

// Lower limit for the SINR-denominator auxiliary: keeps the ratio term of the
// rate minorant bounded. A fraction of the noise floor, far below any value an
// active user can attain.
inline double nu_floor(const NetworkConfig& cfg) { return 1e-9 * cfg.sigma_a2; }

// A feasible expansion point of the transformed (mu-form) problem together
// with the auxiliary-variable values that make every bound tight there, plus
// cached metric values at (x, mu). tau is only meaningful for the
// ratio-objective (energy-efficiency) run but is always filled.
struct Iterate {
    BeamformerSet x;
    double mu = 2.0;  // > 1

    std::vector<std::vector<double>> nu;     // [k][n]: worst-case signal power floor
    std::vector<std::vector<double>> gamma;  // [k][n]: sqrt of the eavesdropper-floor square
    std::vector<double> tau;                 // [k]: sqrt of the consumed-power square

    // Caches evaluated at (x, mu).
    std::vector<std::vector<double>> f1;     // user-rate log terms
    std::vector<std::vector<double>> f2bar;  // eavesdropper-rate log terms
    std::vector<std::vector<double>> qbar;   // worst-case eavesdropper floors
    std::vector<double> gbar;                // per-cell transmit powers

    // False for the leakage-free variant: the eavesdropper caches (f2bar,
    // qbar) are not populated and gamma holds a positive placeholder.
    bool has_ev = true;
};

// Builds an Iterate at (x, mu): caches the metric values and seeds the
// auxiliaries at the values where the bounds below are tight (nu at the
// worst-case signal power, gamma at the eavesdropper floor, tau at the
// consumed-power denominator).
inline Iterate make_iterate(const ChannelSet& cs, const BeamformerSet& x, double mu,
                            const NetworkConfig& cfg, bool with_ev = true) {
    if (!(mu > 1.0)) throw std::invalid_argument("expansion mu must be > 1");
    Iterate it;
    it.x = x;
    it.mu = mu;
    it.has_ev = with_ev;
    it.nu.assign(cfg.K, std::vector<double>(cfg.N_k, 0.0));
    it.gamma.assign(cfg.K, std::vector<double>(cfg.N_k, with_ev ? 0.0 : 1.0));
    it.tau.assign(cfg.K, 0.0);
    it.f1.assign(cfg.K, std::vector<double>(cfg.N_k, 0.0));
    it.f2bar.assign(cfg.K, std::vector<double>(cfg.N_k, 0.0));
    it.qbar.assign(cfg.K, std::vector<double>(cfg.N_k, 0.0));
    it.gbar.assign(cfg.K, 0.0);

    const double floor = nu_floor(cfg);
    for (int k = 0; k < cfg.K; ++k) {
        for (int n = 0; n < cfg.N_k; ++n) {
            it.f1[k][n] = f1_term(cs, x, cfg, k, n);
            if (with_ev) {
                it.qbar[k][n] = q_denominator_mu(cs, x, mu, cfg, k, n);
                if (!(it.qbar[k][n] > 0.0))
                    throw ExpansionError(k, n, "nonpositive eavesdropper floor at expansion point");
                it.f2bar[k][n] = f2_term_mu(cs, x, mu, cfg, k, n);
                it.gamma[k][n] = it.qbar[k][n];
            }
            it.nu[k][n] = std::max(signal_margin_re(cs, x, cfg, k, n), floor);
        }
        it.gbar[k] = cell_power_mu(x, mu, cfg, k);
        it.tau[k] = it.gbar[k] / cfg.xi + cfg.M * cfg.P_A + cfg.P_c;
    }
    return it;
}

// Verifies the Iterate invariants: mu > 1, strictly positive auxiliaries, and
// gamma matching the cached eavesdropper floor to rel_tol.
inline void check_iterate(const Iterate& it, const ChannelSet& cs, const NetworkConfig& cfg,
                          double rel_tol = 1e-8) {
    if (!(it.mu > 1.0)) throw ExpansionError(-1, -1, "iterate mu must be > 1");
    for (int k = 0; k < cfg.K; ++k) {
        if (!(it.tau[k] > 0.0)) throw ExpansionError(k, -1, "iterate tau must be positive");
        for (int n = 0; n < cfg.N_k; ++n) {
            if (!(it.nu[k][n] > 0.0)) throw ExpansionError(k, n, "iterate nu must be positive");
            if (!(it.gamma[k][n] > 0.0))
                throw ExpansionError(k, n, "iterate gamma must be positive");
            if (!it.has_ev) continue;
            const double q = q_denominator_mu(cs, it.x, it.mu, cfg, k, n);
            if (std::abs(it.gamma[k][n] - q) > rel_tol * std::abs(q))
                throw ExpansionError(k, n, "iterate gamma deviates from the eavesdropper floor");
        }
    }
}

// ---------------------------------------------------------------------------
// Phase rotation
// ---------------------------------------------------------------------------

// Rotates each information beam by the negative phase of its own-link inner
// product so that h_{k,k,n}^H xI_{k,n} becomes real nonnegative. Every
// per-link magnitude |h^H x| and every norm is unchanged, so all metrics are
// invariant. Energy beams are untouched; a zero inner product rotates by 1.
inline BeamformerSet rotate_phases(const BeamformerSet& x, const ChannelSet& cs,
                                   const NetworkConfig& cfg) {
    BeamformerSet out = x;
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            const std::complex<double> c = cs.h[k][k][n].dot(x.xI[k][n]);
            const double mag = std::abs(c);
            if (mag > 0.0) out.xI[k][n] *= std::conj(c) / mag;
        }
    return out;
}

// Scaled user-rate term in the rotated (real-part) form:
// (1/mu) ln(1 + ((Re h^H xI)^2 - eps ||xI||^2) / phi). The target the rate
// minorant bounds from below.
inline double f1bar_value(const ChannelSet& cs, const BeamformerSet& x, double mu,
                          const NetworkConfig& cfg, int k, int n) {
    return std::log1p(signal_margin_re(cs, x, cfg, k, n) / phi(cs, x, cfg, k, n)) / mu;
}

// ---------------------------------------------------------------------------
// Rate minorant (concave lower bound of the scaled user-rate term)
// ---------------------------------------------------------------------------

// Coefficients of the concave lower bound
//   f1bar(x, mu) >= a - b * phi(x)/nu - c * mu
// valid for any auxiliary nu with nu_floor <= nu <= psi(x) - eps ||xI_{k,n}||^2,
// where psi(x) = 2 re_expansion * Re{h^H xI_{k,n}} - re_expansion^2 is the
// tangent lower bound of the squared real part. Tight at the expansion point
// with nu at its cap. When the expansion margin is zero (d = 0) the bound
// degenerates to the zero function, a = b = c = 0, and the auxiliary with its
// cap row must be omitted from the subproblem (exposed as active() == false).
struct RateMinorant {
    int k = 0;
    int n = 0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;             // worst-case SINR at the expansion point
    double re_expansion = 0.0;  // Re{h^H xI} at the expansion point, >= 0
    double eps = 0.0;           // own-link uncertainty mass coefficient
    double floor = 0.0;         // lower limit for nu
    double phi_expansion = 0.0;
    double nu_expansion = 0.0;

    bool active() const { return b > 0.0; }
};

inline std::vector<RateMinorant> minorant_f1(const Iterate& it, const ChannelSet& cs,
                                             const NetworkConfig& cfg) {
    std::vector<RateMinorant> out;
    out.reserve(static_cast<std::size_t>(cfg.K) * cfg.N_k);
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            RateMinorant m;
            m.k = k;
            m.n = n;
            const double re = cs.h[k][k][n].dot(it.x.xI[k][n]).real();
            if (re < -1e-12)
                throw ExpansionError(k, n, "expansion point is not phase-rotated");
            m.re_expansion = std::max(re, 0.0);
            m.eps = cs.eps_ue[k][k][n];
            m.floor = nu_floor(cfg);
            m.phi_expansion = phi(cs, it.x, cfg, k, n);
            const double margin =
                m.re_expansion * m.re_expansion - m.eps * it.x.xI[k][n].squaredNorm();
            m.d = margin / m.phi_expansion;
            if (m.d < -1e-12)
                throw ExpansionError(k, n, "negative worst-case signal margin at expansion");
            if (m.d <= 1e-12) {
                m.d = 0.0;  // degenerate: zero bound, no auxiliary
            } else {
                m.a = 2.0 * std::log1p(m.d) / it.mu + m.d / (it.mu * (m.d + 1.0));
                m.b = m.d * m.d / (it.mu * (m.d + 1.0));
                m.c = std::log1p(m.d) / (it.mu * it.mu);
            }
            m.nu_expansion = std::max(margin, m.floor);
            out.push_back(std::move(m));
        }
    return out;
}

// Tangent lower bound of (Re{h^H xI})^2 around the expansion point.
inline double psi_value(const RateMinorant& m, const ChannelSet& cs, const BeamformerSet& x) {
    const double re = cs.h[m.k][m.k][m.n].dot(x.xI[m.k][m.n]).real();
    return 2.0 * m.re_expansion * re - m.re_expansion * m.re_expansion;
}

// Largest admissible value of the auxiliary nu at x.
inline double nu_cap_value(const RateMinorant& m, const ChannelSet& cs, const BeamformerSet& x) {
    return psi_value(m, cs, x) - m.eps * x.xI[m.k][m.n].squaredNorm();
}

// Bound value at (x, mu) with nu at its optimum (the cap). Returns -inf when
// no admissible nu exists (cap below the floor), i.e. x is outside the bound's
// validity region; an inactive bound is identically zero.
inline double minorant_value(const RateMinorant& m, const ChannelSet& cs, const BeamformerSet& x,
                             double mu, const NetworkConfig& cfg) {
    if (!m.active()) return 0.0;
    const double cap = nu_cap_value(m, cs, x);
    if (cap < m.floor) return -std::numeric_limits<double>::infinity();
    return m.a - m.b * phi(cs, x, cfg, m.k, m.n) / cap - m.c * mu;
}

inline std::vector<BoundPiece> describe(const RateMinorant& m) {
    std::vector<BoundPiece> ps;
    ps.push_back({PieceKind::QuadraticOverLinear,
                  "rate-minorant",
                  m.k,
                  m.n,
                  {{"a", m.a},
                   {"b", m.b},
                   {"c", m.c},
                   {"d", m.d},
                   {"phi_expansion", m.phi_expansion},
                   {"nu_expansion", m.nu_expansion}}});
    if (m.active()) {
        ps.push_back({PieceKind::ConvexQuadratic,
                      "rate-minorant-cap",
                      m.k,
                      m.n,
                      {{"re_expansion", m.re_expansion}, {"eps", m.eps}}});
        ps.push_back(
            {PieceKind::Linear, "rate-minorant-floor", m.k, m.n, {{"floor", m.floor}}});
    }
    return ps;
}

// ---------------------------------------------------------------------------
// Eavesdropper-rate majorant (convex upper bound of the leakage log term)
// ---------------------------------------------------------------------------

// Coefficients of the convex upper bound
//   f2bar(x, mu) <= f2_expansion + slope * (S(x)/gamma - s_expansion)
// where S(x) = ||Hev^H xI_{k,n}||^2 + eps_ev ||xI_{k,n}||^2 is the leakage
// power, valid for every auxiliary gamma with 0 < gamma <= qbar(x, mu). Tight
// at the expansion point with gamma = gamma_expansion (the floor value there).
struct EvRateMajorant {
    int k = 0;
    int n = 0;
    double f2_expansion = 0.0;     // log term at the expansion point
    double slope = 0.0;            // 1 / (1 + s_expansion)
    double s_expansion = 0.0;      // leakage-to-floor ratio at the expansion
    double gamma_expansion = 0.0;  // floor value at the expansion
    double eps_ev = 0.0;
};

inline std::vector<EvRateMajorant> majorant_f2(const Iterate& it, const ChannelSet& cs,
                                               const NetworkConfig& cfg) {
    std::vector<EvRateMajorant> out;
    out.reserve(static_cast<std::size_t>(cfg.K) * cfg.N_k);
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            EvRateMajorant m;
            m.k = k;
            m.n = n;
            const double q = it.qbar[k][n];
            if (!(q > 0.0))
                throw ExpansionError(k, n, "nonpositive eavesdropper floor at expansion");
            m.gamma_expansion = q;
            m.s_expansion = ev_signal(cs, it.x, cfg, k, n) / q;
            m.slope = 1.0 / (1.0 + m.s_expansion);
            m.f2_expansion = std::log1p(m.s_expansion);
            m.eps_ev = cs.eps_ev[k][k];
            out.push_back(m);
        }
    return out;
}

// Majorant value at (x, gamma).
inline double ev_term_value(const EvRateMajorant& m, const ChannelSet& cs,
                            const BeamformerSet& x, double gamma, const NetworkConfig& cfg) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    const double S = ev_signal(cs, x, cfg, m.k, m.n);
    return m.f2_expansion + m.slope * (S / gamma - m.s_expansion);
}

inline std::vector<BoundPiece> describe(const EvRateMajorant& m) {
    return {{PieceKind::QuadraticOverLinear,
             "ev-rate-majorant",
             m.k,
             m.n,
             {{"f2_expansion", m.f2_expansion},
              {"slope", m.slope},
              {"s_expansion", m.s_expansion},
              {"gamma_expansion", m.gamma_expansion},
              {"eps_ev", m.eps_ev}}}};
}

// ---------------------------------------------------------------------------
// Eavesdropper-floor linearization (ties gamma^2 to the true floor)
// ---------------------------------------------------------------------------

// Concave lower bound of qbar(x, mu)/(mu - 1) around the expansion point:
//   floor_lin(x, mu) = - eps-interference(x)/(mu-1) - eps-energy(x)
//                      + [linearized jamming quadratics]
//                      + (2/(mu_l-1)) [linearized interference quadratics]
//                      - intf_norm_l (mu-1)/(mu_l-1)^2
//                      + (1 + 2/(mu_l-1) - (mu-1)/(mu_l-1)^2) N_ev sigma_a^2,
// combined with the arithmetic-geometric mean split of sqrt(beta)/(mu-1):
//   (1/2) [ beta/(gamma_l (mu_l-1)) + gamma_l (mu_l-1)/(mu-1)^2 ] <= floor_lin
// which together imply sqrt(beta) <= qbar(x, mu). Requires the companion
// trust region mu < 2 mu_l - 1 to keep the reciprocal linearization positive.
struct FloorLinearization {
    int k = 0;
    int n = 0;
    double mu_l = 0.0;
    double gamma_l = 0.0;
    // Linearization of each energy-beam quadratic ||Hev^H xE||^2: coefficient
    // vectors w with term 2 Re{w^H xE}, minus the constant jam_norm_l.
    std::vector<Vec> jam_w;  // flattened [kb * N1 + nb]
    double jam_norm_l = 0.0;
    // Linearization of each interfering information-beam quadratic; the own
    // (k, n) slot is a zero vector (that beam is not interference).
    std::vector<Vec> intf_w;  // flattened [kb * N + nb]
    double intf_norm_l = 0.0;
};

inline std::vector<FloorLinearization> floor_linearizations(const Iterate& it,
                                                            const ChannelSet& cs,
                                                            const NetworkConfig& cfg) {
    std::vector<FloorLinearization> out;
    out.reserve(static_cast<std::size_t>(cfg.K) * cfg.N_k);
    for (int k = 0; k < cfg.K; ++k)
        for (int n = 0; n < cfg.N_k; ++n) {
            FloorLinearization fl;
            fl.k = k;
            fl.n = n;
            fl.mu_l = it.mu;
            fl.gamma_l = it.gamma[k][n];
            if (!(fl.gamma_l > 0.0))
                throw ExpansionError(k, n, "nonpositive eavesdropper floor at expansion");
            fl.jam_w.resize(static_cast<std::size_t>(cfg.K) * cfg.N1_k);
            for (int kb = 0; kb < cfg.K; ++kb)
                for (int nb = 0; nb < cfg.N1_k; ++nb) {
                    const Vec u = cs.Hev[kb][k].adjoint() * it.x.xE[kb][nb];
                    fl.jam_w[static_cast<std::size_t>(kb) * cfg.N1_k + nb] = cs.Hev[kb][k] * u;
                    fl.jam_norm_l += u.squaredNorm();
                }
            fl.intf_w.assign(static_cast<std::size_t>(cfg.K) * cfg.N_k, Vec::Zero(cfg.M));
            for (int kb = 0; kb < cfg.K; ++kb)
                for (int nb = 0; nb < cfg.N_k; ++nb) {
                    if (kb == k && nb == n) continue;
                    const Vec u = cs.Hev[kb][k].adjoint() * it.x.xI[kb][nb];
                    fl.intf_w[static_cast<std::size_t>(kb) * cfg.N_k + nb] = cs.Hev[kb][k] * u;
                    fl.intf_norm_l += u.squaredNorm();
                }
            out.push_back(std::move(fl));
        }
    return out;
}

// Upper limit of the trust region on mu around the expansion point.
inline double mu_trust_cap(const Iterate& it) { return 2.0 * it.mu - 1.0; }

// Value of the concave lower bound of qbar/(mu-1) at (x, mu).
inline double floor_lin_value(const FloorLinearization& fl, const ChannelSet& cs,
                              const BeamformerSet& x, double mu, const NetworkConfig& cfg) {
    if (!(mu > 1.0)) throw std::invalid_argument("mu must be > 1");
    const int k = fl.k, n = fl.n;
    double eps_intf = 0.0;
    for (int kb = 0; kb < cfg.K; ++kb)
        for (int nb = 0; nb < cfg.N_k; ++nb) {
            if (kb == k && nb == n) continue;
            eps_intf += cs.eps_ev[kb][k] * x.xI[kb][nb].squaredNorm();
        }
    double eps_energy = 0.0;
    double jam_lin = 0.0;
    for (int kb = 0; kb < cfg.K; ++kb)
        for (int nb = 0; nb < cfg.N1_k; ++nb) {
            eps_energy += cs.eps_ev[kb][k] * x.xE[kb][nb].squaredNorm();
            jam_lin += 2.0 * fl.jam_w[static_cast<std::size_t>(kb) * cfg.N1_k + nb]
                                 .dot(x.xE[kb][nb])
                                 .real();
        }
    double intf_lin = 0.0;
    for (int kb = 0; kb < cfg.K; ++kb)
        for (int nb = 0; nb < cfg.N_k; ++nb)
            intf_lin +=
                2.0 * fl.intf_w[static_cast<std::size_t>(kb) * cfg.N_k + nb].dot(x.xI[kb][nb]).real();

    const double ml = fl.mu_l - 1.0;
    return -eps_intf / (mu - 1.0) - eps_energy + (jam_lin - fl.jam_norm_l) +
           intf_lin / ml - fl.intf_norm_l * (mu - 1.0) / (ml * ml) +
           (1.0 + 2.0 / ml - (mu - 1.0) / (ml * ml)) * cfg.N_ev * cfg.sigma_a2;
}

// Left-hand side of the arithmetic-geometric mean split at (beta, mu).
inline double floor_constraint_lhs(const FloorLinearization& fl, double beta, double mu) {
    const double g = fl.gamma_l * (fl.mu_l - 1.0);
    return 0.5 * (beta / g + g / ((mu - 1.0) * (mu - 1.0)));
}

// Largest beta admissible at (x, mu); nonpositive means no admissible beta.
inline double max_feasible_beta(const FloorLinearization& fl, const ChannelSet& cs,
                                const BeamformerSet& x, double mu, const NetworkConfig& cfg) {
    const double g = fl.gamma_l * (fl.mu_l - 1.0);
    return g * (2.0 * floor_lin_value(fl, cs, x, mu, cfg) - g / ((mu - 1.0) * (mu - 1.0)));
}

inline std::vector<BoundPiece> describe(const FloorLinearization& fl) {
    nlohmann::json jam = nlohmann::json::array();
    for (const auto& w : fl.jam_w) jam.push_back(secbeam::detail::vec_json(w));
    nlohmann::json intf = nlohmann::json::array();
    for (const auto& w : fl.intf_w) intf.push_back(secbeam::detail::vec_json(w));
    std::vector<BoundPiece> ps;
    ps.push_back({PieceKind::ConvexQuadratic,
                  "floor-split-quadratic",
                  fl.k,
                  fl.n,
                  {{"mu_l", fl.mu_l}, {"gamma_l", fl.gamma_l}}});
    ps.push_back({PieceKind::Reciprocal,
                  "floor-split-reciprocal",
                  fl.k,
                  fl.n,
                  {{"coefficient", 0.5 * fl.gamma_l * (fl.mu_l - 1.0)}}});
    ps.push_back({PieceKind::QuadraticOverLinear,
                  "floor-eps-interference",
                  fl.k,
                  fl.n,
                  nlohmann::json::object()});
    ps.push_back({PieceKind::Linear,
                  "floor-linearized-terms",
                  fl.k,
                  fl.n,
                  {{"jam_w", std::move(jam)},
                   {"jam_norm_l", fl.jam_norm_l},
                   {"intf_w", std::move(intf)},
                   {"intf_norm_l", fl.intf_norm_l}}});
    return ps;
}

inline BoundPiece describe_mu_trust(const Iterate& it) {
    return {PieceKind::Linear, "mu-trust-region", -1, -1, {{"cap", mu_trust_cap(it)}}};
}

// ---------------------------------------------------------------------------
// Inner power constraints
// ---------------------------------------------------------------------------

// Convex over-estimate of the transformed transmit power: the information
// part Sum ||xI||^2 / mu is kept exact (quadratic over linear), the concave
// part -Sum ||xE||^2 / mu is replaced by its tangent upper bound
//   -2 Re{xE_l^H xE}/mu_l + ||xE_l||^2 mu / mu_l^2.
// Scope is one cell (k >= 0, budget Pk_max) or the network (k = -1, budget
// P_max). Tight at the expansion point; over-estimates the true power
// everywhere, so satisfying it implies the original budget.
struct PowerInner {
    int k = -1;  // -1: network-wide
    double budget = 0.0;
    double mu_l = 0.0;
    std::vector<Vec> xE_l;  // expansion energy beams in scope order
    double xE_norm_l = 0.0;
};

inline std::vector<PowerInner> inner_power_constraints(const Iterate& it,
                                                       const NetworkConfig& cfg) {
    std::vector<PowerInner> out;
    out.reserve(static_cast<std::size_t>(cfg.K) + 1);
    for (int k = 0; k < cfg.K; ++k) {
        PowerInner p;
        p.k = k;
        p.budget = cfg.Pk_max;
        p.mu_l = it.mu;
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
            p.xE_l.push_back(it.x.xE[k][n1]);
            p.xE_norm_l += it.x.xE[k][n1].squaredNorm();
        }
        out.push_back(std::move(p));
    }
    PowerInner net;
    net.k = -1;
    net.budget = cfg.P_max;
    net.mu_l = it.mu;
    for (int k = 0; k < cfg.K; ++k)
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
            net.xE_l.push_back(it.x.xE[k][n1]);
            net.xE_norm_l += it.x.xE[k][n1].squaredNorm();
        }
    out.push_back(std::move(net));
    return out;
}

inline double power_inner_lhs(const PowerInner& p, const BeamformerSet& x, double mu,
                              const NetworkConfig& cfg) {
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    const int k0 = (p.k < 0) ? 0 : p.k;
    const int k1 = (p.k < 0) ? cfg.K : p.k + 1;
    double e = 0.0, i = 0.0, lin = 0.0;
    std::size_t idx = 0;
    for (int k = k0; k < k1; ++k) {
        for (int n1 = 0; n1 < cfg.N1_k; ++n1, ++idx)
            lin += p.xE_l[idx].dot(x.xE[k][n1]).real();
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) e += x.xE[k][n1].squaredNorm();
        for (int n = 0; n < cfg.N_k; ++n) i += x.xI[k][n].squaredNorm();
    }
    return e + i / mu - 2.0 * lin / p.mu_l + p.xE_norm_l * mu / (p.mu_l * p.mu_l);
}

inline std::vector<BoundPiece> describe(const PowerInner& p) {
    const std::string stem = (p.k < 0) ? "network-power-inner" : "cell-power-inner";
    nlohmann::json xe = nlohmann::json::array();
    for (const auto& v : p.xE_l) xe.push_back(secbeam::detail::vec_json(v));
    std::vector<BoundPiece> ps;
    ps.push_back({PieceKind::QuadraticOverLinear, stem + "-info", p.k, -1,
                  {{"budget", p.budget}}});
    ps.push_back({PieceKind::ConvexQuadratic, stem + "-energy", p.k, -1,
                  nlohmann::json::object()});
    ps.push_back({PieceKind::Linear, stem + "-linearized", p.k, -1,
                  {{"mu_l", p.mu_l}, {"xE_l", std::move(xe)}, {"xE_norm_l", p.xE_norm_l}}});
    return ps;
}

// ---------------------------------------------------------------------------
// Inner harvested-energy constraint
// ---------------------------------------------------------------------------

// Tangent under-estimate of the received energy-beam power at zone-1 UE
// (k, n1): each |h^H xE|^2 is replaced by 2 Re{conj(h^H xE_l)(h^H xE)} -
// |h^H xE_l|^2, giving the affine left-hand side
//   lhs(xE) = 2 Sum Re{w^H xE} - lin_norm_l,  w = (h^H xE_l) h.
// The requirement lhs >= (e_min/zeta)(1 + 1/(mu-1)) - sigma_a2 then implies
// the true harvested-energy constraint (the under-estimate only strengthens
// it); 1/(mu-1) enters the assembly through a reciprocal epigraph.
struct EhInner {
    int k = 0;
    int n1 = 0;
    double e_min_over_zeta = 0.0;
    double sigma_a2 = 0.0;
    std::vector<Vec> lin_w;  // flattened [kb * N1 + nb]
    double lin_norm_l = 0.0;
};

inline std::vector<EhInner> inner_eh_constraint(const Iterate& it, const ChannelSet& cs,
                                                const NetworkConfig& cfg) {
    std::vector<EhInner> out;
    out.reserve(static_cast<std::size_t>(cfg.K) * cfg.N1_k);
    for (int k = 0; k < cfg.K; ++k)
        for (int n1 = 0; n1 < cfg.N1_k; ++n1) {
            EhInner e;
            e.k = k;
            e.n1 = n1;
            e.e_min_over_zeta = cfg.e_min / cfg.zeta;
            e.sigma_a2 = cfg.sigma_a2;
            e.lin_w.resize(static_cast<std::size_t>(cfg.K) * cfg.N1_k);
            for (int kb = 0; kb < cfg.K; ++kb)
                for (int nb = 0; nb < cfg.N1_k; ++nb) {
                    const std::complex<double> c = cs.h[kb][k][n1].dot(it.x.xE[kb][nb]);
                    e.lin_w[static_cast<std::size_t>(kb) * cfg.N1_k + nb] =
                        cs.h[kb][k][n1] * c;
                    e.lin_norm_l += std::norm(c);
                }
            out.push_back(std::move(e));
        }
    return out;
}

inline double eh_inner_lhs(const EhInner& e, const BeamformerSet& x, const NetworkConfig& cfg) {
    double lin = 0.0;
    for (int kb = 0; kb < cfg.K; ++kb)
        for (int nb = 0; nb < cfg.N1_k; ++nb)
            lin += e.lin_w[static_cast<std::size_t>(kb) * cfg.N1_k + nb].dot(x.xE[kb][nb]).real();
    return 2.0 * lin - e.lin_norm_l;
}

inline double eh_inner_rhs(const EhInner& e, double mu) {
    if (!(mu > 1.0)) throw std::invalid_argument("mu must be > 1");
    return e.e_min_over_zeta * (1.0 + 1.0 / (mu - 1.0)) - e.sigma_a2;
}

inline std::vector<BoundPiece> describe(const EhInner& e) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& v : e.lin_w) w.push_back(secbeam::detail::vec_json(v));
    std::vector<BoundPiece> ps;
    ps.push_back({PieceKind::Linear, "harvest-inner", e.k, e.n1,
                  {{"lin_w", std::move(w)}, {"lin_norm_l", e.lin_norm_l}}});
    ps.push_back({PieceKind::Reciprocal, "harvest-inner-threshold", e.k, e.n1,
                  {{"e_min_over_zeta", e.e_min_over_zeta}, {"sigma_a2", e.sigma_a2}}});
    return ps;
}

// ---------------------------------------------------------------------------
// Ratio-objective (energy-efficiency) bounds
// ---------------------------------------------------------------------------

// Concave lower bound of the power-scaled user-rate term f1/(mu sqrt(t)):
//   Phi(x, mu, t) = A - B phi(x)/nu - C (tau_l/(2 mu_l) mu^2 + mu_l/(2 tau_l) t)
// with the same nu mechanics as RateMinorant. The mu*sqrt(t) product is
// majorized by its arithmetic-geometric mean split around (mu_l, tau_l^2),
// which keeps the subtracted term jointly convex. Tight at the expansion.
struct SeeRateMinorant {
    int k = 0;
    int n = 0;
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;
    double mu_l = 0.0;
    double tau_l = 0.0;         // sqrt of the consumed-power square at expansion
    double re_expansion = 0.0;
    double eps = 0.0;
    double floor = 0.0;
    double phi_expansion = 0.0;

    bool active() const { return B > 0.0; }
};

inline std::vector<SeeRateMinorant> see_minorant_phi(const Iterate& it, const ChannelSet& cs,
                                                     const NetworkConfig& cfg) {
    std::vector<SeeRateMinorant> out;
    out.reserve(static_cast<std::size_t>(cfg.K) * cfg.N_k);
    for (int k = 0; k < cfg.K; ++k) {
        if (!(it.tau[k] > 0.0)) throw ExpansionError(k, -1, "nonpositive tau at expansion");
        for (int n = 0; n < cfg.N_k; ++n) {
            SeeRateMinorant m;
            m.k = k;
            m.n = n;
            m.mu_l = it.mu;
            m.tau_l = it.tau[k];
            const double re = cs.h[k][k][n].dot(it.x.xI[k][n]).real();
            if (re < -1e-12)
                throw ExpansionError(k, n, "expansion point is not phase-rotated");
            m.re_expansion = std::max(re, 0.0);
            m.eps = cs.eps_ue[k][k][n];
            m.floor = nu_floor(cfg);
            m.phi_expansion = phi(cs, it.x, cfg, k, n);
            const double margin =
                m.re_expansion * m.re_expansion - m.eps * it.x.xI[k][n].squaredNorm();
            m.D = margin / m.phi_expansion;
            if (m.D < -1e-12)
                throw ExpansionError(k, n, "negative worst-case signal margin at expansion");
            if (m.D <= 1e-12) {
                m.D = 0.0;
            } else {
                const double u = m.mu_l * m.tau_l;
                m.A = 2.0 * std::log1p(m.D) / u + m.D / (u * (m.D + 1.0));
                m.B = m.D * m.D / (u * (m.D + 1.0));
                m.C = std::log1p(m.D) / (u * u);
            }
            out.push_back(m);
        }
    }
    return out;
}

inline double see_minorant_value(const SeeRateMinorant& m, const ChannelSet& cs,
                                 const BeamformerSet& x, double mu, double t,
                                 const NetworkConfig& cfg) {
    if (!m.active()) return 0.0;
    const double re = cs.h[m.k][m.k][m.n].dot(x.xI[m.k][m.n]).real();
    const double cap = 2.0 * m.re_expansion * re - m.re_expansion * m.re_expansion -
                       m.eps * x.xI[m.k][m.n].squaredNorm();
    if (cap < m.floor) return -std::numeric_limits<double>::infinity();
    return m.A - m.B * phi(cs, x, cfg, m.k, m.n) / cap -
           m.C * (m.tau_l / (2.0 * m.mu_l) * mu * mu + m.mu_l / (2.0 * m.tau_l) * t);
}

inline std::vector<BoundPiece> describe(const SeeRateMinorant& m) {
    std::vector<BoundPiece> ps;
    ps.push_back({PieceKind::QuadraticOverLinear,
                  "ratio-rate-minorant",
                  m.k,
                  m.n,
                  {{"A", m.A}, {"B", m.B}, {"C", m.C}, {"D", m.D}, {"tau_l", m.tau_l}}});
    if (m.active()) {
        ps.push_back({PieceKind::ConvexQuadratic,
                      "ratio-rate-minorant-cap",
                      m.k,
                      m.n,
                      {{"re_expansion", m.re_expansion}, {"eps", m.eps}}});
        ps.push_back({PieceKind::ConvexQuadratic,
                      "ratio-rate-minorant-split",
                      m.k,
                      m.n,
                      {{"mu_coef", m.C * m.tau_l / (2.0 * m.mu_l)},
                       {"t_coef", m.C * m.mu_l / (2.0 * m.tau_l)}}});
    }
    return ps;
}

// Convex upper bound of the power-scaled leakage term f2bar/sqrt(t):
//   Psi(x, t, beta) = f2_expansion/sqrt(t)
//                     + slope * ( S(x)/sqrt(t beta)
//                                 - s_expansion (3 - t/t_l) / (2 tau_l) )
// valid for 0 < t <= 3 t_l (trust region) and beta within the floor split.
// The final term is the tangent under-estimate of 1/sqrt(t) scaled by the
// expansion leakage ratio; tight at (x_l, t_l, beta_l).
struct SeeEvMajorant {
    int k = 0;
    int n = 0;
    double f2_expansion = 0.0;
    double slope = 0.0;
    double s_expansion = 0.0;
    double gamma_expansion = 0.0;
    double tau_l = 0.0;
    double t_l = 0.0;  // tau_l^2
    double eps_ev = 0.0;
};

inline std::vector<SeeEvMajorant> see_majorant_psi(const Iterate& it, const ChannelSet& cs,
                                                   const NetworkConfig& cfg) {
    std::vector<SeeEvMajorant> out;
    out.reserve(static_cast<std::size_t>(cfg.K) * cfg.N_k);
    for (int k = 0; k < cfg.K; ++k) {
        if (!(it.tau[k] > 0.0)) throw ExpansionError(k, -1, "nonpositive tau at expansion");
        for (int n = 0; n < cfg.N_k; ++n) {
            SeeEvMajorant m;
            m.k = k;
            m.n = n;
            const double q = it.qbar[k][n];
            if (!(q > 0.0))
                throw ExpansionError(k, n, "nonpositive eavesdropper floor at expansion");
            m.gamma_expansion = q;
            m.s_expansion = ev_signal(cs, it.x, cfg, k, n) / q;
            m.slope = 1.0 / (1.0 + m.s_expansion);
            m.f2_expansion = std::log1p(m.s_expansion);
            m.tau_l = it.tau[k];
            m.t_l = it.tau[k] * it.tau[k];
            m.eps_ev = cs.eps_ev[k][k];
            out.push_back(m);
        }
    }
    return out;
}

// Upper limit of the trust region on t around the expansion point.
inline double t_trust_cap(const SeeEvMajorant& m) { return 3.0 * m.t_l; }

inline double see_majorant_value(const SeeEvMajorant& m, const ChannelSet& cs,
                                 const BeamformerSet& x, double t, double beta,
                                 const NetworkConfig& cfg) {
    if (!(t > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("t and beta must be positive");
    const double S = ev_signal(cs, x, cfg, m.k, m.n);
    return m.f2_expansion / std::sqrt(t) +
           m.slope * (S / std::sqrt(t * beta) -
                      m.s_expansion * (3.0 - t / m.t_l) / (2.0 * m.tau_l));
}

inline std::vector<BoundPiece> describe(const SeeEvMajorant& m) {
    std::vector<BoundPiece> ps;
    ps.push_back({PieceKind::Reciprocal,
                  "ratio-ev-majorant-constant",
                  m.k,
                  m.n,
                  {{"f2_expansion", m.f2_expansion}}});
    ps.push_back({PieceKind::EpigraphCone,
                  "ratio-ev-majorant-leakage",
                  m.k,
                  m.n,
                  {{"slope", m.slope}, {"eps_ev", m.eps_ev}}});
    ps.push_back({PieceKind::Linear,
                  "ratio-ev-majorant-tangent",
                  m.k,
                  m.n,
                  {{"slope", m.slope},
                   {"s_expansion", m.s_expansion},
                   {"tau_l", m.tau_l},
                   {"t_l", m.t_l}}});
    ps.push_back({PieceKind::Linear, "t-trust-region", m.k, m.n, {{"cap", t_trust_cap(m)}}});
    return ps;
}

// ---------------------------------------------------------------------------
// Scalar-inequality battery
// ---------------------------------------------------------------------------

// One randomized check of a scalar inequality used by the bound constructions.
struct InequalityCheck {
    std::string name;
    int samples = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {

inline double log_uniform(Rng& rng, double lo, double hi) {
    return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

inline Vec random_cvec(Rng& rng, int dim) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.cnormal();
    return v;
}

inline void record_check(std::vector<InequalityCheck>& out, std::string name, int samples,
                         double max_violation, double tol) {
    out.push_back({std::move(name), samples, max_violation, tol, max_violation <= tol});
}

} // namespace detail

// Randomized verification of every scalar inequality underpinning the bounds,
// each sampled over its stated domain with tangency checked at the matched
// point. Returns one report per inequality; a violation beyond `tol` fails.
inline std::vector<InequalityCheck> appendix_inequality_suite(std::uint64_t seed = 20240801,
                                                              int n_samples = 10000,
                                                              double tol = 1e-12) {
    using detail::log_uniform;
    using detail::random_cvec;
    std::vector<InequalityCheck> out;
    Rng rng = Rng::stream(seed, 0xA11CE);

    // Tangent-plane lower bound of the jointly convex ln(1 + 1/x)/t.
    {
        double worst = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            const double x = log_uniform(rng, 0.1, 10.0), xb = log_uniform(rng, 0.1, 10.0);
            const double t = log_uniform(rng, 0.1, 10.0), tb = log_uniform(rng, 0.1, 10.0);
            const double lhs = std::log1p(1.0 / x) / t;
            const double rhs = 2.0 * std::log1p(1.0 / xb) / tb + 1.0 / (tb * (xb + 1.0)) -
                               x / ((xb + 1.0) * xb * tb) - std::log1p(1.0 / xb) / (tb * tb) * t;
            worst = std::max(worst, rhs - lhs);
            const double tangent = 2.0 * std::log1p(1.0 / xb) / tb + 1.0 / (tb * (xb + 1.0)) -
                                   xb / ((xb + 1.0) * xb * tb) -
                                   std::log1p(1.0 / xb) / (tb * tb) * tb;
            worst = std::max(worst, std::abs(tangent - std::log1p(1.0 / xb) / tb));
        }
        detail::record_check(out, "log-reciprocal-tangent", n_samples, worst, tol);
    }

    // Same bound after inverting the first argument: ln(1+x)/t >= a - b/x - ct.
    {
        double worst = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            const double x = log_uniform(rng, 0.1, 10.0), xb = log_uniform(rng, 0.1, 10.0);
            const double t = log_uniform(rng, 0.1, 10.0), tb = log_uniform(rng, 0.1, 10.0);
            const double a = 2.0 * std::log1p(xb) / tb + xb / (tb * (xb + 1.0));
            const double b = xb * xb / (tb * (xb + 1.0));
            const double c = std::log1p(xb) / (tb * tb);
            worst = std::max(worst, (a - b / x - c * t) - std::log1p(x) / t);
            if (!(a > 0.0 && b > 0.0 && c > 0.0)) worst = std::max(worst, 1.0);
            worst = std::max(worst, std::abs((a - b / xb - c * tb) - std::log1p(xb) / tb));
        }
        detail::record_check(out, "log-over-linear-bound", n_samples, worst, tol);
    }

    // Chord upper bound of the concave ln(1 + t), tight at the matched point.
    {
        double worst = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            const double t = log_uniform(rng, 1e-3, 1e3) - 1e-3;
            const double tp = log_uniform(rng, 1e-3, 1e3) - 1e-3;
            const double rhs = std::log1p(tp) + (t - tp) / (1.0 + tp);
            worst = std::max(worst, std::log1p(t) - rhs);
            worst = std::max(worst, std::abs(std::log1p(tp) + (tp - tp) / (1.0 + tp) -
                                             std::log1p(tp)));
        }
        detail::record_check(out, "log-concavity-upper", n_samples, worst, tol);
    }

    // Rate-term instance: the same bound with the worst-case SINR slot filled
    // by (Re h^H x)^2 - eps ||x||^2 over an interference value.
    {
        double worst = 0.0;
        int done = 0;
        while (done < n_samples) {
            const int dim = 1 + static_cast<int>(rng.uniform() * 4.0);
            const Vec h = random_cvec(rng, dim);
            Vec xl = random_cvec(rng, dim);
            const std::complex<double> c0 = h.dot(xl);
            if (std::abs(c0) > 0.0) xl *= std::conj(c0) / std::abs(c0);
            const double rel = h.dot(xl).real();
            const double eps = 0.5 * rng.uniform() * rel * rel / xl.squaredNorm();
            const double phil = log_uniform(rng, 0.1, 10.0) * rel * rel;
            const double ml = rel * rel - eps * xl.squaredNorm();
            const Vec x = xl + 0.4 * random_cvec(rng, dim);
            const double re = h.dot(x).real();
            const double m = re * re - eps * x.squaredNorm();
            if (!(m > 1e-8) || !(ml > 1e-8)) continue;
            ++done;
            const double phi_s = log_uniform(rng, 0.1, 10.0) * rel * rel;
            const double mu = log_uniform(rng, 1.05, 8.0), mul = log_uniform(rng, 1.05, 8.0);
            const double d = ml / phil;
            const double a = 2.0 * std::log1p(d) / mul + d / (mul * (d + 1.0));
            const double b = d * d / (mul * (d + 1.0));
            const double cc = std::log1p(d) / (mul * mul);
            const double lhs = std::log1p(m / phi_s) / mu;
            worst = std::max(worst, (a - b * phi_s / m - cc * mu) - lhs);
        }
        detail::record_check(out, "rate-term-bound", n_samples, worst, tol);
    }

    // Capped variant: the ratio denominator replaced by any admissible
    // auxiliary nu <= psi(x) - eps ||x||^2 (psi the tangent bound of the
    // squared real part), which only deepens the minorant.
    {
        double worst = 0.0;
        int done = 0;
        while (done < n_samples) {
            const int dim = 1 + static_cast<int>(rng.uniform() * 4.0);
            const Vec h = random_cvec(rng, dim);
            Vec xl = random_cvec(rng, dim);
            const std::complex<double> c0 = h.dot(xl);
            if (std::abs(c0) > 0.0) xl *= std::conj(c0) / std::abs(c0);
            const double rel = h.dot(xl).real();
            const double eps = 0.5 * rng.uniform() * rel * rel / xl.squaredNorm();
            const double phil = log_uniform(rng, 0.1, 10.0) * rel * rel;
            const double ml = rel * rel - eps * xl.squaredNorm();
            const Vec x = xl + 0.3 * random_cvec(rng, dim);
            const double re = h.dot(x).real();
            const double psi = 2.0 * rel * re - rel * rel;
            const double cap = psi - eps * x.squaredNorm();
            const double m = re * re - eps * x.squaredNorm();
            if (!(cap > 1e-8) || !(ml > 1e-8)) continue;
            ++done;
            const double nu = cap * (0.1 + 0.9 * rng.uniform());
            const double phi_s = log_uniform(rng, 0.1, 10.0) * rel * rel;
            const double mu = log_uniform(rng, 1.05, 8.0), mul = log_uniform(rng, 1.05, 8.0);
            const double d = ml / phil;
            const double a = 2.0 * std::log1p(d) / mul + d / (mul * (d + 1.0));
            const double b = d * d / (mul * (d + 1.0));
            const double cc = std::log1p(d) / (mul * mul);
            const double lhs = std::log1p(m / phi_s) / mu;
            worst = std::max(worst, (a - b * phi_s / nu - cc * mu) - lhs);
            worst = std::max(worst, psi - re * re);  // tangent bound property
        }
        detail::record_check(out, "capped-rate-term-bound", n_samples, worst, tol);
    }

    // Dividing the floor requirement sqrt(beta) <= qbar by (mu - 1) is an
    // exact rearrangement: both residuals must agree.
    {
        double worst = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            const double J = 3.0 * rng.uniform(), I = 3.0 * rng.uniform();
            const double eI = 3.0 * rng.uniform(), eE = 3.0 * rng.uniform();
            const double ns = rng.uniform();
            const double mu = log_uniform(rng, 1.05, 8.0);
            const double beta = log_uniform(rng, 0.01, 10.0);
            const double q = (mu - 1.0) * (J - eE) + (I - eI) + mu * ns;
            const double split_lhs = std::sqrt(beta) / (mu - 1.0) + eI / (mu - 1.0) + eE;
            const double split_rhs = J + I / (mu - 1.0) + (1.0 + 1.0 / (mu - 1.0)) * ns;
            const double r1 = (split_rhs - split_lhs) * (mu - 1.0);
            const double r2 = q - std::sqrt(beta);
            worst = std::max(worst, std::abs(r1 - r2) / std::max(1.0, std::abs(r2)));
        }
        detail::record_check(out, "floor-rearrangement", n_samples, worst, tol);
    }

    // Tangent lower bound of the jointly convex ||x||^2 / y.
    {
        double worst = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            const int dim = 1 + static_cast<int>(rng.uniform() * 5.0);
            const Vec x = random_cvec(rng, dim), xl = random_cvec(rng, dim);
            const double y = log_uniform(rng, 0.1, 10.0), yl = log_uniform(rng, 0.1, 10.0);
            const double rhs =
                2.0 * xl.dot(x).real() / yl - xl.squaredNorm() * y / (yl * yl);
            worst = std::max(worst, rhs - x.squaredNorm() / y);
            const double tangent =
                2.0 * xl.dot(xl).real() / yl - xl.squaredNorm() * yl / (yl * yl);
            worst = std::max(worst, std::abs(tangent - xl.squaredNorm() / yl));
        }
        detail::record_check(out, "norm-ratio-linearization", n_samples, worst, tol);
    }

    // Tangent lower bound of the convex ||x||^2.
    {
        double worst = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            const int dim = 1 + static_cast<int>(rng.uniform() * 5.0);
            const Vec x = random_cvec(rng, dim), xl = random_cvec(rng, dim);
            worst = std::max(worst,
                             (2.0 * xl.dot(x).real() - xl.squaredNorm()) - x.squaredNorm());
        }
        detail::record_check(out, "norm-linearization", n_samples, worst, tol);
    }

    // Tangent lower bound of the convex 1/(mu - 1) on mu > 1.
    {
        double worst = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            const double mu = log_uniform(rng, 1.01, 10.0);
            const double mul = log_uniform(rng, 1.01, 10.0);
            const double rhs =
                2.0 / (mul - 1.0) - (mu - 1.0) / ((mul - 1.0) * (mul - 1.0));
            worst = std::max(worst, rhs - 1.0 / (mu - 1.0));
        }
        detail::record_check(out, "reciprocal-linearization", n_samples, worst, tol);
    }

    // Arithmetic-geometric mean upper bound of sqrt(beta)/(mu-1), tight at the
    // matched point.
    {
        double worst = 0.0;
        for (int s = 0; s < n_samples; ++s) {
            const double beta = log_uniform(rng, 0.01, 10.0);
            const double betal = log_uniform(rng, 0.01, 10.0);
            const double mu = log_uniform(rng, 1.05, 8.0), mul = log_uniform(rng, 1.05, 8.0);
            const double g = std::sqrt(betal) * (mul - 1.0);
            const double rhs = 0.5 * (beta / g + g / ((mu - 1.0) * (mu - 1.0)));
            worst = std::max(worst, std::sqrt(beta) / (mu - 1.0) - rhs);
            const double rhs_m = 0.5 * (betal / g + g / ((mul - 1.0) * (mul - 1.0)));
            worst = std::max(worst, std::abs(std::sqrt(betal) / (mul - 1.0) - rhs_m));
        }
        detail::record_check(out, "sqrt-product-split", n_samples, worst, tol);
    }

    return out;
}

} // namespace secbeam::sca
