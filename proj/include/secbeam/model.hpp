#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "secbeam/config.hpp"
#include "secbeam/rng.hpp"

namespace secbeam {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

// Nominal channels plus uncertainty radii.
//   h[kbar][k][n]   : BS kbar -> UE (k,n), length M
//   Hev[kbar][k]    : BS kbar -> eavesdropper in cell k, M x N_ev
//   eps_ue[kbar][k][n], eps_ev[kbar][k] : bounded-error radii (squared-norm scale)
struct ChannelSet {
    std::vector<std::vector<std::vector<Vec>>> h;
    std::vector<std::vector<Mat>> Hev;
    std::vector<std::vector<std::vector<double>>> eps_ue;
    std::vector<std::vector<double>> eps_ev;

    // Geometry retained for scenario dumps.
    std::vector<Point2> bs_pos;
    std::vector<std::vector<Point2>> ue_pos; // [k][n]
    std::vector<Point2> ev_pos;              // [k]
};

namespace detail {

// Documented layout constants: adjacent BSs sit 2*cell_radius apart (tangent
// cells). One cell sits at the origin; two cells share the x-axis; three form
// an equilateral triangle; more form a regular polygon with side 2*cell_radius.
inline std::vector<Point2> bs_layout(int K, double R) {
    std::vector<Point2> p(static_cast<std::size_t>(K));
    if (K == 1) {
        p[0] = {0.0, 0.0};
    } else if (K == 2) {
        p[0] = {0.0, 0.0};
        p[1] = {2.0 * R, 0.0};
    } else if (K == 3) {
        p[0] = {0.0, 0.0};
        p[1] = {2.0 * R, 0.0};
        p[2] = {R, R * std::sqrt(3.0)};
    } else {
        const double pi = 3.141592653589793238462643383279502884;
        const double rho = R / std::sin(pi / K);
        for (int k = 0; k < K; ++k)
            p[static_cast<std::size_t>(k)] = {rho * std::cos(2.0 * pi * k / K),
                                              rho * std::sin(2.0 * pi * k / K)};
    }
    return p;
}

// Stream-id tags so each entity owns an independent substream regardless of
// generation order.
enum class StreamTag : std::uint64_t { ue_pos = 1, ev_pos = 2, ue_chan = 3, ev_chan = 4 };

inline std::uint64_t stream_id(StreamTag tag, int kbar, int k, int n) {
    return (static_cast<std::uint64_t>(tag) << 40) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(kbar)) << 20) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k)) << 10) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(n));
}

inline Point2 draw_in_disc(Rng& rng, Point2 center, double radius) {
    const double pi = 3.141592653589793238462643383279502884;
    const double r = radius * std::sqrt(rng.uniform());
    const double t = 2.0 * pi * rng.uniform();
    return {center.x + r * std::cos(t), center.y + r * std::sin(t)};
}

inline Point2 draw_in_annulus(Rng& rng, Point2 center, double r0, double r1) {
    const double pi = 3.141592653589793238462643383279502884;
    const double u = rng.uniform();
    const double r = std::sqrt(r0 * r0 + u * (r1 * r1 - r0 * r0));
    const double t = 2.0 * pi * rng.uniform();
    return {center.x + r * std::cos(t), center.y + r * std::sin(t)};
}

inline double distance(Point2 a, Point2 b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Bearing of `to` as seen from `from`, radians in (-pi, pi].
inline double bearing(Point2 from, Point2 to) {
    return std::atan2(to.y - from.y, to.x - from.x);
}

} // namespace detail

// Rician fading with deterministic unit-modulus phase-ramp line-of-sight terms
// set by geometry; a 1 m distance floor avoids the pathloss singularity.
inline Vec rician_vector(Rng& rng, const NetworkConfig& cfg, double dist, double theta) {
    const double pi = 3.141592653589793238462643383279502884;
    const double d = std::max(dist, 1.0);
    const double amp = std::sqrt(std::pow(d, -cfg.pathloss_exp));
    const double w_los = std::sqrt(cfg.rician_K / (cfg.rician_K + 1.0));
    const double w_nlos = std::sqrt(1.0 / (cfg.rician_K + 1.0));
    Vec v(cfg.M);
    for (int m = 0; m < cfg.M; ++m) {
        const std::complex<double> los = std::polar(1.0, pi * m * std::sin(theta));
        v(m) = amp * (w_los * los + w_nlos * rng.cnormal());
    }
    return v;
}

inline Mat rician_matrix(Rng& rng, const NetworkConfig& cfg, double dist, double theta) {
    const double pi = 3.141592653589793238462643383279502884;
    const double d = std::max(dist, 1.0);
    const double amp = std::sqrt(std::pow(d, -cfg.pathloss_exp));
    const double w_los = std::sqrt(cfg.rician_K / (cfg.rician_K + 1.0));
    const double w_nlos = std::sqrt(1.0 / (cfg.rician_K + 1.0));
    Mat H(cfg.M, cfg.N_ev);
    for (int nr = 0; nr < cfg.N_ev; ++nr)
        for (int m = 0; m < cfg.M; ++m) {
            const std::complex<double> los = std::polar(1.0, pi * (m - nr) * std::sin(theta));
            H(m, nr) = amp * (w_los * los + w_nlos * rng.cnormal());
        }
    return H;
}

// Draws the full scenario: zone-1 UEs uniform in the inner disc, remaining UEs
// uniform in the annulus, one eavesdropper per cell uniform in the inner disc.
// Deterministic under a fixed cfg.seed.
inline ChannelSet generate_channels(const NetworkConfig& cfg) {
    validate_config(cfg);
    using namespace detail;

    ChannelSet cs;
    const int K = cfg.K, N = cfg.N_k, N1 = cfg.N1_k;
    cs.bs_pos = bs_layout(K, cfg.cell_radius);

    cs.ue_pos.assign(K, std::vector<Point2>(N));
    cs.ev_pos.assign(K, Point2{});
    for (int k = 0; k < K; ++k) {
        for (int n = 0; n < N; ++n) {
            Rng rng = Rng::stream(cfg.seed, stream_id(StreamTag::ue_pos, 0, k, n));
            cs.ue_pos[k][n] = (n < N1)
                                  ? draw_in_disc(rng, cs.bs_pos[k], cfg.inner_radius)
                                  : draw_in_annulus(rng, cs.bs_pos[k], cfg.inner_radius, cfg.cell_radius);
        }
        Rng rng = Rng::stream(cfg.seed, stream_id(StreamTag::ev_pos, 0, k, 0));
        cs.ev_pos[k] = draw_in_disc(rng, cs.bs_pos[k], cfg.inner_radius);
    }

    cs.h.assign(K, std::vector<std::vector<Vec>>(K, std::vector<Vec>(N)));
    cs.eps_ue.assign(K, std::vector<std::vector<double>>(K, std::vector<double>(N, 0.0)));
    cs.Hev.assign(K, std::vector<Mat>(K));
    cs.eps_ev.assign(K, std::vector<double>(K, 0.0));

    for (int kbar = 0; kbar < K; ++kbar) {
        for (int k = 0; k < K; ++k) {
            for (int n = 0; n < N; ++n) {
                Rng rng = Rng::stream(cfg.seed, stream_id(StreamTag::ue_chan, kbar, k, n));
                const double d = distance(cs.bs_pos[kbar], cs.ue_pos[k][n]);
                const double th = bearing(cs.bs_pos[kbar], cs.ue_pos[k][n]);
                cs.h[kbar][k][n] = rician_vector(rng, cfg, d, th);
                cs.eps_ue[kbar][k][n] =
                    uncertainty_radius(cfg, cs.h[kbar][k][n].squaredNorm(), kbar == k);
            }
            Rng rng = Rng::stream(cfg.seed, stream_id(StreamTag::ev_chan, kbar, k, 0));
            const double d = distance(cs.bs_pos[kbar], cs.ev_pos[k]);
            const double th = bearing(cs.bs_pos[kbar], cs.ev_pos[k]);
            cs.Hev[kbar][k] = rician_matrix(rng, cfg, d, th);
            cs.eps_ev[kbar][k] = uncertainty_radius(cfg, cs.Hev[kbar][k].squaredNorm(), false);
        }
    }
    return cs;
}

// ---- JSON scenario dump (complex entries as [re, im] pairs) ----

namespace detail {

inline nlohmann::json complex_json(const std::complex<double>& z) {
    return nlohmann::json::array({z.real(), z.imag()});
}

inline nlohmann::json vec_json(const Vec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v(i)));
    return a;
}

inline nlohmann::json mat_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json point_json(const Point2& p) {
    return nlohmann::json::array({p.x, p.y});
}

} // namespace detail

inline nlohmann::json config_to_json(const NetworkConfig& cfg) {
    return nlohmann::json{
        {"K", cfg.K},
        {"N_k", cfg.N_k},
        {"N1_k", cfg.N1_k},
        {"M", cfg.M},
        {"N_ev", cfg.N_ev},
        {"Pk_max", cfg.Pk_max},
        {"P_max", cfg.P_max},
        {"e_min", cfg.e_min},
        {"zeta", cfg.zeta},
        {"sigma_a2", cfg.sigma_a2},
        {"eps0", cfg.eps0},
        {"eps1", cfg.eps1},
        {"cell_radius", cfg.cell_radius},
        {"inner_radius", cfg.inner_radius},
        {"pathloss_exp", cfg.pathloss_exp},
        {"rician_K", cfg.rician_K},
        {"xi", cfg.xi},
        {"P_A", cfg.P_A},
        {"P_c", cfg.P_c},
        {"r_qos", cfg.r_qos},
        {"r_min", cfg.r_min},
        {"jam_sum_source_cell", cfg.jam_sum_source_cell},
        {"seed", cfg.seed},
    };
}

inline nlohmann::json scenario_to_json(const NetworkConfig& cfg, const ChannelSet& cs) {
    using namespace detail;
    nlohmann::json j;
    j["config"] = config_to_json(cfg);

    nlohmann::json bs = nlohmann::json::array();
    for (const auto& p : cs.bs_pos) bs.push_back(point_json(p));
    j["bs_pos"] = bs;

    nlohmann::json ue = nlohmann::json::array();
    for (const auto& row : cs.ue_pos) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& p : row) r.push_back(point_json(p));
        ue.push_back(r);
    }
    j["ue_pos"] = ue;

    nlohmann::json ev = nlohmann::json::array();
    for (const auto& p : cs.ev_pos) ev.push_back(point_json(p));
    j["ev_pos"] = ev;

    nlohmann::json h = nlohmann::json::array();
    nlohmann::json eps_ue = nlohmann::json::array();
    for (int kbar = 0; kbar < cfg.K; ++kbar) {
        nlohmann::json hk = nlohmann::json::array();
        nlohmann::json ek = nlohmann::json::array();
        for (int k = 0; k < cfg.K; ++k) {
            nlohmann::json hn = nlohmann::json::array();
            nlohmann::json en = nlohmann::json::array();
            for (int n = 0; n < cfg.N_k; ++n) {
                hn.push_back(vec_json(cs.h[kbar][k][n]));
                en.push_back(cs.eps_ue[kbar][k][n]);
            }
            hk.push_back(hn);
            ek.push_back(en);
        }
        h.push_back(hk);
        eps_ue.push_back(ek);
    }
    j["h"] = h;
    j["eps_ue"] = eps_ue;

    nlohmann::json Hev = nlohmann::json::array();
    nlohmann::json eps_ev = nlohmann::json::array();
    for (int kbar = 0; kbar < cfg.K; ++kbar) {
        nlohmann::json Hk = nlohmann::json::array();
        nlohmann::json ek = nlohmann::json::array();
        for (int k = 0; k < cfg.K; ++k) {
            Hk.push_back(mat_json(cs.Hev[kbar][k]));
            ek.push_back(cs.eps_ev[kbar][k]);
        }
        Hev.push_back(Hk);
        eps_ev.push_back(ek);
    }
    j["Hev"] = Hev;
    j["eps_ev"] = eps_ev;

    return j;
}

} // namespace secbeam
