#pragma once

#include <complex>
#include <vector>

#include "secbeam/metrics.hpp"
#include "secbeam/model.hpp"
#include "secbeam/rng.hpp"

namespace testutil {

using namespace secbeam;

// A ChannelSet whose channels are drawn CN(0, I) scaled by `chan_scale`, with
// radii filled per the uncertainty formulas — bypasses geometry for tests that
// need full control.
inline ChannelSet synthetic_channels(const NetworkConfig& cfg, Rng& rng, double chan_scale = 1.0) {
    ChannelSet cs;
    const int K = cfg.K, N = cfg.N_k;
    cs.h.assign(K, std::vector<std::vector<Vec>>(K, std::vector<Vec>(N)));
    cs.eps_ue.assign(K, std::vector<std::vector<double>>(K, std::vector<double>(N, 0.0)));
    cs.Hev.assign(K, std::vector<Mat>(K));
    cs.eps_ev.assign(K, std::vector<double>(K, 0.0));
    cs.bs_pos.assign(K, Point2{});
    cs.ue_pos.assign(K, std::vector<Point2>(N));
    cs.ev_pos.assign(K, Point2{});
    for (int kb = 0; kb < K; ++kb)
        for (int k = 0; k < K; ++k) {
            for (int n = 0; n < N; ++n) {
                Vec h(cfg.M);
                for (int m = 0; m < cfg.M; ++m) h(m) = chan_scale * rng.cnormal();
                cs.h[kb][k][n] = h;
                cs.eps_ue[kb][k][n] = uncertainty_radius(cfg, h.squaredNorm(), kb == k);
            }
            Mat H(cfg.M, cfg.N_ev);
            for (int c = 0; c < cfg.N_ev; ++c)
                for (int m = 0; m < cfg.M; ++m) H(m, c) = chan_scale * rng.cnormal();
            cs.Hev[kb][k] = H;
            cs.eps_ev[kb][k] = uncertainty_radius(cfg, H.squaredNorm(), false);
        }
    return cs;
}

inline BeamformerSet random_beams(const NetworkConfig& cfg, Rng& rng, double scale) {
    BeamformerSet x = BeamformerSet::zeros(cfg);
    for (int k = 0; k < cfg.K; ++k) {
        for (int n1 = 0; n1 < cfg.N1_k; ++n1)
            for (int m = 0; m < cfg.M; ++m) x.xE[k][n1](m) = scale * rng.cnormal();
        for (int n = 0; n < cfg.N_k; ++n)
            for (int m = 0; m < cfg.M; ++m) x.xI[k][n](m) = scale * rng.cnormal();
    }
    return x;
}

} // namespace testutil
