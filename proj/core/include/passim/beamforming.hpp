#pragma once

#include <Eigen/Dense>
#include <vector>

#include "passim/channel.hpp"

namespace passim {

/// Precoding matrix (one column per user) with its power allocation.
struct Beamformer {
    CMatrix W;                     // M x K
    std::vector<double> power;     // p_k, W (MRT path)
    double water_level = 0.0;      // mu, W (MRT path)
};

struct RateReport {
    std::vector<double> sinr;
    std::vector<double> rate;  // log2(1 + SINR_k), bps/Hz
    double sum_rate = 0.0;
    bool feasible = false;     // SINR_k >= min_sinr for all k
};

/// SINR_k = |h_k^H w_k|^2 / (sum_{k' != k} |h_k^H w_k'|^2 + sigma^2).
std::vector<double> compute_sinr(const CMatrix& h_eff, const CMatrix& w,
                                 double noise_power);

RateReport rate_report(const CMatrix& h_eff, const CMatrix& w, double noise_power,
                       double min_sinr);

double sum_rate(const std::vector<double>& sinr);

/// MRT directions with water-filled powers across the (near-)orthogonal
/// per-user channels. Rows of h_eff are the per-user effective channels.
Beamformer mrt_waterfilling(const CMatrix& h_eff, double max_power,
                            double noise_power);

/// Water-filling over parallel channels with gains g_k: p_k = max(mu -
/// noise/g_k, 0), sum p_k = budget. Returns powers and the water level.
std::pair<std::vector<double>, double> waterfill(const std::vector<double>& gains,
                                                 double budget, double noise_power);

/// Zero-forcing precoder W = H^H (H H^H + loading I)^{-1}, scaled to
/// ||W||_F^2 = max_power. Negative loading selects the automatic default
/// (applied only when the channel Gram matrix is near singular).
Beamformer zf_precoder(const CMatrix& h_eff, double max_power,
                       double diagonal_loading = -1.0);

struct WmmseResult {
    Beamformer beamformer;
    std::vector<double> rate_trace;  // sum rate after each iteration
    int iterations = 0;
};

/// Alternating WMMSE sum-rate maximization under a total power constraint.
/// Initialized from MRT with equal power; stops on relative rate change
/// below tol or max_iters.
WmmseResult wmmse_precoder(const CMatrix& h_eff, double max_power,
                           double noise_power, int max_iters = 200,
                           double tol = 1e-6);

}  // namespace passim
