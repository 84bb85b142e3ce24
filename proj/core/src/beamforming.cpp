#include "passim/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace passim {

std::vector<double> compute_sinr(const CMatrix& h_eff, const CMatrix& w,
                                 double noise_power) {
    const int n_user = static_cast<int>(h_eff.rows());
    if (h_eff.cols() != w.rows() || w.cols() != n_user) {
        throw ConfigError("channel/precoder dimension mismatch");
    }
    const CMatrix rx = h_eff * w;  // rx(k, k') = h_k^H w_k'
    std::vector<double> sinr(n_user);
    for (int k = 0; k < n_user; ++k) {
        double interference = 0.0;
        for (int kp = 0; kp < n_user; ++kp) {
            if (kp != k) interference += std::norm(rx(k, kp));
        }
        sinr[k] = std::norm(rx(k, k)) / (interference + noise_power);
    }
    return sinr;
}

double sum_rate(const std::vector<double>& sinr) {
    double total = 0.0;
    for (double s : sinr) total += std::log2(1.0 + s);
    return total;
}

RateReport rate_report(const CMatrix& h_eff, const CMatrix& w, double noise_power,
                       double min_sinr) {
    RateReport rep;
    rep.sinr = compute_sinr(h_eff, w, noise_power);
    rep.feasible = true;
    for (double s : rep.sinr) {
        rep.rate.push_back(std::log2(1.0 + s));
        if (s < min_sinr) rep.feasible = false;
    }
    rep.sum_rate = std::accumulate(rep.rate.begin(), rep.rate.end(), 0.0);
    return rep;
}

std::pair<std::vector<double>, double> waterfill(const std::vector<double>& gains,
                                                 double budget, double noise_power) {
    const std::size_t k_count = gains.size();
    // Inverse gains sorted ascending; fill the strongest channels first.
    std::vector<std::size_t> order(k_count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return gains[a] > gains[b];
    });

    std::vector<double> power(k_count, 0.0);
    double level = 0.0;
    for (std::size_t active = k_count; active >= 1; --active) {
        double inv_sum = 0.0;
        bool usable = true;
        for (std::size_t i = 0; i < active; ++i) {
            if (!(gains[order[i]] > 0.0)) {
                usable = false;
                break;
            }
            inv_sum += noise_power / gains[order[i]];
        }
        if (!usable) continue;
        const double mu = (budget + inv_sum) / static_cast<double>(active);
        // Valid when every active channel gets nonnegative power and every
        // inactive channel would not.
        if (mu < noise_power / gains[order[active - 1]] - 1e-15 * mu) continue;
        if (active < k_count && gains[order[active]] > 0.0 &&
            mu > noise_power / gains[order[active]] + 1e-15 * mu) {
            continue;
        }
        for (std::size_t i = 0; i < active; ++i) {
            power[order[i]] = std::max(mu - noise_power / gains[order[i]], 0.0);
        }
        level = mu;
        return {power, level};
    }
    throw InfeasibleError("water-filling over all-zero channel gains");
}

Beamformer mrt_waterfilling(const CMatrix& h_eff, double max_power,
                            double noise_power) {
    const int n_user = static_cast<int>(h_eff.rows());
    const int n_mode = static_cast<int>(h_eff.cols());

    std::vector<double> gains(n_user);
    double total_gain = 0.0;
    for (int k = 0; k < n_user; ++k) {
        gains[k] = h_eff.row(k).squaredNorm();
        total_gain += gains[k];
    }
    if (total_gain == 0.0) {
        throw InfeasibleError("all effective channels are zero");
    }

    auto [power, level] = waterfill(gains, max_power, noise_power);

    Beamformer bf;
    bf.W = CMatrix::Zero(n_mode, n_user);
    for (int k = 0; k < n_user; ++k) {
        if (power[k] > 0.0 && gains[k] > 0.0) {
            bf.W.col(k) =
                std::sqrt(power[k] / gains[k]) * h_eff.row(k).adjoint();
        }
    }
    bf.power = power;
    bf.water_level = level;
    return bf;
}

Beamformer zf_precoder(const CMatrix& h_eff, double max_power,
                       double diagonal_loading) {
    const int n_user = static_cast<int>(h_eff.rows());
    const CMatrix gram = h_eff * h_eff.adjoint();
    const double scale = gram.trace().real() / n_user;
    if (!(scale > 0.0)) {
        throw InfeasibleError("zero effective channel, ZF undefined");
    }

    const double det_mag = std::abs(gram.determinant());
    const double det_floor = 1e-12 * std::pow(scale, n_user);
    double loading = diagonal_loading;
    if (loading < 0.0) {
        loading = det_mag < det_floor ? 1e-12 * scale : 0.0;
    } else if (loading == 0.0 && det_mag < det_floor) {
        throw InfeasibleError(
            "near-singular effective channel; add diagonal loading");
    }

    const CMatrix regularized =
        gram + loading * CMatrix::Identity(n_user, n_user);
    CMatrix w_zf = h_eff.adjoint() * regularized.inverse();
    const double fro2 = w_zf.squaredNorm();
    if (!(fro2 > 0.0) || !std::isfinite(fro2)) {
        throw InfeasibleError("ZF precoder is degenerate");
    }

    Beamformer bf;
    bf.W = w_zf * std::sqrt(max_power / fro2);
    bf.power.resize(n_user);
    for (int k = 0; k < n_user; ++k) bf.power[k] = bf.W.col(k).squaredNorm();
    return bf;
}

WmmseResult wmmse_precoder(const CMatrix& h_eff, double max_power,
                           double noise_power, int max_iters, double tol) {
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    const int n_user = static_cast<int>(h_eff.rows());
    const int n_tx = static_cast<int>(h_eff.cols());

    // MRT with equal power split as the starting point.
    CMatrix w = CMatrix::Zero(n_tx, n_user);
    for (int k = 0; k < n_user; ++k) {
        const double g = h_eff.row(k).norm();
        if (g > 0.0) {
            w.col(k) = std::sqrt(max_power / n_user) * h_eff.row(k).adjoint() / g;
        }
    }

    auto current_rate = [&](const CMatrix& wm) {
        return sum_rate(compute_sinr(h_eff, wm, noise_power));
    };

    WmmseResult res;
    CMatrix best_w = w;
    double best_rate = current_rate(w);
    double prev_rate = best_rate;

    std::vector<cplx> rx(n_user);
    std::vector<double> weight(n_user);
    for (int it = 0; it < max_iters; ++it) {
        const CMatrix a = h_eff * w;
        // MMSE receivers and MSE weights.
        for (int k = 0; k < n_user; ++k) {
            double total = noise_power;
            for (int kp = 0; kp < n_user; ++kp) total += std::norm(a(k, kp));
            rx[k] = std::conj(a(k, k)) / total;
            const double mse = 1.0 - std::real(rx[k] * a(k, k));
            weight[k] = 1.0 / std::max(mse, 1e-300);
        }

        // Precoder update with a bisected power multiplier.
        CMatrix base = CMatrix::Zero(n_tx, n_tx);
        for (int k = 0; k < n_user; ++k) {
            const Eigen::VectorXcd hk = h_eff.row(k).adjoint();
            base += weight[k] * std::norm(rx[k]) * (hk * hk.adjoint());
        }
        auto precoder_for = [&](double mu) {
            const CMatrix inv =
                (base + mu * CMatrix::Identity(n_tx, n_tx)).inverse();
            CMatrix wn(n_tx, n_user);
            for (int k = 0; k < n_user; ++k) {
                wn.col(k) =
                    inv * (weight[k] * std::conj(rx[k]) * h_eff.row(k).adjoint());
            }
            return wn;
        };

        CMatrix w_new = precoder_for(0.0);
        if (w_new.squaredNorm() > max_power || !w_new.allFinite()) {
            double lo = 0.0;
            double hi = std::sqrt(base.squaredNorm()) + 1.0;
            while (precoder_for(hi).squaredNorm() > max_power) hi *= 2.0;
            for (int b = 0; b < 100; ++b) {
                const double mid = 0.5 * (lo + hi);
                if (precoder_for(mid).squaredNorm() > max_power) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            w_new = precoder_for(hi);
        }
        w = w_new;

        const double rate = current_rate(w);
        res.rate_trace.push_back(rate);
        res.iterations = it + 1;
        if (rate > best_rate) {
            best_rate = rate;
            best_w = w;
        }
        if (std::abs(rate - prev_rate) < tol * std::max(1.0, std::abs(prev_rate))) {
            break;
        }
        prev_rate = rate;
    }

    res.beamformer.W = best_w;
    res.beamformer.power.resize(n_user);
    for (int k = 0; k < n_user; ++k) {
        res.beamformer.power[k] = best_w.col(k).squaredNorm();
    }
    return res;
}

}  // namespace passim
