#include "passim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "passim/channel.hpp"

namespace passim {

namespace {

double wrap_pi(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

struct TdmaGeometry {
    double a;  // user along-axis position
    double c;  // squared cross-axis distance
    double k0;
    double beta;
};

double tdma_range(double x, const TdmaGeometry& g) {
    const double dx = x - g.a;
    return std::sqrt(dx * dx + g.c);
}

/// Phase of one term of h~: -(k0 R(x) + beta x). Monotone decreasing in x
/// because beta > k0.
double tdma_phase(double x, const TdmaGeometry& g) {
    return -(g.k0 * tdma_range(x, g) + g.beta * x);
}

double tdma_phase_derivative(double x, const TdmaGeometry& g) {
    return -(g.k0 * (x - g.a) / tdma_range(x, g) + g.beta);
}

}  // namespace

BaselineResult tdma_single_mode(const ScenarioConfig& sc, int pa_count) {
    if (pa_count < 1) throw ConfigError("TDMA needs at least one PA");
    const int n_user = sc.user_count();
    const double lambda0 = sc.carrier.wavelength;
    const double k0 = 2.0 * kPi / lambda0;
    const double beta = sc.modes[0].propagation_constant;
    if (!(beta > k0)) {
        throw ConfigError("TDMA placement assumes a guided mode with beta > k0");
    }
    const double rho = 1.0 / std::sqrt(static_cast<double>(pa_count));
    const double lo = sc.geometry.position_bounds[0];
    const double hi = sc.geometry.position_bounds[1];
    const double spacing = std::max(3.0 * lambda0, sc.geometry.min_spacing + 2.0 * lambda0);
    const double half_width = 0.5 * (pa_count - 1) * spacing;

    BaselineResult res;
    res.scheme = "tdma";
    res.antenna_count = pa_count;

    for (int k = 0; k < n_user; ++k) {
        TdmaGeometry g;
        g.a = sc.users.along_axis[k];
        const double y = sc.users.lateral[k];
        g.c = y * y + sc.geometry.height * sc.geometry.height;
        g.k0 = k0;
        g.beta = beta;

        // Coarse grid over ladder centers near the user; lambda0 margin
        // leaves room for the per-PA phase adjustment.
        double c_lo = std::max(lo + half_width + lambda0, g.a - 2.0);
        double c_hi = std::min(hi - half_width - lambda0, g.a + 2.0);
        if (c_lo > c_hi) {
            c_lo = c_hi = std::clamp(g.a, lo + half_width + lambda0,
                                     hi - half_width - lambda0);
        }
        const double step = lambda0 / 8.0;
        const int grid_points = std::max(1, static_cast<int>((c_hi - c_lo) / step) + 1);

        auto layout_at = [&](double center) {
            std::vector<double> x(pa_count);
            for (int n = 0; n < pa_count; ++n) {
                x[n] = center + (n - 0.5 * (pa_count - 1)) * spacing;
            }
            return x;
        };
        auto channel_at = [&](const std::vector<double>& x) {
            cplx h{0.0, 0.0};
            for (double xn : x) {
                const double r = tdma_range(xn, g);
                h += rho * (lambda0 / (4.0 * kPi * r)) *
                     std::exp(cplx{0.0, tdma_phase(xn, g)});
            }
            return h;
        };

        double best_center = c_lo;
        double best_power = -1.0;
        for (int i = 0; i < grid_points; ++i) {
            const double c = c_lo + i * step;
            const double p = std::norm(channel_at(layout_at(c)));
            if (p > best_power) {
                best_power = p;
                best_center = c;
            }
        }

        // Per-PA phase alignment to the first PA's term; Newton on the
        // wrapped phase mismatch (the phase is monotone, near-linear over
        // sub-wavelength moves).
        std::vector<double> x = layout_at(best_center);
        const double target = tdma_phase(x[0], g);
        for (int n = 1; n < pa_count; ++n) {
            for (int it = 0; it < 50; ++it) {
                const double d = wrap_pi(tdma_phase(x[n], g) - target);
                if (std::abs(d) < 1e-13) break;
                x[n] -= d / tdma_phase_derivative(x[n], g);
            }
        }

        double bound_amp = 0.0;
        for (double xn : x) {
            bound_amp += rho * lambda0 / (4.0 * kPi * tdma_range(xn, g));
        }
        const double power = std::norm(channel_at(x));
        const double snr = sc.power.max_power * power / sc.power.noise_power;

        res.positions.push_back(std::move(x));
        res.channel_power.push_back(power);
        res.coherent_bound.push_back(bound_amp * bound_amp);
        res.rate.push_back(std::log2(1.0 + snr) / n_user);
        res.sum_rate += res.rate.back();
    }
    return res;
}

namespace {

CMatrix miso_channel(const ScenarioConfig& sc, int antenna_count) {
    const int n_user = sc.user_count();
    CMatrix h(n_user, antenna_count);
    for (int k = 0; k < n_user; ++k) {
        for (int i = 0; i < antenna_count; ++i) {
            const double xi = i * sc.carrier.wavelength / 2.0;
            h(k, i) = std::conj(wireless_gain(xi, sc.geometry.height,
                                              sc.users.along_axis[k],
                                              sc.users.lateral[k],
                                              sc.carrier.wavelength));
        }
    }
    return h;
}

/// One cyclic sweep of exact per-entry phase updates on the analog stage.
/// Each entry update is the coordinate minimizer of ||W_t - F W_d||_F, so
/// the residual cannot increase.
void analog_sweep(CMatrix& f, CMatrix& error, const CMatrix& w_digital) {
    for (int i = 0; i < f.rows(); ++i) {
        for (int r = 0; r < f.cols(); ++r) {
            const Eigen::RowVectorXcd excl =
                error.row(i) + f(i, r) * w_digital.row(r);
            const cplx c = (excl * w_digital.row(r).adjoint())(0, 0);
            if (std::abs(c) > 0.0) f(i, r) = c / std::abs(c);
            error.row(i) = excl - f(i, r) * w_digital.row(r);
        }
    }
}

}  // namespace

BaselineResult fixed_miso(const ScenarioConfig& sc, int antenna_count,
                          MisoMode mode, int rf_chains) {
    if (antenna_count < 2) throw ConfigError("MISO baseline needs I >= 2");
    rf_chains = std::min(rf_chains, antenna_count);
    if (rf_chains < 1) throw ConfigError("MISO hybrid needs at least one RF chain");

    const CMatrix h = miso_channel(sc, antenna_count);
    const WmmseResult target =
        wmmse_precoder(h, sc.power.max_power, sc.power.noise_power);

    BaselineResult res;
    res.antenna_count = antenna_count;
    res.positions.push_back({});
    for (int i = 0; i < antenna_count; ++i) {
        res.positions[0].push_back(i * sc.carrier.wavelength / 2.0);
    }

    CMatrix w;
    if (mode == MisoMode::FullDigital) {
        res.scheme = "miso-digital";
        w = target.beamformer.W;
    } else {
        res.scheme = "miso-hybrid";
        const CMatrix& w_t = target.beamformer.W;
        // DFT-phase analog init: unit modulus and full column rank.
        CMatrix f(antenna_count, rf_chains);
        for (int i = 0; i < antenna_count; ++i) {
            for (int r = 0; r < rf_chains; ++r) {
                f(i, r) = std::exp(cplx{0.0, 2.0 * kPi * i * r / antenna_count});
            }
        }
        CMatrix w_d = CMatrix::Zero(rf_chains, w_t.cols());
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 100; ++it) {
            w_d = f.colPivHouseholderQr().solve(w_t);  // least-squares stage
            CMatrix error = w_t - f * w_d;
            res.residual_trace.push_back(error.norm());
            analog_sweep(f, error, w_d);
            res.residual_trace.push_back(error.norm());
            const double cur = res.residual_trace.back();
            if (prev - cur < 1e-10 * (1.0 + cur)) break;
            prev = cur;
        }
        w = f * w_d;
        const double power = w.squaredNorm();
        if (power > sc.power.max_power) {
            w *= std::sqrt(sc.power.max_power / power);
        }
    }

    const auto sinr = compute_sinr(h, w, sc.power.noise_power);
    for (double s : sinr) {
        res.rate.push_back(std::log2(1.0 + s));
        res.sum_rate += res.rate.back();
    }
    return res;
}

}  // namespace passim
