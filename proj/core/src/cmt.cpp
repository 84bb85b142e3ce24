#include "passim/cmt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace passim {

double generalized_coupling_strength(cplx kappa, double phase_mismatch) {
    return std::sqrt(std::norm(kappa) + 0.25 * phase_mismatch * phase_mismatch);
}

cplx coupling_coefficient(const CouplingSpec& spec) {
    if (!(spec.coupling_length > 0.0)) {
        throw ConfigError("coupling_length must be positive");
    }
    const double phi = generalized_coupling_strength(spec.coupling_strength,
                                                     spec.phase_mismatch);
    if (phi == 0.0) return {0.0, 0.0};  // kappa = 0 and matched phase
    return spec.coupling_strength * (std::sin(phi * spec.coupling_length) / phi);
}

double coupling_strength_from_spacing(double spacing, double decay_rate,
                                      double peak_magnitude, double selectivity) {
    if (spacing < 0.0) {
        throw std::domain_error("PA-waveguide spacing must be nonnegative");
    }
    return selectivity * std::exp(-decay_rate * spacing) * peak_magnitude;
}

double spacing_for_target_eta(double eta_target, double decay_rate,
                              double peak_magnitude, double coupling_length,
                              int pa_index) {
    if (!(eta_target > 0.0) || eta_target > 1.0) {
        throw std::domain_error("coupling target must lie in (0, 1]");
    }
    const double needed = std::asin(eta_target);
    const double available = coupling_length * peak_magnitude;
    if (needed > available * (1.0 + 1e-15)) {
        std::string who = pa_index >= 0 ? " (PA " + std::to_string(pa_index) + ")" : "";
        throw InfeasibleError("coupling target " + std::to_string(eta_target) +
                              " unreachable: asin(eta) = " + std::to_string(needed) +
                              " exceeds L*|Omega| = " + std::to_string(available) + who);
    }
    const double s = -std::log(std::min(needed / available, 1.0)) / decay_rate;
    return std::max(s, 0.0);
}

std::vector<double> group_radiation_targets(int group_size, double rho_group) {
    if (group_size < 1) throw ConfigError("group size must be >= 1");
    if (!(rho_group > 0.0) || rho_group > 1.0) {
        throw ConfigError("group power ratio must lie in (0, 1]");
    }
    std::vector<double> targets(group_size);
    for (int n = 0; n < group_size; ++n) {
        targets[n] = rho_group / std::sqrt(static_cast<double>(group_size - n));
    }
    return targets;
}

std::vector<std::vector<double>> incident_amplitudes(
    const std::vector<std::vector<cplx>>& eta) {
    const std::size_t n_pa = eta.size();
    const std::size_t n_mode = n_pa ? eta[0].size() : 0;
    std::vector<std::vector<double>> incident(n_pa, std::vector<double>(n_mode, 1.0));
    std::vector<double> running(n_mode, 1.0);
    for (std::size_t n = 0; n < n_pa; ++n) {
        for (std::size_t m = 0; m < n_mode; ++m) {
            const double mag2 = std::norm(eta[n][m]);
            if (mag2 > 1.0 + 1e-12) {
                throw std::domain_error("coupling coefficient magnitude exceeds 1");
            }
            incident[n][m] = running[m];
            running[m] *= std::sqrt(std::max(1.0 - mag2, 0.0));
        }
    }
    return incident;
}

RadiationProfile radiation_profile(const ScenarioConfig& sc) {
    const int n_pa = sc.pa_count;
    const int n_mode = sc.mode_count();
    const double L = sc.geometry.coupling_length;
    const double mu_unmatch = sc.effective_unmatched_mu();

    RadiationProfile rp;
    rp.eta.assign(n_pa, std::vector<cplx>(n_mode, cplx{0.0, 0.0}));
    rp.spacings.assign(n_pa, 0.0);
    rp.group_residual.assign(n_mode, 1.0);

    // Groups in placement order. A mode's power reaches its own group
    // after passing every earlier group, so the residual power ratio of
    // group m is the leakage loss accumulated over upstream unmatched PAs.
    int offset = 0;
    for (int g = 0; g < n_mode; ++g) {
        const int size = sc.group_sizes[g];
        const GuidedMode& mode = sc.modes[g];

        double residual = 1.0;
        for (int n = 0; n < offset; ++n) {
            residual *= std::sqrt(std::max(1.0 - std::norm(rp.eta[n][g]), 0.0));
        }
        rp.group_residual[g] = residual;

        // Matched targets (kappa real nonnegative, phase engineered to 0).
        // Unscaled 1/sqrt(G-n+1) targets make the equal-radiation identity
        // |rho_{n,m}| = rho_group/sqrt(G) exact after the incident recursion.
        auto targets = group_radiation_targets(size, 1.0);
        for (int n = 0; n < size; ++n) {
            const int pa = offset + n;
            rp.spacings[pa] = spacing_for_target_eta(
                targets[n], mode.evanescent_decay_rate, mode.peak_coupling_magnitude,
                L, pa);
            const double kappa = coupling_strength_from_spacing(
                rp.spacings[pa], mode.evanescent_decay_rate,
                mode.peak_coupling_magnitude, mode.matched_field_selectivity);
            rp.eta[pa][g] = coupling_coefficient({cplx{kappa, 0.0}, 0.0, L});
        }

        // Unmatched couplings of every other mode at this group's PAs,
        // fixed by the spacings above.
        for (int m = 0; m < n_mode; ++m) {
            if (m == g || mu_unmatch == 0.0) continue;
            const GuidedMode& other = sc.modes[m];
            const double dbeta =
                sc.modes[g].propagation_constant - other.propagation_constant;
            for (int n = 0; n < size; ++n) {
                const int pa = offset + n;
                const double kappa = coupling_strength_from_spacing(
                    rp.spacings[pa], other.evanescent_decay_rate,
                    other.peak_coupling_magnitude, mu_unmatch);
                rp.eta[pa][m] = coupling_coefficient({cplx{kappa, 0.0}, dbeta, L});
            }
        }
        offset += size;
    }

    rp.incident = incident_amplitudes(rp.eta);
    rp.rho.assign(n_pa, std::vector<cplx>(n_mode));
    for (int n = 0; n < n_pa; ++n) {
        for (int m = 0; m < n_mode; ++m) {
            rp.rho[n][m] = rp.eta[n][m] * rp.incident[n][m];
        }
    }
    return rp;
}

namespace {

struct CMEDerivative {
    const std::vector<CMTModeInput>& modes;
    double beta_pa;

    void operator()(const std::vector<cplx>& y, std::vector<cplx>& dy) const {
        const std::size_t m_count = modes.size();
        const cplx j{0.0, 1.0};
        const cplx b = y[m_count];
        cplx feedback{0.0, 0.0};
        for (std::size_t m = 0; m < m_count; ++m) {
            dy[m] = -j * (modes[m].propagation_constant * y[m] +
                          modes[m].coupling_strength * b);
            feedback += std::conj(modes[m].coupling_strength) * y[m];
        }
        dy[m_count] = -j * (beta_pa * b + feedback);
    }
};

CMTSolution rk4_integrate(const std::vector<CMTModeInput>& modes, double beta_pa,
                          double length, int steps) {
    const std::size_t dim = modes.size() + 1;
    std::vector<cplx> y(dim), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    for (std::size_t m = 0; m < modes.size(); ++m) y[m] = modes[m].initial_amplitude;
    y[modes.size()] = cplx{0.0, 0.0};

    const CMEDerivative f{modes, beta_pa};
    const double h = length / steps;
    for (int s = 0; s < steps; ++s) {
        f(y, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        f(tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        f(tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
        f(tmp, k4);
        for (std::size_t i = 0; i < dim; ++i) {
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    CMTSolution out;
    out.mode_amplitudes.assign(y.begin(), y.end() - 1);
    out.pa_amplitude = y.back();
    return out;
}

}  // namespace

CMTSolution cme_integrate(const std::vector<CMTModeInput>& modes, double beta_pa,
                          double coupling_length, int steps, bool check_accuracy,
                          double accuracy_tol) {
    if (modes.empty()) throw ConfigError("cme_integrate requires at least one mode");
    if (!(coupling_length > 0.0)) throw ConfigError("coupling_length must be positive");
    if (steps < 2) throw ConfigError("step count too small");

    CMTSolution fine = rk4_integrate(modes, beta_pa, coupling_length, steps);
    if (check_accuracy) {
        CMTSolution coarse = rk4_integrate(modes, beta_pa, coupling_length, steps / 2);
        double diff = std::abs(fine.pa_amplitude - coarse.pa_amplitude);
        for (std::size_t m = 0; m < modes.size(); ++m) {
            diff = std::max(diff,
                            std::abs(fine.mode_amplitudes[m] - coarse.mode_amplitudes[m]));
        }
        if (diff > accuracy_tol) {
            throw InfeasibleError("cme_integrate step count too small: halving check "
                                  "difference " + std::to_string(diff));
        }
    }
    return fine;
}

cplx cmt_superposition(const std::vector<CMTModeInput>& modes, double beta_pa,
                       double coupling_length) {
    const cplx j{0.0, 1.0};
    cplx envelope{0.0, 0.0};
    for (const auto& m : modes) {
        const double dbeta = beta_pa - m.propagation_constant;
        const double phi = generalized_coupling_strength(m.coupling_strength, dbeta);
        // b_m(L) with b_m(0) = 0; conj(kappa) drives a -> b.
        const cplx gain = phi == 0.0
                              ? cplx{coupling_length, 0.0}
                              : cplx{std::sin(phi * coupling_length) / phi, 0.0};
        envelope += -j * std::conj(m.coupling_strength) * gain *
                    std::exp(j * (0.5 * dbeta * coupling_length)) *
                    m.initial_amplitude;
    }
    // Physical field B(L) = b(L) exp(-j beta_PA L).
    return envelope * std::exp(-j * (beta_pa * coupling_length));
}

}  // namespace passim
