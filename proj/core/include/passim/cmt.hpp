#pragma once

#include <complex>
#include <vector>

#include "passim/scenario.hpp"

namespace passim {

using cplx = std::complex<double>;

/// Coupling between one guided mode and one PA over a coupling length.
struct CouplingSpec {
    cplx coupling_strength{0.0, 0.0};  // kappa, 1/m
    double phase_mismatch = 0.0;       // delta beta, rad/m
    double coupling_length = 0.0;      // L, m
};

/// phi = sqrt(|kappa|^2 + (delta_beta/2)^2)
double generalized_coupling_strength(cplx kappa, double phase_mismatch);

/// eta = (kappa/phi) * sin(phi*L); continuous limit eta = 0 at kappa = 0.
cplx coupling_coefficient(const CouplingSpec& spec);

/// |kappa| = mu * exp(-alpha*S) * |Omega|
double coupling_strength_from_spacing(double spacing, double decay_rate,
                                      double peak_magnitude, double selectivity);

/// Inverts the matched coupling law: S = -(1/alpha) * ln(asin(eta)/(L*|Omega|)).
/// Throws InfeasibleError when asin(eta) > L*|Omega| (target unreachable
/// with nonnegative spacing).
double spacing_for_target_eta(double eta_target, double decay_rate,
                              double peak_magnitude, double coupling_length,
                              int pa_index = -1);

/// Per-PA matched coupling targets eta_n = rho_group / sqrt(G - n + 1)
/// that equalize radiated power across a group of size G.
std::vector<double> group_radiation_targets(int group_size, double rho_group);

/// Incident-amplitude recursion: in_{n,m} = prod_{i<n} sqrt(1 - |eta_{i,m}|^2),
/// PAs ordered by position. eta is indexed [pa][mode].
std::vector<std::vector<double>> incident_amplitudes(
    const std::vector<std::vector<cplx>>& eta);

/// Full coupling picture for a PA layout: per-(PA,mode) coupling
/// coefficients, incident amplitudes, radiation coefficients
/// rho = eta * incident, spacings, and per-group residual power ratios.
struct RadiationProfile {
    std::vector<std::vector<cplx>> eta;        // [pa][mode]
    std::vector<std::vector<double>> incident; // [pa][mode]
    std::vector<std::vector<cplx>> rho;        // [pa][mode]
    std::vector<double> spacings;              // [pa], m
    std::vector<double> group_residual;        // rho_m^group, [mode]
};

/// Builds the radiation profile for a sequential block layout (group 0
/// occupies the first |N_1| PAs, then group 1, ...). Spacings realize the
/// equal-radiation targets for each group's matched mode; in the
/// weak-leakage regime unmatched couplings follow from those spacings and
/// the unmatched selectivity.
RadiationProfile radiation_profile(const ScenarioConfig& sc);

/// Full (non-decomposed) coupled-mode system state at the coupling exit.
struct CMTSolution {
    std::vector<cplx> mode_amplitudes;  // A_m(L)
    cplx pa_amplitude{0.0, 0.0};        // B(L)
};

struct CMTModeInput {
    double propagation_constant = 0.0;  // beta_m
    cplx coupling_strength{0.0, 0.0};   // kappa_m
    cplx initial_amplitude{0.0, 0.0};   // A_m(0)
};

/// Fixed-step classical RK4 integration of
///   A_m' = -j beta_m A_m - j kappa_m B
///   B'   = -j beta_PA B - j sum_m conj(kappa_m) A_m
/// over xi in [0, L]. Serves as the independent ground-truth oracle for
/// the closed-form coupling coefficient. A step-halving check flags
/// insufficient resolution.
CMTSolution cme_integrate(const std::vector<CMTModeInput>& modes, double beta_pa,
                          double coupling_length, int steps = 4096,
                          bool check_accuracy = true, double accuracy_tol = 1e-10);

/// Closed-form superposition b(L) = sum_m -j conj(kappa_m)
/// (sin(phi_m L)/phi_m) exp(+j delta_beta_m L / 2) a_m(0); returns B(L)
/// in physical-field convention for direct comparison with cme_integrate.
cplx cmt_superposition(const std::vector<CMTModeInput>& modes, double beta_pa,
                       double coupling_length);

}  // namespace passim
