#pragma once

#include <string>
#include <vector>

#include "passim/beamforming.hpp"
#include "passim/scenario.hpp"

namespace passim {

struct BaselineResult {
    std::string scheme;
    std::vector<double> rate;  // bps/Hz per user
    double sum_rate = 0.0;
    int antenna_count = 0;
    // Element/PA x-positions; one entry per user for TDMA, one total for MISO.
    std::vector<std::vector<double>> positions;
    // TDMA diagnostics: achieved |h~|^2 and the phase-aligned upper bound.
    std::vector<double> channel_power;
    std::vector<double> coherent_bound;
    // Hybrid diagnostics: Frobenius residual after each half-step.
    std::vector<double> residual_trace;
};

/// Single-mode TDMA with equal per-PA radiation 1/sqrt(N). Each user gets
/// a 1/K time share; per slot the N PAs are placed on a ladder near the
/// user and phase-aligned so the path terms add coherently.
BaselineResult tdma_single_mode(const ScenarioConfig& sc, int pa_count);

enum class MisoMode { FullDigital, Hybrid };

/// Fixed half-wavelength array of I elements starting at x = 0 at the PA
/// height. FullDigital: WMMSE precoder. Hybrid: alternating least-squares
/// digital stage and phase-only analog stage fitted to the WMMSE target.
BaselineResult fixed_miso(const ScenarioConfig& sc, int antenna_count,
                          MisoMode mode, int rf_chains = 2);

}  // namespace passim
