#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "passim/metaheuristics.hpp"
#include "passim/scenario.hpp"

namespace passim {

/// Experiment ids: leakage_sweep, rate_vs_pmax_2pa, rate_vs_users,
/// convergence_nl, convergence_wl, rate_vs_pmax_multipa, rate_vs_antennas.
struct ExperimentSpec {
    std::string id;
    int trials = 20;
    std::uint64_t seed = 1;
    ScenarioConfig base;
    Regime regime = Regime::NonLeakage;
    InitScheme init = InitScheme::TwoPAOptimum;
    bool parallel = true;
    std::vector<double> sweep_values;  // filled with per-id defaults if empty

    /// Spec with the per-id default sweep grid and base scenario.
    static ExperimentSpec make(const std::string& id);
    void validate() const;
};

struct ExperimentRecord {
    std::string experiment;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string scheme;
    std::string sweep_var;
    double sweep_value = 0.0;
    double sum_rate = 0.0;  // bps/Hz (|eta|^2 for the leakage sweep)
    std::vector<double> user_rate;
    bool feasible = false;
    std::vector<double> trace;  // best fitness per iteration, optional
    double wall_time = 0.0;     // s
    bool error = false;
    std::string message;
};

/// Runs every scheme at every sweep point for every trial. Per-trial
/// seeds are counter-split from the master seed; trials may run in
/// parallel and the record set is identical either way (wall times
/// aside). Scheme failures become infeasible or error rows, never
/// missing cells.
std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec);

/// CSV with columns: experiment, trial, seed, scheme, sweep_var,
/// sweep_value, sum_rate_bpshz, rate_u1, rate_u2, feasible, wall_time_s.
/// Convergence traces follow in long format (sweep_var = "iteration",
/// sum_rate_bpshz = best fitness).
std::string records_to_csv(const std::vector<ExperimentRecord>& records);

/// JSON mirror of the CSV schema plus a metadata header with the full
/// derived scenario and every tunable default.
std::string records_to_json(const std::vector<ExperimentRecord>& records,
                            const ExperimentSpec& spec);

/// format is "csv" or "json"; path "-" writes to stdout.
void emit_results(const std::vector<ExperimentRecord>& records,
                  const ExperimentSpec& spec, const std::string& format,
                  const std::string& path);

/// Mean sum rate over non-trace rows of one scheme (feasible rows only).
double mean_sum_rate(const std::vector<ExperimentRecord>& records,
                     const std::string& scheme);

}  // namespace passim
