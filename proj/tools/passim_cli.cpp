#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "passim/harness.hpp"

namespace {

struct GlobalOptions {
    std::uint64_t seed = 1;
    int trials = 20;
    std::string regime = "nl";
    std::string init = "topt";
    std::string out = "-";
    std::string format = "csv";
    std::string config;
};

void add_global_flags(CLI::App* cmd, GlobalOptions& opt) {
    cmd->add_option("--seed", opt.seed, "Master RNG seed");
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--regime", opt.regime, "Leakage regime")
        ->check(CLI::IsMember({"nl", "wl"}));
    cmd->add_option("--init", opt.init, "Swarm initialization scheme")
        ->check(CLI::IsMember({"rand", "topt"}));
    cmd->add_option("--out", opt.out, "Output path ('-' for stdout)");
    cmd->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--config", opt.config, "Scenario file (JSON)")
        ->check(CLI::ExistingFile);
}

passim::ExperimentSpec build_spec(const std::string& id, const GlobalOptions& opt) {
    passim::ExperimentSpec spec = passim::ExperimentSpec::make(id);
    spec.seed = opt.seed;
    spec.trials = opt.trials;
    spec.regime = opt.regime == "wl" ? passim::Regime::WeakLeakage
                                     : passim::Regime::NonLeakage;
    spec.init = opt.init == "rand" ? passim::InitScheme::Rand
                                   : passim::InitScheme::TwoPAOptimum;
    if (!opt.config.empty()) spec.base = passim::load_scenario_file(opt.config);
    return spec;
}

int run(const std::string& id, const GlobalOptions& opt,
        std::vector<double> sweep_override = {}) {
    passim::ExperimentSpec spec = build_spec(id, opt);
    if (!sweep_override.empty()) spec.sweep_values = std::move(sweep_override);
    const auto records = passim::run_experiment(spec);
    passim::emit_results(records, spec, opt.format, opt.out);
    for (const auto& r : records) {
        if (r.feasible) return 0;
    }
    return 2;  // every cell infeasible
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pinching-antenna system simulator and optimizer"};
    app.require_subcommand(1);

    GlobalOptions opt;
    bool multi_pmax = false;

    auto* leakage = app.add_subcommand(
        "leakage-sweep", "Unmatched-mode power leakage versus phase mismatch");
    auto* two_pa = app.add_subcommand(
        "two-pa", "Two-PA closed-form placement at the configured power budget");
    auto* multi_pa = app.add_subcommand(
        "multi-pa", "Multi-PA swarm optimization against all baselines");
    auto* sweep_pmax =
        app.add_subcommand("sweep-pmax", "Sum rate versus power budget");
    sweep_pmax->add_flag("--multi", multi_pmax,
                         "Sweep the 12-PA system instead of the 2-PA system");
    auto* sweep_users = app.add_subcommand(
        "sweep-users", "Sum rate versus user separation and lateral offset");
    auto* sweep_antennas =
        app.add_subcommand("sweep-antennas", "Sum rate versus antenna count");
    auto* convergence = app.add_subcommand(
        "convergence", "Swarm best-fitness traces (regime from --regime)");

    for (auto* cmd : {leakage, two_pa, multi_pa, sweep_pmax, sweep_users,
                      sweep_antennas, convergence}) {
        add_global_flags(cmd, opt);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (leakage->parsed()) return run("leakage_sweep", opt);
        if (two_pa->parsed()) {
            const double pmax =
                passim::watts_to_dbm(build_spec("rate_vs_pmax_2pa", opt)
                                         .base.power.max_power);
            return run("rate_vs_pmax_2pa", opt, {pmax});
        }
        if (multi_pa->parsed()) {
            const double pmax =
                passim::watts_to_dbm(build_spec("rate_vs_pmax_multipa", opt)
                                         .base.power.max_power);
            return run("rate_vs_pmax_multipa", opt, {pmax});
        }
        if (sweep_pmax->parsed()) {
            return run(multi_pmax ? "rate_vs_pmax_multipa" : "rate_vs_pmax_2pa",
                       opt);
        }
        if (sweep_users->parsed()) return run("rate_vs_users", opt);
        if (sweep_antennas->parsed()) return run("rate_vs_antennas", opt);
        if (convergence->parsed()) {
            return run(opt.regime == "wl" ? "convergence_wl" : "convergence_nl",
                       opt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
