#include "passim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "passim/baselines.hpp"
#include "passim/channel.hpp"
#include "passim/cmt.hpp"
#include "passim/rng.hpp"
#include "passim/twopa.hpp"

namespace passim {

namespace {

using json = nlohmann::json;
using clock_type = std::chrono::steady_clock;

const std::vector<std::string> kExperimentIds = {
    "leakage_sweep",     "rate_vs_pmax_2pa",    "rate_vs_users",
    "convergence_nl",    "convergence_wl",      "rate_vs_pmax_multipa",
    "rate_vs_antennas"};

const std::vector<double> kLeakageMus = {0.3, 0.5, 1.0};
const std::vector<double> kUserLateralOffsets = {0.0, 2.0, 4.0};

std::vector<double> default_sweep(const std::string& id) {
    if (id == "leakage_sweep") {
        std::vector<double> v;
        for (int i = -30; i <= 30; ++i) v.push_back(5.0 * i);  // rad/m
        return v;
    }
    if (id == "rate_vs_pmax_2pa" || id == "rate_vs_pmax_multipa") {
        return {15.0, 19.0, 23.0, 27.0, 31.0, 35.0};  // dBm
    }
    if (id == "rate_vs_users") return {0.0, 2.0, 4.0, 6.0, 8.0};  // m
    if (id == "rate_vs_antennas") return {2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
    return {0.0};  // convergence experiments have a single point
}

std::string sweep_var_name(const std::string& id) {
    if (id == "leakage_sweep") return "delta_beta";
    if (id == "rate_vs_users") return "delta_a";
    if (id == "rate_vs_antennas") return "antennas";
    if (id == "convergence_nl" || id == "convergence_wl") return "final";
    return "pmax_dbm";
}

void set_multi_pa(ScenarioConfig& sc, int n) {
    sc.pa_count = n;
    sc.group_sizes = {n / 2, n - n / 2};
    if (n == 1) sc.group_sizes = {1};
}

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

template <typename F>
ExperimentRecord run_cell(ExperimentRecord rec, F&& fn) {
    const auto t0 = clock_type::now();
    try {
        fn(rec);
    } catch (const InfeasibleError& e) {
        rec.feasible = false;
        rec.message = e.what();
    } catch (const ConfigError& e) {
        rec.feasible = false;
        rec.message = e.what();
    } catch (const std::exception& e) {
        rec.error = true;
        rec.feasible = false;
        rec.message = e.what();
    }
    rec.wall_time = seconds_since(t0);
    return rec;
}

void fill_from_report(ExperimentRecord& rec, const RateReport& rep) {
    rec.feasible = rep.feasible;
    rec.sum_rate = rep.sum_rate;
    rec.user_rate = rep.rate;
}

void fill_two_pa(ExperimentRecord& rec, const ScenarioConfig& sc,
                 TwoPAResult* out = nullptr) {
    const TwoPAResult r = optimize_two_pa(sc);
    if (out) *out = r;
    if (!r.feasible) {
        rec.feasible = false;
        rec.message = "no feasible two-PA candidate";
        return;
    }
    fill_from_report(rec, r.report);
}

void fill_mrt_at_positions(ExperimentRecord& rec, const ScenarioConfig& sc,
                           const std::vector<double>& positions) {
    const ChannelSet cs = effective_channel(sc, positions);
    const Beamformer bf =
        mrt_waterfilling(cs.H_eff, sc.power.max_power, sc.power.noise_power);
    fill_from_report(rec, rate_report(cs.H_eff, bf.W, sc.power.noise_power,
                                      sc.power.min_sinr));
}

void fill_swarm(ExperimentRecord& rec, const ScenarioConfig& sc, InitScheme init,
                std::uint64_t seed, bool use_de, bool keep_trace) {
    SwarmResult r;
    if (use_de) {
        DEParams p;
        p.seed = seed;
        p.init = init;
        if (init == InitScheme::TwoPAOptimum) p.init_radius = 0.5;
        r = de_zf(sc, p);
    } else {
        r = pso_zf(sc, PSOParams::for_init(init, seed));
    }
    if (keep_trace) rec.trace = r.trace;
    if (!r.feasible) {
        rec.feasible = false;
        rec.message = "no feasible swarm member";
        return;
    }
    fill_from_report(rec, r.report);
}

void fill_baseline(ExperimentRecord& rec, const BaselineResult& r,
                   double min_rate) {
    rec.sum_rate = r.sum_rate;
    rec.user_rate = r.rate;
    rec.feasible = true;
    for (double rate : r.rate) {
        if (rate < min_rate - 1e-12) rec.feasible = false;
    }
}

struct TrialContext {
    const ExperimentSpec& spec;
    int trial;
    std::uint64_t seed;
    std::vector<ExperimentRecord> out;

    ExperimentRecord blank(const std::string& scheme, double sweep_value) const {
        ExperimentRecord rec;
        rec.experiment = spec.id;
        rec.trial = trial;
        rec.seed = seed;
        rec.scheme = scheme;
        rec.sweep_var = sweep_var_name(spec.id);
        rec.sweep_value = sweep_value;
        return rec;
    }
};

void run_leakage_trial(TrialContext& ctx) {
    const ScenarioConfig& sc = ctx.spec.base;
    const GuidedMode& mode = sc.modes[0];
    for (double mu : kLeakageMus) {
        char label[32];
        std::snprintf(label, sizeof(label), "leakage-mu%.1f", mu);
        for (double dbeta : ctx.spec.sweep_values) {
            ctx.out.push_back(run_cell(ctx.blank(label, dbeta), [&](auto& rec) {
                CouplingSpec cspec;
                cspec.coupling_strength =
                    cplx{coupling_strength_from_spacing(
                             0.0, mode.evanescent_decay_rate,
                             mode.peak_coupling_magnitude, mu),
                         0.0};
                cspec.phase_mismatch = dbeta;
                cspec.coupling_length = sc.geometry.coupling_length;
                rec.sum_rate = std::norm(coupling_coefficient(cspec));
                rec.feasible = true;
            }));
        }
    }
}

void run_pmax_2pa_trial(TrialContext& ctx) {
    for (double pmax_dbm : ctx.spec.sweep_values) {
        ScenarioConfig nl = ctx.spec.base;
        nl.users = sample_user_layout(ctx.seed, UserSamplingBounds{}, true);
        nl.power.max_power = dbm_to_watts(pmax_dbm);
        nl.regime = Regime::NonLeakage;
        nl.pa_count = 2;
        nl.group_sizes = {1, 1};

        TwoPAResult two;
        ctx.out.push_back(run_cell(ctx.blank("pass-nl", pmax_dbm),
                                   [&](auto& rec) { fill_two_pa(rec, nl, &two); }));
        ctx.out.push_back(run_cell(ctx.blank("pass-wl", pmax_dbm), [&](auto& rec) {
            if (!two.feasible) throw InfeasibleError("no feasible two-PA candidate");
            ScenarioConfig wl = nl;
            wl.regime = Regime::WeakLeakage;
            wl.unmatched_field_selectivity = 0.5;
            fill_mrt_at_positions(rec, wl, {two.x1, two.x2});
        }));
        ctx.out.push_back(run_cell(ctx.blank("tdma", pmax_dbm), [&](auto& rec) {
            fill_baseline(rec, tdma_single_mode(nl, 2), nl.power.min_rate);
        }));
        ctx.out.push_back(run_cell(ctx.blank("miso-digital", pmax_dbm), [&](auto& rec) {
            fill_baseline(rec, fixed_miso(nl, 2, MisoMode::FullDigital),
                          nl.power.min_rate);
        }));
    }
}

void run_users_trial(TrialContext& ctx) {
    SplitMix64 rng(split_seed(ctx.seed, 7));
    const double center = rng.next_in(7.0, 12.0);
    const double y1 = rng.next_in(3.0, 6.0);

    for (double delta_a : ctx.spec.sweep_values) {
        for (double dy : kUserLateralOffsets) {
            ScenarioConfig nl = ctx.spec.base;
            nl.users.along_axis = {center - delta_a / 2.0, center + delta_a / 2.0};
            nl.users.lateral = {y1, y1 + dy};
            nl.regime = Regime::NonLeakage;
            nl.pa_count = 2;
            nl.group_sizes = {1, 1};

            char suffix[32];
            std::snprintf(suffix, sizeof(suffix), "/dy=%g", dy);

            TwoPAResult two;
            ctx.out.push_back(
                run_cell(ctx.blank(std::string("pass-nl") + suffix, delta_a),
                         [&](auto& rec) { fill_two_pa(rec, nl, &two); }));
            ctx.out.push_back(
                run_cell(ctx.blank(std::string("pass-wl") + suffix, delta_a),
                         [&](auto& rec) {
                             if (!two.feasible) {
                                 throw InfeasibleError("no feasible two-PA candidate");
                             }
                             ScenarioConfig wl = nl;
                             wl.regime = Regime::WeakLeakage;
                             wl.unmatched_field_selectivity = 0.5;
                             fill_mrt_at_positions(rec, wl, {two.x1, two.x2});
                         }));
            ctx.out.push_back(
                run_cell(ctx.blank(std::string("tdma") + suffix, delta_a),
                         [&](auto& rec) {
                             fill_baseline(rec, tdma_single_mode(nl, 2),
                                           nl.power.min_rate);
                         }));
            ctx.out.push_back(
                run_cell(ctx.blank(std::string("miso-digital") + suffix, delta_a),
                         [&](auto& rec) {
                             fill_baseline(rec,
                                           fixed_miso(nl, 2, MisoMode::FullDigital),
                                           nl.power.min_rate);
                         }));
        }
    }
}

void run_convergence_trial(TrialContext& ctx) {
    ScenarioConfig sc = ctx.spec.base;
    sc.users = sample_user_layout(ctx.seed, UserSamplingBounds{}, true);
    sc.regime = ctx.spec.id == "convergence_wl" ? Regime::WeakLeakage
                                                : Regime::NonLeakage;
    if (sc.regime == Regime::WeakLeakage) sc.unmatched_field_selectivity = 0.5;
    set_multi_pa(sc, 12);

    ctx.out.push_back(run_cell(ctx.blank("pso-rand", 0.0), [&](auto& rec) {
        fill_swarm(rec, sc, InitScheme::Rand, split_seed(ctx.seed, 0), false, true);
    }));
    ctx.out.push_back(run_cell(ctx.blank("pso-topt", 0.0), [&](auto& rec) {
        fill_swarm(rec, sc, InitScheme::TwoPAOptimum, split_seed(ctx.seed, 1),
                   false, true);
    }));
    ctx.out.push_back(run_cell(ctx.blank("de-zf", 0.0), [&](auto& rec) {
        fill_swarm(rec, sc, InitScheme::Rand, split_seed(ctx.seed, 2), true, true);
    }));
}

void run_multi_pa_point(TrialContext& ctx, double sweep_value, double pmax_dbm,
                        int pa_count, int miso_elems) {
    ScenarioConfig nl = ctx.spec.base;
    nl.users = sample_user_layout(ctx.seed, UserSamplingBounds{}, true);
    nl.power.max_power = dbm_to_watts(pmax_dbm);
    nl.regime = Regime::NonLeakage;
    set_multi_pa(nl, pa_count);
    ScenarioConfig wl = nl;
    wl.regime = Regime::WeakLeakage;
    wl.unmatched_field_selectivity = 0.5;

    const std::uint64_t s = split_seed(ctx.seed, static_cast<std::uint64_t>(
                                                     sweep_value * 1000.0 + 0.5));
    ctx.out.push_back(run_cell(ctx.blank("pass-nl", sweep_value), [&](auto& rec) {
        fill_swarm(rec, nl, ctx.spec.init, split_seed(s, 0), false, false);
    }));
    ctx.out.push_back(run_cell(ctx.blank("pass-wl", sweep_value), [&](auto& rec) {
        fill_swarm(rec, wl, ctx.spec.init, split_seed(s, 1), false, false);
    }));
    ctx.out.push_back(run_cell(ctx.blank("de-zf", sweep_value), [&](auto& rec) {
        fill_swarm(rec, nl, ctx.spec.init, split_seed(s, 2), true, false);
    }));
    ctx.out.push_back(run_cell(ctx.blank("tdma", sweep_value), [&](auto& rec) {
        fill_baseline(rec, tdma_single_mode(nl, pa_count), nl.power.min_rate);
    }));
    ctx.out.push_back(run_cell(ctx.blank("miso-digital", sweep_value), [&](auto& rec) {
        fill_baseline(rec, fixed_miso(nl, miso_elems, MisoMode::FullDigital),
                      nl.power.min_rate);
    }));
    ctx.out.push_back(run_cell(ctx.blank("miso-hybrid", sweep_value), [&](auto& rec) {
        fill_baseline(rec, fixed_miso(nl, miso_elems, MisoMode::Hybrid),
                      nl.power.min_rate);
    }));
}

std::vector<ExperimentRecord> run_trial(const ExperimentSpec& spec, int trial) {
    TrialContext ctx{spec, trial, split_seed(spec.seed, trial), {}};
    if (spec.id == "leakage_sweep") {
        run_leakage_trial(ctx);
    } else if (spec.id == "rate_vs_pmax_2pa") {
        run_pmax_2pa_trial(ctx);
    } else if (spec.id == "rate_vs_users") {
        run_users_trial(ctx);
    } else if (spec.id == "convergence_nl" || spec.id == "convergence_wl") {
        run_convergence_trial(ctx);
    } else if (spec.id == "rate_vs_pmax_multipa") {
        for (double pmax : spec.sweep_values) {
            run_multi_pa_point(ctx, pmax, pmax, 12, 2);
        }
    } else if (spec.id == "rate_vs_antennas") {
        for (double n : spec.sweep_values) {
            const int count = static_cast<int>(n + 0.5);
            const double pmax = watts_to_dbm(spec.base.power.max_power);
            run_multi_pa_point(ctx, n, pmax, count, count);
        }
    }
    return ctx.out;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ExperimentSpec ExperimentSpec::make(const std::string& id) {
    ExperimentSpec spec;
    spec.id = id;
    spec.base = default_scenario();
    spec.sweep_values = default_sweep(id);
    spec.validate();
    return spec;
}

void ExperimentSpec::validate() const {
    if (std::find(kExperimentIds.begin(), kExperimentIds.end(), id) ==
        kExperimentIds.end()) {
        throw ConfigError("unknown experiment id: " + id);
    }
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (sweep_values.empty()) throw ConfigError("empty sweep grid");
}

std::vector<ExperimentRecord> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentSpec eff = spec;
    if (eff.sweep_values.empty()) eff.sweep_values = default_sweep(eff.id);
    // The leakage sweep is deterministic; one trial regardless of the request.
    const int trials = eff.id == "leakage_sweep" ? 1 : eff.trials;

    std::vector<std::vector<ExperimentRecord>> per_trial(trials);
    if (eff.parallel && trials > 1) {
        std::vector<std::future<void>> tasks;
        for (int t = 0; t < trials; ++t) {
            tasks.push_back(std::async(std::launch::async, [&eff, &per_trial, t] {
                per_trial[t] = run_trial(eff, t);
            }));
        }
        for (auto& task : tasks) task.get();
    } else {
        for (int t = 0; t < trials; ++t) per_trial[t] = run_trial(eff, t);
    }

    std::vector<ExperimentRecord> records;
    for (auto& block : per_trial) {
        records.insert(records.end(), std::make_move_iterator(block.begin()),
                       std::make_move_iterator(block.end()));
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const ExperimentRecord& a, const ExperimentRecord& b) {
                         if (a.trial != b.trial) return a.trial < b.trial;
                         if (a.sweep_value != b.sweep_value) {
                             return a.sweep_value < b.sweep_value;
                         }
                         return a.scheme < b.scheme;
                     });
    return records;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream os;
    os << "experiment,trial,seed,scheme,sweep_var,sweep_value,sum_rate_bpshz,"
          "rate_u1,rate_u2,feasible,wall_time_s\n";
    auto emit_row = [&](const ExperimentRecord& r, const std::string& var,
                        double value, double sum, bool with_rates,
                        bool with_time) {
        os << r.experiment << ',' << r.trial << ',' << r.seed << ',' << r.scheme
           << ',' << var << ',' << format_double(value) << ','
           << format_double(sum) << ',';
        if (with_rates && !r.user_rate.empty()) os << format_double(r.user_rate[0]);
        os << ',';
        if (with_rates && r.user_rate.size() > 1) os << format_double(r.user_rate[1]);
        os << ',' << (r.feasible ? 1 : 0) << ',';
        if (with_time) os << format_double(r.wall_time);
        os << '\n';
    };
    for (const auto& r : records) {
        emit_row(r, r.sweep_var, r.sweep_value, r.sum_rate, true, true);
    }
    for (const auto& r : records) {
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            emit_row(r, "iteration", static_cast<double>(i + 1), r.trace[i],
                     false, false);
        }
    }
    return os.str();
}

std::string records_to_json(const std::vector<ExperimentRecord>& records,
                            const ExperimentSpec& spec) {
    json meta;
    meta["experiment"] = spec.id;
    meta["trials"] = spec.trials;
    meta["seed"] = spec.seed;
    meta["regime"] = spec.regime == Regime::WeakLeakage ? "wl" : "nl";
    meta["init"] = spec.init == InitScheme::TwoPAOptimum ? "topt" : "rand";
    meta["sweep_var"] = sweep_var_name(spec.id);
    meta["sweep_values"] = spec.sweep_values;
    meta["scenario"] = json::parse(scenario_to_json(spec.base));
    meta["defaults"] = {
        {"pso",
         {{"particles", 100},
          {"iterations", 50},
          {"max_velocity_m", 5.0},
          {"cognitive", 1.4},
          {"social", 1.2},
          {"inertia_rand", 0.85},
          {"inertia_topt", 1.0},
          {"trust_radius_rand_m", 2.0},
          {"trust_radius_topt_m", 0.5},
          {"initial_velocity", 0.0}}},
        {"de",
         {{"population", 100},
          {"iterations", 50},
          {"weight", 0.5},
          {"crossover_rate", 0.9},
          {"variant", "rand/1/bin"}}},
        {"tdma",
         {{"power_convention", "full budget per active slot"},
          {"grid_resolution", "wavelength/8"},
          {"ladder_spacing", "3 wavelengths"}}},
        {"miso",
         {{"element_spacing", "wavelength/2"},
          {"hybrid_rf_chains", 2},
          {"hybrid_inner_cap", 100}}},
        {"leakage_mus", kLeakageMus},
        {"user_lateral_offsets_m", kUserLateralOffsets},
        {"seed_splitting", "per-trial counter split of the master seed"},
    };

    json rows = json::array();
    for (const auto& r : records) {
        json row;
        row["experiment"] = r.experiment;
        row["trial"] = r.trial;
        row["seed"] = r.seed;
        row["scheme"] = r.scheme;
        row["sweep_var"] = r.sweep_var;
        row["sweep_value"] = r.sweep_value;
        row["sum_rate_bpshz"] = r.sum_rate;
        json rates = json::array();
        for (double v : r.user_rate) rates.push_back(v);
        row["user_rates"] = rates;
        row["feasible"] = r.feasible;
        row["wall_time_s"] = r.wall_time;
        if (r.error) row["error"] = true;
        if (!r.message.empty()) row["message"] = r.message;
        if (!r.trace.empty()) {
            json trace = json::array();
            for (double v : r.trace) {
                if (std::isinf(v)) {
                    trace.push_back(nullptr);
                } else {
                    trace.push_back(v);
                }
            }
            row["trace"] = trace;
        }
        rows.push_back(row);
    }

    json doc;
    doc["metadata"] = meta;
    doc["records"] = rows;
    return doc.dump(2) + "\n";
}

void emit_results(const std::vector<ExperimentRecord>& records,
                  const ExperimentSpec& spec, const std::string& format,
                  const std::string& path) {
    if (records.empty()) throw ConfigError("no records to emit");
    std::string payload;
    if (format == "csv") {
        payload = records_to_csv(records);
    } else if (format == "json") {
        payload = records_to_json(records, spec);
    } else {
        throw ConfigError("unknown output format: " + format);
    }
    if (path == "-" || path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output path: " + path);
    os << payload;
    if (!os) throw std::runtime_error("write failed: " + path);
}

double mean_sum_rate(const std::vector<ExperimentRecord>& records,
                     const std::string& scheme) {
    double total = 0.0;
    int count = 0;
    for (const auto& r : records) {
        if (r.scheme == scheme && r.feasible) {
            total += r.sum_rate;
            ++count;
        }
    }
    return count == 0 ? 0.0 : total / count;
}

}  // namespace passim
