#include "passim/metaheuristics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "passim/channel.hpp"
#include "passim/rng.hpp"
#include "passim/twopa.hpp"

namespace passim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Pool-adjacent-violators pass enforcing a non-decreasing sequence in
/// least squares.
void isotonic_nondecreasing(std::vector<double>& z) {
    const std::size_t n = z.size();
    std::vector<double> value(n), weight(n);
    std::vector<std::size_t> count(n);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        value[blocks] = z[i];
        weight[blocks] = 1.0;
        count[blocks] = 1;
        ++blocks;
        while (blocks > 1 && value[blocks - 2] > value[blocks - 1]) {
            const double w = weight[blocks - 2] + weight[blocks - 1];
            value[blocks - 2] =
                (value[blocks - 2] * weight[blocks - 2] +
                 value[blocks - 1] * weight[blocks - 1]) / w;
            weight[blocks - 2] = w;
            count[blocks - 2] += count[blocks - 1];
            --blocks;
        }
    }
    std::size_t i = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t c = 0; c < count[b]; ++c) z[i++] = value[b];
    }
}

}  // namespace

std::vector<double> project_positions(std::vector<double> x,
                                      const WaveguideGeometry& geom) {
    const std::size_t n = x.size();
    if (n == 0) return x;
    const double lo = geom.position_bounds[0];
    const double hi = geom.position_bounds[1];
    const double spacing = geom.min_spacing;
    if (static_cast<double>(n - 1) * spacing > hi - lo + 1e-12) {
        throw InfeasibleError("PA count does not fit the position bounds at min spacing");
    }

    std::sort(x.begin(), x.end());
    // Least-squares spacing repair: shift out the ladder, pool, shift back.
    for (std::size_t i = 0; i < n; ++i) x[i] -= static_cast<double>(i) * spacing;
    isotonic_nondecreasing(x);
    for (std::size_t i = 0; i < n; ++i) x[i] += static_cast<double>(i) * spacing;

    if (x.front() < lo) {
        x.front() = lo;
        for (std::size_t i = 1; i < n; ++i) x[i] = std::max(x[i], x[i - 1] + spacing);
    }
    if (x.back() > hi) {
        x.back() = hi;
        for (std::size_t i = n - 1; i-- > 0;) x[i] = std::min(x[i], x[i + 1] - spacing);
    }
    return x;
}

std::vector<double> trust_clamp(std::vector<double> x,
                                const std::vector<double>& anchor, double radius,
                                const WaveguideGeometry& geom) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], anchor[i] - radius, anchor[i] + radius);
    }
    return project_positions(std::move(x), geom);
}

PSOParams PSOParams::for_init(InitScheme scheme, std::uint64_t seed) {
    PSOParams p;
    p.seed = seed;
    p.init = scheme;
    if (scheme == InitScheme::TwoPAOptimum) {
        p.inertia = 1.0;
        p.trust_radius = 0.5;
    }
    return p;
}

SwarmInit init_positions(InitScheme scheme, const ScenarioConfig& sc,
                         double trust_radius, int count, std::uint64_t seed) {
    if (count < 1) throw ConfigError("swarm needs at least one member");
    const auto& geom = sc.geometry;
    SwarmInit init;
    init.positions.resize(count);
    init.anchors.resize(count);

    if (scheme == InitScheme::Rand) {
        for (int p = 0; p < count; ++p) {
            SplitMix64 rng(split_seed(seed, 0x1a17, p));
            std::vector<double> x(sc.pa_count);
            for (auto& v : x) {
                v = rng.next_in(geom.position_bounds[0], geom.position_bounds[1]);
            }
            init.positions[p] = project_positions(std::move(x), geom);
            init.anchors[p] = init.positions[p];
        }
        return init;
    }

    // Topology-aware warm start: per-group clusters packed at min spacing
    // centered on the two-PA optimum.
    ScenarioConfig two = sc;
    two.pa_count = 2;
    two.group_sizes = {1, 1};
    two.regime = Regime::NonLeakage;
    const TwoPAResult opt = optimize_two_pa(two);
    if (!opt.feasible) {
        throw InfeasibleError("two-PA warm start unavailable for this scenario");
    }
    const double centers[2] = {opt.x1, opt.x2};
    std::vector<double> packed;
    for (std::size_t g = 0; g < sc.group_sizes.size(); ++g) {
        const int size = sc.group_sizes[g];
        for (int i = 0; i < size; ++i) {
            packed.push_back(centers[std::min<std::size_t>(g, 1)] +
                             (i - 0.5 * (size - 1)) * geom.min_spacing);
        }
    }
    init.warm_start = project_positions(packed, geom);
    std::sort(packed.begin(), packed.end());
    for (std::size_t i = 0; i < packed.size(); ++i) {
        if (std::abs(init.warm_start[i] - packed[i]) > 1e-9) init.shifted = true;
    }

    for (int p = 0; p < count; ++p) {
        std::vector<double> x = init.warm_start;
        if (p > 0) {  // member 0 starts exactly at the warm start
            SplitMix64 rng(split_seed(seed, 0x1a17, p));
            for (auto& v : x) v += rng.next_in(-trust_radius, trust_radius);
        }
        init.positions[p] =
            trust_clamp(std::move(x), init.warm_start, trust_radius, geom);
        init.anchors[p] = init.warm_start;
    }
    return init;
}

double zf_fitness(const std::vector<double>& positions, const ScenarioConfig& sc) {
    try {
        const ChannelSet cs = effective_channel(sc, positions);
        const Beamformer bf = zf_precoder(cs.H_eff, sc.power.max_power);
        const auto sinr = compute_sinr(cs.H_eff, bf.W, sc.power.noise_power);
        for (double s : sinr) {
            if (s < sc.power.min_sinr) return kNegInf;
        }
        return sum_rate(sinr);
    } catch (const std::exception&) {
        return kNegInf;
    }
}

void velocity_update(std::vector<double>& velocity, const std::vector<double>& x,
                     const std::vector<double>& pbest,
                     const std::vector<double>& gbest, const PSOParams& params,
                     const std::vector<double>& r1, const std::vector<double>& r2) {
    for (std::size_t i = 0; i < velocity.size(); ++i) {
        double v = params.inertia * velocity[i] +
                   params.cognitive * r1[i] * (pbest[i] - x[i]) +
                   params.social * r2[i] * (gbest[i] - x[i]);
        velocity[i] = std::clamp(v, -params.max_velocity, params.max_velocity);
    }
}

namespace {

/// Evaluates fitness for all members, optionally across threads; results
/// land in a preallocated slot per member so the reduction order is fixed.
void evaluate_all(const std::vector<std::vector<double>>& members,
                  const ScenarioConfig& sc, bool parallel,
                  std::vector<double>& out) {
    const std::size_t n = members.size();
    out.resize(n);
    if (!parallel || n < 2) {
        for (std::size_t i = 0; i < n; ++i) out[i] = zf_fitness(members[i], sc);
        return;
    }
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), 8u);
    std::vector<std::future<void>> tasks;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        tasks.push_back(std::async(std::launch::async, [&, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                out[i] = zf_fitness(members[i], sc);
            }
        }));
    }
    for (auto& t : tasks) t.get();
}

void fill_best_result(SwarmResult& res, const ScenarioConfig& sc) {
    if (!res.feasible) return;
    const ChannelSet cs = effective_channel(sc, res.positions);
    res.beamformer = zf_precoder(cs.H_eff, sc.power.max_power);
    res.report = rate_report(cs.H_eff, res.beamformer.W, sc.power.noise_power,
                             sc.power.min_sinr);
}

void fill_infeasible_diagnostics(SwarmResult& res,
                                 const std::vector<std::vector<double>>& members,
                                 const ScenarioConfig& sc) {
    double best_rate = kNegInf;
    std::vector<double> best_pos;
    for (const auto& x : members) {
        try {
            const ChannelSet cs = effective_channel(sc, x);
            const Beamformer bf = zf_precoder(cs.H_eff, sc.power.max_power);
            const double r =
                sum_rate(compute_sinr(cs.H_eff, bf.W, sc.power.noise_power));
            if (r > best_rate) {
                best_rate = r;
                best_pos = x;
            }
        } catch (const std::exception&) {
        }
    }
    res.best_infeasible_rate = best_rate;
    res.best_infeasible_positions = best_pos;
}

}  // namespace

SwarmResult pso_zf(const ScenarioConfig& sc, const PSOParams& params) {
    if (params.particle_count < 1 || params.iterations < 1 ||
        !(params.max_velocity > 0.0) || params.inertia < 0.0) {
        throw ConfigError("invalid PSO parameters");
    }
    const int n_pa = sc.pa_count;
    const int n_p = params.particle_count;

    SwarmInit init =
        init_positions(params.init, sc, params.trust_radius, n_p, params.seed);

    SwarmResult res;
    res.warm_start = init.warm_start;
    res.init_shifted = init.shifted;
    res.best_infeasible_rate = kNegInf;

    std::vector<std::vector<double>> x = init.positions;
    std::vector<std::vector<double>> velocity(n_p), pbest = x;
    for (auto& v : velocity) v.assign(n_pa, 0.0);
    std::vector<double> f_pbest(n_p, kNegInf);

    std::vector<double> gbest = x[0];
    double f_gbest = kNegInf;

    std::vector<double> fitness;
    std::vector<double> r1(n_pa), r2(n_pa);
    for (int t = 0; t < params.iterations; ++t) {
        evaluate_all(x, sc, params.parallel, fitness);
        for (int p = 0; p < n_p; ++p) {
            if (fitness[p] > f_pbest[p]) {
                f_pbest[p] = fitness[p];
                pbest[p] = x[p];
            }
            if (fitness[p] > f_gbest) {
                f_gbest = fitness[p];
                gbest = x[p];
            }
        }
        res.trace.push_back(f_gbest);

        for (int p = 0; p < n_p; ++p) {
            SplitMix64 rng(split_seed(params.seed, 0xF00 + t, p));
            for (int i = 0; i < n_pa; ++i) r1[i] = rng.next_double();
            for (int i = 0; i < n_pa; ++i) r2[i] = rng.next_double();
            velocity_update(velocity[p], x[p], pbest[p], gbest, params, r1, r2);
            for (int i = 0; i < n_pa; ++i) x[p][i] += velocity[p][i];
            x[p] = trust_clamp(std::move(x[p]), init.anchors[p],
                               params.trust_radius, sc.geometry);
        }
    }

    res.feasible = std::isfinite(f_gbest);
    if (res.feasible) {
        res.positions = gbest;
        res.fitness = f_gbest;
        fill_best_result(res, sc);
    } else {
        fill_infeasible_diagnostics(res, x, sc);
    }
    return res;
}

std::vector<double> de_trial_vector(const std::vector<double>& target,
                                    const std::vector<double>& base,
                                    const std::vector<double>& d1,
                                    const std::vector<double>& d2, double weight,
                                    double crossover_rate, int forced_index,
                                    const std::vector<double>& uniforms) {
    std::vector<double> trial = target;
    for (std::size_t j = 0; j < target.size(); ++j) {
        if (uniforms[j] < crossover_rate || static_cast<int>(j) == forced_index) {
            trial[j] = base[j] + weight * (d1[j] - d2[j]);
        }
    }
    return trial;
}

SwarmResult de_zf(const ScenarioConfig& sc, const DEParams& params) {
    if (params.population < 4 || params.iterations < 1) {
        throw ConfigError("DE requires population >= 4 and iterations >= 1");
    }
    const int n_pa = sc.pa_count;
    const int pop = params.population;

    SwarmInit init =
        init_positions(params.init, sc, params.init_radius, pop, params.seed);

    SwarmResult res;
    res.warm_start = init.warm_start;
    res.init_shifted = init.shifted;
    res.best_infeasible_rate = kNegInf;

    std::vector<std::vector<double>> x = init.positions;
    std::vector<double> fitness(pop);
    for (int i = 0; i < pop; ++i) fitness[i] = zf_fitness(x[i], sc);

    double f_best = kNegInf;
    std::vector<double> best;
    auto refresh_best = [&] {
        for (int i = 0; i < pop; ++i) {
            if (fitness[i] > f_best) {
                f_best = fitness[i];
                best = x[i];
            }
        }
    };
    refresh_best();

    std::vector<double> uniforms(n_pa);
    for (int t = 0; t < params.iterations; ++t) {
        for (int i = 0; i < pop; ++i) {
            SplitMix64 rng(split_seed(params.seed, 0xDE10 + t, i));
            // Three distinct members, all different from i.
            int r[3];
            for (int k = 0; k < 3; ++k) {
                int pick;
                do {
                    pick = static_cast<int>(rng.next_u64() % pop);
                } while (pick == i || (k > 0 && pick == r[0]) ||
                         (k > 1 && pick == r[1]));
                r[k] = pick;
            }
            const int forced = static_cast<int>(rng.next_u64() % n_pa);
            for (int j = 0; j < n_pa; ++j) uniforms[j] = rng.next_double();

            auto trial = de_trial_vector(x[i], x[r[0]], x[r[1]], x[r[2]],
                                         params.weight, params.crossover_rate,
                                         forced, uniforms);
            trial = project_positions(std::move(trial), sc.geometry);
            const double f_trial = zf_fitness(trial, sc);
            if (f_trial >= fitness[i]) {
                x[i] = std::move(trial);
                fitness[i] = f_trial;
            }
        }
        refresh_best();
        res.trace.push_back(f_best);
    }

    res.feasible = std::isfinite(f_best);
    if (res.feasible) {
        res.positions = best;
        res.fitness = f_best;
        fill_best_result(res, sc);
    } else {
        fill_infeasible_diagnostics(res, x, sc);
    }
    return res;
}

}  // namespace passim
