#pragma once

#include <cstdint>
#include <vector>

#include "passim/beamforming.hpp"
#include "passim/scenario.hpp"

namespace passim {

enum class InitScheme { Rand, TwoPAOptimum };

struct PSOParams {
    int particle_count = 100;
    int iterations = 50;
    double inertia = 0.85;      // 1.0 recommended with TwoPAOptimum init
    double cognitive = 1.4;     // u_1
    double social = 1.2;        // u_2
    double max_velocity = 5.0;  // m, per-entry clip
    double trust_radius = 2.0;  // m; 0.5 recommended with TwoPAOptimum init
    std::uint64_t seed = 0;
    InitScheme init = InitScheme::Rand;
    bool parallel = false;

    /// Defaults tuned per init scheme (inertia and trust radius).
    static PSOParams for_init(InitScheme scheme, std::uint64_t seed);
};

struct DEParams {
    int population = 100;
    int iterations = 50;
    double weight = 0.5;          // differential weight F
    double crossover_rate = 0.9;  // CR
    double init_radius = 2.0;     // m, perturbation around a warm start
    std::uint64_t seed = 0;
    InitScheme init = InitScheme::Rand;
};

/// Initial swarm/population. Rand: every member uniform over the position
/// bounds, projected; each member's trust region is centered on its own
/// start. TwoPAOptimum: per-group clusters packed at min spacing around
/// the two-PA optimum; member 0 sits exactly on the warm start, the rest
/// are perturbed within the trust radius; one shared trust center.
struct SwarmInit {
    std::vector<std::vector<double>> positions;  // per member
    std::vector<std::vector<double>> anchors;    // trust centers, per member
    std::vector<double> warm_start;              // x^(0); empty for Rand
    bool shifted = false;  // warm-start clusters had to be moved inward
};

SwarmInit init_positions(InitScheme scheme, const ScenarioConfig& sc,
                         double trust_radius, int count, std::uint64_t seed);

struct SwarmResult {
    bool feasible = false;
    std::vector<double> positions;
    double fitness = 0.0;  // sum rate at the best feasible point
    Beamformer beamformer;
    RateReport report;
    std::vector<double> trace;  // best-so-far fitness per iteration
    std::vector<double> warm_start;
    bool init_shifted = false;
    // Diagnostics when no feasible point was ever found.
    double best_infeasible_rate = 0.0;
    std::vector<double> best_infeasible_positions;
};

/// Projection onto the feasible set X: ascending order, pairwise spacing
/// >= min_spacing, positions within bounds. Euclidean (least-squares) in
/// the spacing constraint via isotonic regression, then bound repair.
/// Deterministic and idempotent.
std::vector<double> project_positions(std::vector<double> x,
                                      const WaveguideGeometry& geom);

/// Trust-region clamp to [anchor_n - radius, anchor_n + radius], followed
/// by re-projection onto X.
std::vector<double> trust_clamp(std::vector<double> x,
                                const std::vector<double>& anchor, double radius,
                                const WaveguideGeometry& geom);

/// ZF-pipeline fitness: sum rate when every user meets its minimum SINR,
/// -infinity otherwise.
double zf_fitness(const std::vector<double>& positions, const ScenarioConfig& sc);

/// One velocity update v <- psi v + u1 r1 (pbest - x) + u2 r2 (gbest - x),
/// entries clipped to [-v_max, v_max]. r1/r2 are uniform [0,1) vectors.
void velocity_update(std::vector<double>& velocity, const std::vector<double>& x,
                     const std::vector<double>& pbest,
                     const std::vector<double>& gbest, const PSOParams& params,
                     const std::vector<double>& r1, const std::vector<double>& r2);

SwarmResult pso_zf(const ScenarioConfig& sc, const PSOParams& params);

/// Standard rand/1/bin differential evolution on the same fitness and
/// feasibility projection. No trust region: the trust-region clamp is a
/// PSO mechanism, the DE baseline only respects X.
SwarmResult de_zf(const ScenarioConfig& sc, const DEParams& params);

/// rand/1/bin trial construction, exposed for testing: mutant =
/// base + F (d1 - d2); entry j taken from the mutant when u_j < CR or
/// j == forced_index.
std::vector<double> de_trial_vector(const std::vector<double>& target,
                                    const std::vector<double>& base,
                                    const std::vector<double>& d1,
                                    const std::vector<double>& d2, double weight,
                                    double crossover_rate, int forced_index,
                                    const std::vector<double>& uniforms);

}  // namespace passim
