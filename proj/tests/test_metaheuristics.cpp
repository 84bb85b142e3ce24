#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "passim/metaheuristics.hpp"
#include "passim/rng.hpp"
#include "passim/twopa.hpp"

using namespace passim;

namespace {

ScenarioConfig swarm_scenario(int n1, int n2, Regime regime = Regime::NonLeakage,
                              double mu = 0.0) {
    auto sc = default_scenario();
    sc.pa_count = n1 + n2;
    sc.group_sizes = {n1, n2};
    sc.regime = regime;
    sc.unmatched_field_selectivity = mu;
    sc.users.along_axis = {5.0, 13.0};
    sc.users.lateral = {4.0, 7.0};
    return sc;
}

bool feasible_layout(const std::vector<double>& x, const WaveguideGeometry& g) {
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] < g.position_bounds[0] - 1e-12) return false;
        if (x[i] > g.position_bounds[1] + 1e-12) return false;
        if (i > 0 && x[i] - x[i - 1] < g.min_spacing - 1e-9) return false;
    }
    return true;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace

TEST_CASE("feasibility projection") {
    WaveguideGeometry geom;
    geom.min_spacing = 0.5;
    geom.position_bounds = {0.0, 20.0};

    SUBCASE("postconditions on random inputs") {
        SplitMix64 rng(31);
        for (int rep = 0; rep < 500; ++rep) {
            std::vector<double> x(6);
            for (auto& v : x) v = rng.next_in(-2.0, 22.0);
            const auto p = project_positions(x, geom);
            CHECK(feasible_layout(p, geom));
            // Idempotence.
            const auto pp = project_positions(p, geom);
            CHECK(sq_dist(p, pp) <= 1e-18);
        }
    }
    SUBCASE("all-equal input maps to the centered ladder") {
        const std::vector<double> x(4, 10.0);
        const auto p = project_positions(x, geom);
        // Least-squares ladder: start = c - (N-1) Delta / 2.
        for (int i = 0; i < 4; ++i) {
            CHECK(p[i] == doctest::Approx(10.0 - 0.75 + 0.5 * i).epsilon(1e-12));
        }
        // No feasible ladder offset does better.
        const double got = sq_dist(x, p);
        for (double s = 8.0; s <= 10.5; s += 1e-3) {
            std::vector<double> ladder(4);
            for (int i = 0; i < 4; ++i) ladder[i] = s + 0.5 * i;
            CHECK(got <= sq_dist(x, ladder) + 1e-9);
        }
    }
    SUBCASE("projection beats the nearest-sorted heuristic") {
        // Sorted input {0, 0.1, 10}: pushing the middle point up (toward
        // the far third point) is worse than splitting the first pair.
        const std::vector<double> x{0.0, 0.1, 10.0};
        const auto p = project_positions(x, geom);
        CHECK(feasible_layout(p, geom));
        const std::vector<double> naive{0.0, 0.5, 10.0};
        CHECK(sq_dist(x, p) <= sq_dist(x, naive) + 1e-12);
    }
    SUBCASE("too many PAs for the span") {
        WaveguideGeometry tiny;
        tiny.min_spacing = 1.0;
        tiny.position_bounds = {0.0, 2.0};
        CHECK_THROWS_AS(project_positions({0.0, 0.5, 1.0, 1.5}, tiny),
                        InfeasibleError);
    }
}

TEST_CASE("trust-region clamp") {
    WaveguideGeometry geom;
    geom.min_spacing = 0.5;
    geom.position_bounds = {0.0, 20.0};
    const std::vector<double> anchor{4.0, 6.0, 8.0};

    const auto c = trust_clamp({1.0, 6.3, 14.0}, anchor, 1.0, geom);
    CHECK(feasible_layout(c, geom));
    for (int i = 0; i < 3; ++i) {
        CHECK(c[i] >= anchor[i] - 1.0 - 1e-9);
        CHECK(c[i] <= anchor[i] + 1.0 + 1e-9);
    }
    // A point already inside the trust box and X is untouched.
    const auto same = trust_clamp({4.1, 6.3, 7.9}, anchor, 1.0, geom);
    CHECK(same[0] == doctest::Approx(4.1));
    CHECK(same[1] == doctest::Approx(6.3));
    CHECK(same[2] == doctest::Approx(7.9));
}

TEST_CASE("velocity update") {
    PSOParams p;
    p.inertia = 1.0;
    p.cognitive = 0.0;
    p.social = 0.0;
    p.max_velocity = 5.0;
    std::vector<double> v{1.0, -2.0};
    const std::vector<double> x{0.0, 0.0};
    velocity_update(v, x, x, x, p, {0.5, 0.5}, {0.5, 0.5});
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(-2.0));

    // Pull toward pbest/gbest with unit random draws.
    p.cognitive = 1.4;
    p.social = 1.2;
    v = {0.0, 0.0};
    velocity_update(v, x, {1.0, 1.0}, {2.0, 2.0}, p, {1.0, 1.0}, {1.0, 1.0});
    CHECK(v[0] == doctest::Approx(1.4 + 2.4));
    CHECK(v[1] == doctest::Approx(1.4 + 2.4));

    // Clipping.
    v = {10.0, -10.0};
    p.cognitive = 0.0;
    p.social = 0.0;
    velocity_update(v, x, x, x, p, {0.0, 0.0}, {0.0, 0.0});
    CHECK(v[0] == doctest::Approx(5.0));
    CHECK(v[1] == doctest::Approx(-5.0));
}

TEST_CASE("ZF fitness sentinel") {
    const auto sc = swarm_scenario(1, 1);
    // A sensible two-PA layout earns a finite fitness.
    const auto res = optimize_two_pa(sc);
    REQUIRE(res.feasible);
    const double f = zf_fitness({res.x1, res.x2}, sc);
    CHECK(std::isfinite(f));
    CHECK(f > 0.0);
    // An unreachable SINR floor turns every layout into the -inf sentinel.
    auto strict = sc;
    strict.power.min_sinr = 1e12;
    const double bad = zf_fitness({res.x1, res.x2}, strict);
    CHECK(bad == -std::numeric_limits<double>::infinity());
}

TEST_CASE("swarm initialization") {
    SUBCASE("random init is deterministic with per-member anchors") {
        const auto sc = swarm_scenario(2, 2);
        const auto a = init_positions(InitScheme::Rand, sc, 2.0, 16, 99);
        const auto b = init_positions(InitScheme::Rand, sc, 2.0, 16, 99);
        REQUIRE(a.positions.size() == 16);
        CHECK(a.warm_start.empty());
        for (int i = 0; i < 16; ++i) {
            CHECK(sq_dist(a.positions[i], b.positions[i]) == 0.0);
            CHECK(sq_dist(a.positions[i], a.anchors[i]) == 0.0);
            CHECK(feasible_layout(a.positions[i], sc.geometry));
        }
        const auto c = init_positions(InitScheme::Rand, sc, 2.0, 16, 100);
        CHECK(sq_dist(a.positions[0], c.positions[0]) > 0.0);
    }
    SUBCASE("two-PA warm start is reproduced exactly for N = 2") {
        const auto sc = swarm_scenario(1, 1);
        const auto opt = optimize_two_pa(sc);
        REQUIRE(opt.feasible);
        const auto init = init_positions(InitScheme::TwoPAOptimum, sc, 0.5, 8, 7);
        REQUIRE(init.warm_start.size() == 2);
        CHECK(init.warm_start[0] == doctest::Approx(opt.x1).epsilon(1e-12));
        CHECK(init.warm_start[1] == doctest::Approx(opt.x2).epsilon(1e-12));
        CHECK_FALSE(init.shifted);
        // Member 0 sits on the warm start, all share its anchor.
        CHECK(sq_dist(init.positions[0], init.warm_start) == 0.0);
        for (const auto& anchor : init.anchors) {
            CHECK(sq_dist(anchor, init.warm_start) == 0.0);
        }
    }
    SUBCASE("clustered warm start for larger groups") {
        const auto sc = swarm_scenario(3, 3);
        const auto init = init_positions(InitScheme::TwoPAOptimum, sc, 0.5, 8, 7);
        REQUIRE(init.warm_start.size() == 6);
        CHECK(feasible_layout(init.warm_start, sc.geometry));
        for (const auto& pos : init.positions) {
            CHECK(feasible_layout(pos, sc.geometry));
        }
        // Clusters are packed: spacing inside each group is min_spacing.
        for (int i = 1; i < 3; ++i) {
            CHECK(init.warm_start[i] - init.warm_start[i - 1] ==
                  doctest::Approx(sc.geometry.min_spacing).epsilon(1e-9));
            CHECK(init.warm_start[3 + i] - init.warm_start[3 + i - 1] ==
                  doctest::Approx(sc.geometry.min_spacing).epsilon(1e-9));
        }
    }
}

TEST_CASE("PSO-ZF behaviour") {
    auto sc = swarm_scenario(2, 2);
    PSOParams p;
    p.particle_count = 12;
    p.iterations = 8;
    p.seed = 5;

    SUBCASE("trace is non-decreasing and matches the returned fitness") {
        const auto res = pso_zf(sc, p);
        REQUIRE(res.feasible);
        REQUIRE(res.trace.size() == static_cast<size_t>(p.iterations));
        for (size_t i = 1; i < res.trace.size(); ++i) {
            CHECK(res.trace[i] >= res.trace[i - 1]);
        }
        CHECK(res.fitness == doctest::Approx(res.trace.back()));
        CHECK(res.fitness == doctest::Approx(zf_fitness(res.positions, sc)));
        CHECK(res.report.feasible);
    }
    SUBCASE("deterministic replay and parallel equivalence") {
        const auto a = pso_zf(sc, p);
        const auto b = pso_zf(sc, p);
        CHECK(a.fitness == b.fitness);
        CHECK(a.positions == b.positions);
        CHECK(a.trace == b.trace);
        auto pp = p;
        pp.parallel = true;
        const auto c = pso_zf(sc, pp);
        CHECK(a.fitness == c.fitness);
        CHECK(a.positions == c.positions);
        CHECK(a.trace == c.trace);
    }
    SUBCASE("frozen swarm keeps its initial best") {
        PSOParams frozen = p;
        frozen.particle_count = 1;
        frozen.inertia = 0.0;
        frozen.cognitive = 0.0;
        frozen.social = 0.0;
        frozen.init = InitScheme::TwoPAOptimum;
        const auto res = pso_zf(sc, frozen);
        REQUIRE(!res.trace.empty());
        for (double v : res.trace) {
            CHECK(v == doctest::Approx(res.trace.front()));
        }
    }
    SUBCASE("weak leakage with zero unmatched selectivity equals non-leakage") {
        auto wl = sc;
        wl.regime = Regime::WeakLeakage;
        wl.unmatched_field_selectivity = 0.0;
        const auto a = pso_zf(sc, p);
        const auto b = pso_zf(wl, p);
        CHECK(a.trace == b.trace);
        CHECK(a.positions == b.positions);
    }
}

TEST_CASE("DE-ZF behaviour") {
    auto sc = swarm_scenario(2, 2);
    DEParams p;
    p.population = 12;
    p.iterations = 8;
    p.seed = 5;

    SUBCASE("trace is non-decreasing, replay is deterministic") {
        const auto a = de_zf(sc, p);
        REQUIRE(a.feasible);
        REQUIRE(a.trace.size() == static_cast<size_t>(p.iterations));
        for (size_t i = 1; i < a.trace.size(); ++i) {
            CHECK(a.trace[i] >= a.trace[i - 1]);
        }
        const auto b = de_zf(sc, p);
        CHECK(a.fitness == b.fitness);
        CHECK(a.positions == b.positions);
        CHECK(a.trace == b.trace);
    }
    SUBCASE("trial vector construction") {
        const std::vector<double> target{1.0, 2.0, 3.0};
        const std::vector<double> base{0.0, 0.0, 0.0};
        const std::vector<double> d1{1.0, 1.0, 1.0};
        const std::vector<double> d2{0.0, 0.5, 1.0};
        // CR = 0: only the forced index comes from the mutant.
        const auto t0 = de_trial_vector(target, base, d1, d2, 0.5, 0.0, 1,
                                        {0.9, 0.9, 0.9});
        CHECK(t0[0] == doctest::Approx(1.0));
        CHECK(t0[1] == doctest::Approx(0.5 * (1.0 - 0.5)));
        CHECK(t0[2] == doctest::Approx(3.0));
        // CR = 1: everything from the mutant.
        const auto t1 = de_trial_vector(target, base, d1, d2, 0.5, 1.0, 0,
                                        {0.0, 0.0, 0.0});
        CHECK(t1[0] == doctest::Approx(0.5));
        CHECK(t1[1] == doctest::Approx(0.25));
        CHECK(t1[2] == doctest::Approx(0.0));
    }
}
