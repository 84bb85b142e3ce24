#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "passim/baselines.hpp"

using namespace passim;

namespace {

ScenarioConfig baseline_scenario() {
    auto sc = default_scenario();
    sc.users.along_axis = {5.0, 13.0};
    sc.users.lateral = {4.0, 7.0};
    return sc;
}

}  // namespace

TEST_CASE("TDMA with a single PA") {
    const auto sc = baseline_scenario();
    const auto res = tdma_single_mode(sc, 1);
    REQUIRE(res.rate.size() == 2);
    REQUIRE(res.positions.size() == 2);

    const double lambda0 = sc.carrier.wavelength;
    for (int k = 0; k < 2; ++k) {
        // One PA has nothing to align with: it sits on top of the user and
        // the slot rate is (1/2) log2(1 + P lambda0^2 / (16 pi^2 z^2 s2)).
        const double z2 = sc.users.lateral[k] * sc.users.lateral[k] +
                          sc.geometry.height * sc.geometry.height;
        const double snr = sc.power.max_power * lambda0 * lambda0 /
                           (16.0 * kPi * kPi * z2 * sc.power.noise_power);
        CHECK(res.rate[k] == doctest::Approx(0.5 * std::log2(1.0 + snr)).epsilon(1e-6));
        REQUIRE(res.positions[k].size() == 1);
        CHECK(std::abs(res.positions[k][0] - sc.users.along_axis[k]) <=
              lambda0 / 8.0);
    }
    CHECK(res.sum_rate == doctest::Approx(res.rate[0] + res.rate[1]).epsilon(1e-12));
}

TEST_CASE("TDMA phase alignment reaches the coherent bound") {
    const auto sc = baseline_scenario();
    for (int n : {2, 4, 8, 12}) {
        const auto res = tdma_single_mode(sc, n);
        REQUIRE(res.channel_power.size() == 2);
        for (int k = 0; k < 2; ++k) {
            CHECK(res.channel_power[k] <= res.coherent_bound[k] * (1.0 + 1e-12));
            CHECK(res.channel_power[k] >= res.coherent_bound[k] * (1.0 - 1e-3));
            // Ladder respects the minimum spacing.
            for (size_t i = 1; i < res.positions[k].size(); ++i) {
                CHECK(res.positions[k][i] - res.positions[k][i - 1] >=
                      sc.geometry.min_spacing - 1e-9);
            }
        }
    }
}

TEST_CASE("TDMA users are served independently") {
    auto sc = baseline_scenario();
    const auto base = tdma_single_mode(sc, 4);
    sc.users.along_axis[1] = 17.0;
    sc.users.lateral[1] = 9.0;
    const auto moved = tdma_single_mode(sc, 4);
    CHECK(moved.rate[0] == doctest::Approx(base.rate[0]).epsilon(1e-12));
    CHECK(moved.rate[1] < base.rate[1]);
}

TEST_CASE("TDMA rate grows with the PA count") {
    const auto sc = baseline_scenario();
    double prev = 0.0;
    for (int n : {1, 2, 4, 8}) {
        const auto res = tdma_single_mode(sc, n);
        CHECK(res.sum_rate > prev);
        prev = res.sum_rate;
    }
    CHECK_THROWS_AS(tdma_single_mode(sc, 0), ConfigError);
}

TEST_CASE("fixed MISO baselines") {
    const auto sc = baseline_scenario();

    SUBCASE("digital array improves with more elements") {
        const auto small = fixed_miso(sc, 2, MisoMode::FullDigital);
        const auto large = fixed_miso(sc, 8, MisoMode::FullDigital);
        CHECK(small.antenna_count == 2);
        CHECK(large.sum_rate >= small.sum_rate - 1e-9);
        REQUIRE(small.positions.size() == 1);
        CHECK(small.positions[0].size() == 2);
        CHECK(small.positions[0][1] - small.positions[0][0] ==
              doctest::Approx(sc.carrier.wavelength / 2.0));
    }
    SUBCASE("hybrid equals digital when RF chains cover the array") {
        const auto dig = fixed_miso(sc, 2, MisoMode::FullDigital);
        const auto hyb = fixed_miso(sc, 2, MisoMode::Hybrid, 2);
        CHECK(std::abs(hyb.sum_rate - dig.sum_rate) <=
              1e-6 * std::max(1.0, dig.sum_rate));
    }
    SUBCASE("hybrid never beats digital") {
        for (int i : {4, 6, 8, 10}) {
            const auto dig = fixed_miso(sc, i, MisoMode::FullDigital);
            const auto hyb = fixed_miso(sc, i, MisoMode::Hybrid, 2);
            CHECK(hyb.sum_rate <= dig.sum_rate + 1e-9);
        }
    }
    SUBCASE("hybrid fitting residual is non-increasing") {
        const auto hyb = fixed_miso(sc, 8, MisoMode::Hybrid, 2);
        REQUIRE(hyb.residual_trace.size() >= 2);
        for (size_t i = 1; i < hyb.residual_trace.size(); ++i) {
            CHECK(hyb.residual_trace[i] <= hyb.residual_trace[i - 1] + 1e-12);
        }
    }
    SUBCASE("invalid configurations") {
        CHECK_THROWS_AS(fixed_miso(sc, 0, MisoMode::FullDigital), ConfigError);
        CHECK_THROWS_AS(fixed_miso(sc, 4, MisoMode::Hybrid, 0), ConfigError);
    }
}
