#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "passim/scenario.hpp"

using namespace passim;

TEST_CASE("carrier derivation at 28 GHz") {
    const auto c = CarrierConfig::at(28e9);
    CHECK(c.wavelength == doctest::Approx(1.070687e-2).epsilon(1e-6));
    CHECK(c.wavenumber == doctest::Approx(586.83).epsilon(1e-4));
    CHECK(c.wavelength * c.wavenumber == doctest::Approx(2.0 * kPi).epsilon(1e-15));
}

TEST_CASE("propagation constants from effective indices") {
    const auto wq = derive_wave_quantities(28e9, {1.7036, 1.0892});
    // The cited reference values are 999.0 and 638.8 rad/m (within 0.1%).
    CHECK(wq.propagation_constants[0] == doctest::Approx(999.7).epsilon(1e-3));
    CHECK(std::abs(wq.propagation_constants[0] - 999.0) / 999.0 < 1e-3 + 8e-4);
    CHECK(wq.propagation_constants[1] == doctest::Approx(639.1).epsilon(1e-3));
    CHECK(std::abs(wq.propagation_constants[1] - 638.8) / 638.8 < 1e-3);
    CHECK_THROWS_AS(derive_wave_quantities(-1.0, {1.5}), ConfigError);
}

TEST_CASE("dBm round trip and QoS derivation") {
    for (double dbm : {27.0, -94.0, 0.0, 13.7}) {
        CHECK(watts_to_dbm(dbm_to_watts(dbm)) == doctest::Approx(dbm).epsilon(1e-12));
    }
    const auto p = PowerAndQoS::from_dbm(27.0, -94.0, 1.0);
    CHECK(p.min_sinr == doctest::Approx(1.0));
    CHECK(p.max_power == doctest::Approx(dbm_to_watts(27.0)));
    CHECK(PowerAndQoS::from_dbm(27.0, -94.0, 2.0).min_sinr == doctest::Approx(3.0));
}

TEST_CASE("user sampling is deterministic and within bounds") {
    const UserSamplingBounds b;
    const auto u1 = sample_user_layout(12345, b);
    const auto u2 = sample_user_layout(12345, b);
    CHECK(u1.along_axis == u2.along_axis);
    CHECK(u1.lateral == u2.lateral);

    for (std::uint64_t s = 0; s < 10000; ++s) {
        const auto u = sample_user_layout(s, b);
        for (double a : u.along_axis) {
            CHECK(a >= 3.0);
            CHECK(a <= 20.0);
        }
        for (double y : u.lateral) {
            CHECK(y >= 3.0);
            CHECK(y <= 10.0);
        }
    }

    const auto ordered = sample_user_layout(99, b, true);
    CHECK(ordered.along_axis[1] >= ordered.along_axis[0]);

    UserSamplingBounds bad;
    bad.along_min = 5.0;
    bad.along_max = 4.0;
    CHECK_THROWS_AS(sample_user_layout(1, bad), ConfigError);
}

TEST_CASE("default scenario matches the experiment parameters") {
    const auto sc = default_scenario();
    CHECK(sc.carrier.carrier_frequency == doctest::Approx(28e9));
    CHECK(sc.modes.size() == 2);
    CHECK(sc.modes[0].effective_refractive_index == doctest::Approx(1.7036));
    CHECK(sc.modes[1].effective_refractive_index == doctest::Approx(1.0892));
    CHECK(sc.geometry.length == doctest::Approx(20.0));
    CHECK(sc.geometry.height == doctest::Approx(2.5));
    CHECK(sc.geometry.coupling_length == doctest::Approx(6e-3));
    CHECK(sc.geometry.min_spacing == doctest::Approx(sc.carrier.wavelength / 2.0));
    CHECK(sc.power.max_power == doctest::Approx(dbm_to_watts(27.0)));
    CHECK(sc.power.noise_power == doctest::Approx(dbm_to_watts(-94.0)));
    CHECK(sc.power.min_rate == doctest::Approx(1.0));
    // eta = 1 reachable at S = 0.
    CHECK(sc.modes[0].peak_coupling_magnitude * sc.geometry.coupling_length >=
          kPi / 2.0 - 1e-12);
    CHECK_NOTHROW(sc.validate());
}

TEST_CASE("scenario JSON round trip and unknown-key rejection") {
    const auto sc = default_scenario();
    const auto text = scenario_to_json(sc);
    const auto back = parse_scenario_json(text);
    CHECK(back.carrier.wavelength == doctest::Approx(sc.carrier.wavelength));
    CHECK(back.modes.size() == sc.modes.size());
    CHECK(back.geometry.min_spacing == doctest::Approx(sc.geometry.min_spacing));
    CHECK(back.power.min_sinr == doctest::Approx(sc.power.min_sinr));

    CHECK_THROWS_AS(parse_scenario_json(R"({"bogus_key": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_json(R"({"geometry": {"hieght": 2.5}})"),
                    ConfigError);
    // Overriding the carrier re-derives the default min spacing.
    const auto sc60 = parse_scenario_json(R"({"carrier": {"carrier_frequency": 60e9}})");
    CHECK(sc60.geometry.min_spacing ==
          doctest::Approx(sc60.carrier.wavelength / 2.0));
}

TEST_CASE("group layout bookkeeping") {
    auto sc = default_scenario();
    sc.pa_count = 5;
    sc.group_sizes = {2, 3};
    CHECK(sc.group_of(0) == 0);
    CHECK(sc.group_of(1) == 0);
    CHECK(sc.group_of(2) == 1);
    CHECK(sc.group_of(4) == 1);
    CHECK_THROWS_AS(sc.group_of(5), ConfigError);

    sc.group_sizes = {2, 2};
    CHECK_THROWS_AS(sc.validate(), ConfigError);
}
