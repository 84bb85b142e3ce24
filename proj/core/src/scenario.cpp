#include "passim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "passim/rng.hpp"
#include "json.hpp"

namespace passim {

using nlohmann::json;

CarrierConfig CarrierConfig::at(double frequency_hz) {
    if (!(frequency_hz > 0.0)) {
        throw ConfigError("carrier_frequency must be positive");
    }
    CarrierConfig c;
    c.carrier_frequency = frequency_hz;
    c.wavelength = kSpeedOfLight / frequency_hz;
    c.wavenumber = 2.0 * kPi / c.wavelength;
    return c;
}

PowerAndQoS PowerAndQoS::from_dbm(double max_power_dbm, double noise_power_dbm,
                                  double min_rate_bpshz) {
    if (min_rate_bpshz < 0.0) {
        throw ConfigError("min_rate must be nonnegative");
    }
    PowerAndQoS p;
    p.max_power = dbm_to_watts(max_power_dbm);
    p.noise_power = dbm_to_watts(noise_power_dbm);
    p.min_rate = min_rate_bpshz;
    p.min_sinr = std::pow(2.0, min_rate_bpshz) - 1.0;
    return p;
}

int ScenarioConfig::group_of(int n) const {
    int offset = 0;
    for (std::size_t g = 0; g < group_sizes.size(); ++g) {
        offset += group_sizes[g];
        if (n < offset) return static_cast<int>(g);
    }
    throw ConfigError("PA index out of range of group layout");
}

void ScenarioConfig::validate() const {
    if (!(carrier.carrier_frequency > 0.0)) {
        throw ConfigError("carrier_frequency must be positive");
    }
    if (modes.empty()) throw ConfigError("at least one guided mode required");
    for (const auto& m : modes) {
        if (m.effective_refractive_index < 1.0) {
            throw ConfigError("effective_refractive_index must be >= 1");
        }
        if (!(m.evanescent_decay_rate > 0.0) || !(m.peak_coupling_magnitude > 0.0)) {
            throw ConfigError("mode decay rate and peak coupling must be positive");
        }
        if (m.matched_field_selectivity < 0.0 || m.matched_field_selectivity > 1.0) {
            throw ConfigError("matched_field_selectivity must lie in [0,1]");
        }
    }
    const auto& g = geometry;
    if (!(g.coupling_length > 0.0)) throw ConfigError("coupling_length must be positive");
    if (!(g.min_spacing > 0.0)) throw ConfigError("min_spacing must be positive");
    if (g.position_bounds[0] < 0.0 || g.position_bounds[0] >= g.position_bounds[1] ||
        g.position_bounds[1] > g.length) {
        throw ConfigError("position_bounds must satisfy 0 <= x_min < x_max <= length");
    }
    if (!(power.max_power > 0.0) || !(power.noise_power > 0.0)) {
        throw ConfigError("powers must be positive");
    }
    if (unmatched_field_selectivity < 0.0 || unmatched_field_selectivity > 1.0) {
        throw ConfigError("unmatched_field_selectivity must lie in [0,1]");
    }
    int total = 0;
    for (int s : group_sizes) {
        if (s < 0) throw ConfigError("group sizes must be nonnegative");
        total += s;
    }
    if (total != pa_count) throw ConfigError("group sizes must sum to pa_count");
    if (group_sizes.size() != modes.size()) {
        throw ConfigError("one PA group per guided mode expected");
    }
    if (users.along_axis.size() != users.lateral.size()) {
        throw ConfigError("user coordinate lists must have equal length");
    }
    for (std::size_t i = 0; i < users.along_axis.size(); ++i) {
        for (std::size_t j = i + 1; j < users.along_axis.size(); ++j) {
            if (users.along_axis[i] == users.along_axis[j] &&
                users.lateral[i] == users.lateral[j]) {
                throw ConfigError("users must occupy distinct positions");
            }
        }
    }
}

WaveQuantities derive_wave_quantities(double carrier_frequency,
                                      const std::vector<double>& effective_indices) {
    if (!(carrier_frequency > 0.0)) {
        throw ConfigError("carrier_frequency must be positive");
    }
    WaveQuantities w;
    w.wavelength = kSpeedOfLight / carrier_frequency;
    w.wavenumber = 2.0 * kPi / w.wavelength;
    w.propagation_constants.reserve(effective_indices.size());
    for (double n_eff : effective_indices) {
        if (n_eff < 1.0) throw ConfigError("effective index must be >= 1");
        w.propagation_constants.push_back(n_eff * w.wavenumber);
    }
    return w;
}

UserLayout sample_user_layout(std::uint64_t seed, const UserSamplingBounds& bounds,
                              bool order_along) {
    if (bounds.along_min > bounds.along_max || bounds.lateral_min > bounds.lateral_max) {
        throw ConfigError("degenerate user sampling bounds");
    }
    SplitMix64 rng(seed);
    UserLayout u;
    for (int k = 0; k < 2; ++k) {
        u.along_axis.push_back(rng.next_in(bounds.along_min, bounds.along_max));
        u.lateral.push_back(rng.next_in(bounds.lateral_min, bounds.lateral_max));
    }
    if (order_along && u.along_axis[1] < u.along_axis[0]) {
        std::swap(u.along_axis[0], u.along_axis[1]);
        std::swap(u.lateral[0], u.lateral[1]);
    }
    return u;
}

ScenarioConfig default_scenario() {
    ScenarioConfig sc;
    sc.carrier = CarrierConfig::at(28e9);

    const double L = 6e-3;
    // |Omega| = pi/(2L) makes the full-radiation target eta = 1 reachable
    // exactly at zero spacing.
    const double omega = kPi / (2.0 * L);
    const std::vector<double> n_eff{1.7036, 1.0892};
    auto wave = derive_wave_quantities(sc.carrier.carrier_frequency, n_eff);
    for (int m = 0; m < 2; ++m) {
        GuidedMode gm;
        gm.index = m;
        gm.effective_refractive_index = n_eff[m];
        gm.propagation_constant = wave.propagation_constants[m];
        gm.evanescent_decay_rate = 200.0;
        gm.peak_coupling_magnitude = omega;
        gm.matched_field_selectivity = 1.0;
        sc.modes.push_back(gm);
    }

    sc.geometry.length = 20.0;
    sc.geometry.height = 2.5;
    sc.geometry.coupling_length = L;
    sc.geometry.min_spacing = sc.carrier.wavelength / 2.0;
    sc.geometry.position_bounds = {0.0, 20.0};

    sc.users.along_axis = {5.0, 15.0};
    sc.users.lateral = {4.0, 6.0};

    sc.power = PowerAndQoS::from_dbm(27.0, -94.0, 1.0);
    sc.regime = Regime::NonLeakage;
    sc.unmatched_field_selectivity = 0.0;
    sc.pa_count = 2;
    sc.group_sizes = {1, 1};
    return sc;
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario parse error: ") + e.what());
    }

    ScenarioConfig sc = default_scenario();
    reject_unknown_keys(j, {"carrier", "modes", "geometry", "users", "power",
                            "regime", "unmatched_field_selectivity", "pa_count",
                            "group_sizes"},
                        "scenario");

    if (j.contains("carrier")) {
        const auto& c = j["carrier"];
        // wavelength and wavenumber are output-only; they are accepted so
        // that serialized metadata reloads, but always re-derived.
        reject_unknown_keys(c, {"carrier_frequency", "wavelength", "wavenumber"},
                            "carrier");
        sc.carrier = CarrierConfig::at(c.value("carrier_frequency",
                                               sc.carrier.carrier_frequency));
    }

    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        reject_unknown_keys(g, {"length", "height", "coupling_length",
                                "min_spacing", "position_bounds"},
                            "geometry");
        sc.geometry.length = g.value("length", sc.geometry.length);
        sc.geometry.height = g.value("height", sc.geometry.height);
        sc.geometry.coupling_length =
            g.value("coupling_length", sc.geometry.coupling_length);
        sc.geometry.min_spacing = g.value("min_spacing", sc.carrier.wavelength / 2.0);
        if (g.contains("position_bounds")) {
            auto b = g["position_bounds"].get<std::vector<double>>();
            if (b.size() != 2) throw ConfigError("position_bounds must have 2 entries");
            sc.geometry.position_bounds = {b[0], b[1]};
        } else {
            sc.geometry.position_bounds = {0.0, sc.geometry.length};
        }
    }
    // Spacing default tracks the (possibly overridden) carrier.
    if (!j.contains("geometry") || !j["geometry"].contains("min_spacing")) {
        sc.geometry.min_spacing = sc.carrier.wavelength / 2.0;
    }

    if (j.contains("modes")) {
        sc.modes.clear();
        int idx = 0;
        for (const auto& jm : j["modes"]) {
            reject_unknown_keys(jm, {"effective_refractive_index",
                                     "evanescent_decay_rate",
                                     "peak_coupling_magnitude",
                                     "matched_field_selectivity",
                                     "propagation_constant"},
                                "modes[" + std::to_string(idx) + "]");
            GuidedMode gm;
            gm.index = idx++;
            gm.effective_refractive_index = jm.value("effective_refractive_index", 1.0);
            gm.evanescent_decay_rate = jm.value("evanescent_decay_rate", 200.0);
            gm.peak_coupling_magnitude = jm.value(
                "peak_coupling_magnitude", kPi / (2.0 * sc.geometry.coupling_length));
            gm.matched_field_selectivity = jm.value("matched_field_selectivity", 1.0);
            sc.modes.push_back(gm);
        }
        auto wave = derive_wave_quantities(sc.carrier.carrier_frequency, [&] {
            std::vector<double> v;
            for (const auto& m : sc.modes) v.push_back(m.effective_refractive_index);
            return v;
        }());
        for (std::size_t m = 0; m < sc.modes.size(); ++m) {
            sc.modes[m].propagation_constant = wave.propagation_constants[m];
        }
    } else {
        // Re-derive in case the carrier changed.
        for (auto& m : sc.modes) {
            m.propagation_constant =
                m.effective_refractive_index * sc.carrier.wavenumber;
        }
    }

    if (j.contains("users")) {
        const auto& u = j["users"];
        reject_unknown_keys(u, {"along_axis", "lateral"}, "users");
        sc.users.along_axis = u.at("along_axis").get<std::vector<double>>();
        sc.users.lateral = u.at("lateral").get<std::vector<double>>();
    }

    if (j.contains("power")) {
        const auto& p = j["power"];
        reject_unknown_keys(p, {"max_power", "noise_power", "min_rate", "min_sinr"},
                            "power");
        sc.power = PowerAndQoS::from_dbm(p.value("max_power", 27.0),
                                         p.value("noise_power", -94.0),
                                         p.value("min_rate", 1.0));
    }

    if (j.contains("regime")) {
        std::string r = j["regime"].get<std::string>();
        if (r == "NonLeakage") {
            sc.regime = Regime::NonLeakage;
        } else if (r == "WeakLeakage") {
            sc.regime = Regime::WeakLeakage;
        } else {
            throw ConfigError("regime must be NonLeakage or WeakLeakage");
        }
    }
    sc.unmatched_field_selectivity =
        j.value("unmatched_field_selectivity", sc.unmatched_field_selectivity);
    sc.pa_count = j.value("pa_count", sc.pa_count);
    if (j.contains("group_sizes")) {
        sc.group_sizes = j["group_sizes"].get<std::vector<int>>();
    } else if (j.contains("pa_count")) {
        // Default split: first group gets the extra PA when N is odd.
        int n1 = (sc.pa_count + 1) / 2;
        sc.group_sizes = {n1, sc.pa_count - n1};
    }

    sc.validate();
    return sc;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_json(ss.str());
}

std::string scenario_to_json(const ScenarioConfig& sc) {
    json j;
    j["carrier"] = {{"carrier_frequency", sc.carrier.carrier_frequency},
                    {"wavelength", sc.carrier.wavelength},
                    {"wavenumber", sc.carrier.wavenumber}};
    j["modes"] = json::array();
    for (const auto& m : sc.modes) {
        j["modes"].push_back({{"effective_refractive_index", m.effective_refractive_index},
                              {"propagation_constant", m.propagation_constant},
                              {"evanescent_decay_rate", m.evanescent_decay_rate},
                              {"peak_coupling_magnitude", m.peak_coupling_magnitude},
                              {"matched_field_selectivity", m.matched_field_selectivity}});
    }
    j["geometry"] = {{"length", sc.geometry.length},
                     {"height", sc.geometry.height},
                     {"coupling_length", sc.geometry.coupling_length},
                     {"min_spacing", sc.geometry.min_spacing},
                     {"position_bounds", sc.geometry.position_bounds}};
    j["users"] = {{"along_axis", sc.users.along_axis},
                  {"lateral", sc.users.lateral}};
    j["power"] = {{"max_power", watts_to_dbm(sc.power.max_power)},
                  {"noise_power", watts_to_dbm(sc.power.noise_power)},
                  {"min_rate", sc.power.min_rate},
                  {"min_sinr", sc.power.min_sinr}};
    j["regime"] = sc.regime == Regime::NonLeakage ? "NonLeakage" : "WeakLeakage";
    j["unmatched_field_selectivity"] = sc.unmatched_field_selectivity;
    j["pa_count"] = sc.pa_count;
    j["group_sizes"] = sc.group_sizes;
    return j.dump(2);
}

}  // namespace passim
