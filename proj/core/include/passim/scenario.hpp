#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace passim {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// Invalid or inconsistent configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested operating point cannot be realized (e.g. unreachable
/// coupling target, impossible PA layout).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

/// Carrier frequency plus derived free-space quantities.
struct CarrierConfig {
    double carrier_frequency = 28e9;  // Hz
    double wavelength = 0.0;          // m, c / f_c
    double wavenumber = 0.0;          // rad/m, 2*pi / wavelength

    static CarrierConfig at(double frequency_hz);
};

/// One guided mode of the multi-mode waveguide. The propagation constant
/// comes from the configured effective index; solving the cross-section
/// eigenproblem is out of scope.
struct GuidedMode {
    int index = 0;
    double effective_refractive_index = 1.0;
    double propagation_constant = 0.0;   // rad/m, n_eff * k0
    double evanescent_decay_rate = 200;  // 1/m, spacing sensitivity alpha
    double peak_coupling_magnitude = 0;  // 1/m, |Omega| at zero spacing
    double matched_field_selectivity = 1.0;  // mu in [0,1]
};

struct WaveguideGeometry {
    double length = 20.0;           // m, L_wg
    double height = 2.5;            // m, h_PA above the user plane
    double coupling_length = 6e-3;  // m, PA coupling length L
    double min_spacing = 0.0;       // m, Delta_min (default lambda0/2)
    std::array<double, 2> position_bounds{0.0, 20.0};  // [x_min, x_max]
};

/// Two-user ground-plane layout. z_k folds lateral offset and waveguide
/// height into the constant cross-axis distance used throughout.
struct UserLayout {
    std::vector<double> along_axis;  // a_k, m
    std::vector<double> lateral;     // y_k, m

    double cross_distance(std::size_t k, double pa_height) const {
        return std::sqrt(lateral.at(k) * lateral.at(k) + pa_height * pa_height);
    }
};

struct PowerAndQoS {
    double max_power = 0.0;    // W (configured in dBm, converted at load)
    double noise_power = 0.0;  // W (configured in dBm)
    double min_rate = 1.0;     // bps/Hz per user
    double min_sinr = 1.0;     // 2^min_rate - 1

    static PowerAndQoS from_dbm(double max_power_dbm, double noise_power_dbm,
                                double min_rate_bpshz);
};

enum class Regime { NonLeakage, WeakLeakage };

/// Complete immutable system description for one scenario realization.
struct ScenarioConfig {
    CarrierConfig carrier;
    std::vector<GuidedMode> modes;  // M = 2 in all experiments
    WaveguideGeometry geometry;
    UserLayout users;
    PowerAndQoS power;
    Regime regime = Regime::NonLeakage;
    double unmatched_field_selectivity = 0.0;  // mu_unmatch in [0,1]
    int pa_count = 2;
    std::vector<int> group_sizes{1, 1};  // |N_1|, |N_2|; sums to pa_count

    int mode_count() const { return static_cast<int>(modes.size()); }
    int user_count() const { return static_cast<int>(users.along_axis.size()); }
    /// Effective unmatched selectivity: forced to 0 in the non-leakage regime.
    double effective_unmatched_mu() const {
        return regime == Regime::NonLeakage ? 0.0 : unmatched_field_selectivity;
    }
    /// Group id (0-based) of PA n under the sequential block layout.
    int group_of(int n) const;

    void validate() const;
};

struct WaveQuantities {
    double wavelength = 0.0;
    double wavenumber = 0.0;
    std::vector<double> propagation_constants;
};

/// lambda0 = c/f_c, k0 = 2*pi/lambda0, beta_m = n_eff,m * k0.
WaveQuantities derive_wave_quantities(double carrier_frequency,
                                      const std::vector<double>& effective_indices);

struct UserSamplingBounds {
    double along_min = 3.0;
    double along_max = 20.0;
    double lateral_min = 3.0;
    double lateral_max = 10.0;
};

/// Deterministic two-user layout for a seed. When order_along is set the
/// users are relabeled so that a_2 >= a_1.
UserLayout sample_user_layout(std::uint64_t seed, const UserSamplingBounds& bounds,
                              bool order_along = false);

/// Baseline configuration used throughout the experiments: 28 GHz carrier,
/// two guided modes (n_eff 1.7036 and 1.0892), 20 m waveguide at 2.5 m
/// height, 6 mm coupling length, 27 dBm power budget, -94 dBm noise,
/// 1 bps/Hz minimum rate.
ScenarioConfig default_scenario();

/// Parses a scenario file (JSON). Unknown keys are rejected. Fields not
/// present keep their defaults from default_scenario().
ScenarioConfig load_scenario_file(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& text);

/// Serializes the fully derived configuration, including every defaulted
/// value, for output metadata.
std::string scenario_to_json(const ScenarioConfig& sc);

}  // namespace passim
