#include "passim/twopa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "passim/channel.hpp"

namespace passim {

TwoUserGeometry TwoUserGeometry::from_scenario(const ScenarioConfig& sc) {
    if (sc.user_count() != 2) throw ConfigError("two-PA optimizer expects 2 users");
    TwoUserGeometry g;
    const double h = sc.geometry.height;
    double a[2], z[2];
    for (int k = 0; k < 2; ++k) {
        a[k] = sc.users.along_axis[k];
        z[k] = sc.users.cross_distance(k, h);
    }
    const int lo = a[0] <= a[1] ? 0 : 1;
    g.a1 = a[lo];
    g.z1 = z[lo];
    g.a2 = a[1 - lo];
    g.z2 = z[1 - lo];
    if (!(g.a1 < g.a2)) throw ConfigError("users must have distinct along-axis positions");
    return g;
}

double user_distance(double x, const TwoUserGeometry& g, int user) {
    const double a = user == 0 ? g.a1 : g.a2;
    const double z = user == 0 ? g.z1 : g.z2;
    return std::hypot(x - a, z);
}

double product_distance(double x, const TwoUserGeometry& g) {
    return user_distance(x, g, 0) * user_distance(x, g, 1);
}

double product_distance_derivative(double x, const TwoUserGeometry& g) {
    const double r1 = user_distance(x, g, 0);
    const double r2 = user_distance(x, g, 1);
    return r2 * (x - g.a1) / r1 + r1 * (x - g.a2) / r2;
}

std::vector<double> CubicAnalysis::interval_edges(const TwoUserGeometry& g) const {
    std::vector<double> edges;
    edges.push_back(g.a1);
    edges.insert(edges.end(), stationary.begin(), stationary.end());
    edges.push_back(g.a2);
    return edges;
}

CubicAnalysis stationary_points(const TwoUserGeometry& g) {
    if (!(g.a1 < g.a2) || !(g.z1 > 0.0) || !(g.z2 > 0.0)) {
        throw ConfigError("stationary_points requires a1 < a2 and positive z_k");
    }
    const double d = g.a2 - g.a1;
    const double z1sq = g.z1 * g.z1;
    const double z2sq = g.z2 * g.z2;

    CubicAnalysis ca;
    ca.p = (-d * d + 2.0 * (z1sq + z2sq)) / 4.0;
    ca.q = d * (z2sq - z1sq) / 4.0;
    ca.discriminant =
        (ca.q / 2.0) * (ca.q / 2.0) + (ca.p / 3.0) * (ca.p / 3.0) * (ca.p / 3.0);

    const double mid = g.a1 + d / 2.0;
    std::vector<double> roots;
    if (ca.discriminant >= 0.0) {
        const double s = std::sqrt(ca.discriminant);
        roots.push_back(mid + std::cbrt(-ca.q / 2.0 + s) + std::cbrt(-ca.q / 2.0 - s));
    } else {
        // p < 0 guaranteed here.
        const double r = 2.0 * std::sqrt(-ca.p / 3.0);
        const double arg =
            std::clamp(1.5 * ca.q / ca.p * std::sqrt(-3.0 / ca.p), -1.0, 1.0);
        const double phi = std::acos(arg);
        for (int s = 0; s < 3; ++s) {
            roots.push_back(mid + r * std::cos((phi - 2.0 * kPi * s) / 3.0));
        }
    }
    for (double t : roots) {
        if (t > g.a1 && t < g.a2) ca.stationary.push_back(t);
    }
    std::sort(ca.stationary.begin(), ca.stationary.end());
    return ca;
}

std::optional<double> match_partner(double x1, double lo, double hi,
                                    const TwoUserGeometry& g, double tol) {
    if (!(tol > 0.0)) throw ConfigError("bisection tolerance must be positive");
    const double target = product_distance(x1, g);
    double f_lo = product_distance(lo, g) - target;
    double f_hi = product_distance(hi, g) - target;
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (f_lo * f_hi > 0.0) return std::nullopt;  // target outside interval range

    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double f_mid = product_distance(mid, g) - target;
        if (std::abs(f_mid) <= tol * target || 0.5 * (b - a) < 1e-15 * std::abs(mid)) {
            return mid;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            a = mid;
            f_lo = f_mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

double phase_difference(double x1, double x2, const TwoUserGeometry& g) {
    return (user_distance(x2, g, 0) - user_distance(x1, g, 0)) -
           (user_distance(x2, g, 1) - user_distance(x1, g, 1));
}

long nearest_halfwave_integer(double x1, double x2, double wavelength,
                              const TwoUserGeometry& g) {
    const double phi = phase_difference(x1, x2, g);
    return std::lround(std::round(phi / wavelength - 0.5));
}

CandidatePair newton_refine(double x1_start, double x2_start, long halfwave_index,
                            double wavelength, const TwoUserGeometry& g,
                            double tol, int max_iters, double neighborhood) {
    if (neighborhood < 0.0) neighborhood = 2.0 * wavelength;
    const double target_phase =
        (static_cast<double>(halfwave_index) + 0.5) * wavelength;

    CandidatePair cand;
    cand.halfwave_index = halfwave_index;

    double x1 = x1_start, x2 = x2_start;
    auto residual = [&](double r[2]) {
        r[0] = product_distance(x1, g) - product_distance(x2, g);
        r[1] = phase_difference(x1, x2, g) - target_phase;
        return std::hypot(r[0], r[1]);
    };

    double f[2];
    double norm = residual(f);
    for (int it = 0; it < max_iters && norm > tol; ++it) {
        const double r1a = user_distance(x1, g, 0), r2a = user_distance(x1, g, 1);
        const double r1b = user_distance(x2, g, 0), r2b = user_distance(x2, g, 1);
        const double j11 = product_distance_derivative(x1, g);
        const double j12 = -product_distance_derivative(x2, g);
        const double j21 = -(x1 - g.a1) / r1a + (x1 - g.a2) / r2a;
        const double j22 = (x2 - g.a1) / r1b - (x2 - g.a2) / r2b;

        const double det = j11 * j22 - j12 * j21;
        const double det_scale = std::abs(j11 * j22) + std::abs(j12 * j21);
        if (std::abs(det) < 1e-14 * std::max(det_scale, 1e-300)) {
            cand.x1 = x1;
            cand.x2 = x2;
            cand.residual_norm = norm;
            cand.converged = false;
            return cand;
        }
        x1 -= (j22 * f[0] - j12 * f[1]) / det;
        x2 -= (-j21 * f[0] + j11 * f[1]) / det;
        norm = residual(f);
    }

    cand.x1 = x1;
    cand.x2 = x2;
    cand.residual_norm = norm;
    cand.converged = norm <= tol &&
                     std::abs(x1 - x1_start) <= neighborhood &&
                     std::abs(x2 - x2_start) <= neighborhood;
    return cand;
}

ReducedObjective reduced_objective(double x1, double x2, const TwoUserGeometry& g,
                                   double max_power, double noise_power,
                                   double wavelength, double min_sinr) {
    const double path_const = wavelength * wavelength / (16.0 * kPi * kPi);
    std::vector<double> gains(2);
    for (int k = 0; k < 2; ++k) {
        const double ra = user_distance(x1, g, k);
        const double rb = user_distance(x2, g, k);
        gains[k] = path_const * (1.0 / (ra * ra) + 1.0 / (rb * rb));
    }
    auto [power, level] = waterfill(gains, max_power, noise_power);
    (void)level;

    ReducedObjective out;
    out.power = power;
    out.sinr_feasible = true;
    for (int k = 0; k < 2; ++k) {
        const double sinr = power[k] * gains[k] / noise_power;
        out.sinr.push_back(sinr);
        out.value += std::log2(1.0 + sinr);
        if (sinr < min_sinr) out.sinr_feasible = false;
    }
    return out;
}

TwoPAResult optimize_two_pa(const ScenarioConfig& sc, int grid_size, double tol,
                            double neighborhood) {
    const TwoUserGeometry g = TwoUserGeometry::from_scenario(sc);
    const double lambda0 = sc.carrier.wavelength;
    if (neighborhood < 0.0) neighborhood = 2.0 * lambda0;

    const CubicAnalysis ca = stationary_points(g);
    const auto edges = ca.interval_edges(g);
    const int s_count = static_cast<int>(ca.stationary.size());

    TwoPAResult best;
    best.objective = -std::numeric_limits<double>::infinity();

    // Coarse x1 grid spans the pre-stationary intervals [a1, tau_S]: a
    // partner with x2 > x1 can only live in a strictly later interval.
    const double grid_lo = g.a1;
    const double grid_hi = edges[s_count];  // tau_S
    if (!(grid_hi > grid_lo) || grid_size < 2) return best;

    for (int i = 0; i < grid_size; ++i) {
        const double x1 = grid_lo + (grid_hi - grid_lo) * (i + 0.5) / grid_size;
        // Interval index of x1.
        int s = 0;
        while (s + 1 < static_cast<int>(edges.size()) - 1 && x1 > edges[s + 1]) ++s;

        for (int sp = s + 1; sp <= s_count; ++sp) {
            const auto x2 = match_partner(x1, edges[sp], edges[sp + 1], g, tol);
            if (!x2) continue;
            if (*x2 - x1 < sc.geometry.min_spacing) continue;
            ++best.candidates_examined;

            const long n = nearest_halfwave_integer(x1, *x2, lambda0, g);
            CandidatePair cand =
                newton_refine(x1, *x2, n, lambda0, g, tol, 40, neighborhood);
            if (!cand.converged) continue;
            if (cand.x2 - cand.x1 < sc.geometry.min_spacing) continue;
            if (cand.x1 < std::max(g.a1, sc.geometry.position_bounds[0]) ||
                cand.x2 > std::min(g.a2, sc.geometry.position_bounds[1])) {
                continue;
            }

            const ReducedObjective obj = reduced_objective(
                cand.x1, cand.x2, g, sc.power.max_power, sc.power.noise_power,
                lambda0, sc.power.min_sinr);
            if (!obj.sinr_feasible) continue;
            ++best.candidates_accepted;

            if (obj.value > best.objective ||
                (obj.value == best.objective && cand.x1 < best.x1)) {
                best.feasible = true;
                best.x1 = cand.x1;
                best.x2 = cand.x2;
                best.objective = obj.value;
                best.halfwave_index = cand.halfwave_index;
                best.residual_norm = cand.residual_norm;
            }
        }
    }

    if (best.feasible) {
        // Full-pipeline beamformer and rates at the selected positions.
        ScenarioConfig two = sc;
        two.pa_count = 2;
        two.group_sizes = {1, 1};
        const ChannelSet cs = effective_channel(two, {best.x1, best.x2});
        best.beamformer =
            mrt_waterfilling(cs.H_eff, sc.power.max_power, sc.power.noise_power);
        best.report = rate_report(cs.H_eff, best.beamformer.W, sc.power.noise_power,
                                  sc.power.min_sinr);
    } else {
        best.objective = 0.0;
    }
    return best;
}

}  // namespace passim
