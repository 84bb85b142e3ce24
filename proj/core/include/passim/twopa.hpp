#pragma once

#include <optional>
#include <vector>

#include "passim/beamforming.hpp"
#include "passim/scenario.hpp"

namespace passim {

/// Two-user geometry on the waveguide axis, users ordered by along-axis
/// coordinate (a_1 < a_2). z_k is the constant cross-axis distance.
struct TwoUserGeometry {
    double a1 = 0.0;
    double a2 = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;

    static TwoUserGeometry from_scenario(const ScenarioConfig& sc);
};

/// Product distance D(x) = R_1(x) R_2(x) with R_k(x) = sqrt((x-a_k)^2 + z_k^2).
double product_distance(double x, const TwoUserGeometry& g);
double product_distance_derivative(double x, const TwoUserGeometry& g);
double user_distance(double x, const TwoUserGeometry& g, int user);

/// Stationary structure of D(x) on (a_1, a_2): depressed-cubic
/// coefficients, discriminant, and the sorted interior stationary points.
struct CubicAnalysis {
    double p = 0.0;             // m^2
    double q = 0.0;             // m^3
    double discriminant = 0.0;  // m^6
    std::vector<double> stationary;  // tau_1..tau_S, sorted, inside (a1, a2)

    /// Interval edges tau_0 = a1, ..., tau_{S+1} = a2.
    std::vector<double> interval_edges(const TwoUserGeometry& g) const;
};

/// Closed-form roots of D'(x) = 0 via Cardano (one real root) or the
/// trigonometric form (three real roots), shifted back to [a1, a2].
CubicAnalysis stationary_points(const TwoUserGeometry& g);

/// Solves D(x2) = D(x1) on [lo, hi] (one monotone interval) by bisection.
/// Returns nothing when D(x1) is outside the interval's range.
std::optional<double> match_partner(double x1, double lo, double hi,
                                    const TwoUserGeometry& g, double tol = 1e-9);

/// Differential phase difference phi(x1, x2) =
/// [R_1(x2) - R_1(x1)] - [R_2(x2) - R_2(x1)].
double phase_difference(double x1, double x2, const TwoUserGeometry& g);

/// Half-wave index closest to the coarse phase estimate,
/// n = round(phi/lambda0 - 1/2), ties rounded half away from zero.
long nearest_halfwave_integer(double x1, double x2, double wavelength,
                              const TwoUserGeometry& g);

struct CandidatePair {
    double x1 = 0.0;
    double x2 = 0.0;
    long halfwave_index = 0;
    double residual_norm = 0.0;
    double objective = 0.0;  // bps/Hz, filled by the caller
    bool converged = false;
};

/// Two-variable Newton iteration on (D(x1)-D(x2), phi - (n+1/2)lambda0).
/// Rejects (converged = false) on a singular Jacobian, non-convergence, or
/// escape from the delta-neighborhood of the start.
CandidatePair newton_refine(double x1_start, double x2_start, long halfwave_index,
                            double wavelength, const TwoUserGeometry& g,
                            double tol = 1e-9, int max_iters = 40,
                            double neighborhood = -1.0);

struct ReducedObjective {
    double value = 0.0;  // bps/Hz
    std::vector<double> power;
    std::vector<double> sinr;
    bool sinr_feasible = false;
};

/// Closed-form sum rate of an orthogonal candidate: water-filled powers
/// over per-user gains (lambda0^2/16pi^2)(1/R_k^2(x1) + 1/R_k^2(x2)).
ReducedObjective reduced_objective(double x1, double x2, const TwoUserGeometry& g,
                                   double max_power, double noise_power,
                                   double wavelength, double min_sinr);

struct TwoPAResult {
    bool feasible = false;
    double x1 = 0.0;
    double x2 = 0.0;
    double objective = 0.0;
    long halfwave_index = 0;
    double residual_norm = 0.0;
    Beamformer beamformer;
    RateReport report;
    int candidates_examined = 0;
    int candidates_accepted = 0;
};

/// Coarse sampling over the pre-stationary intervals, bisection partner
/// search in later intervals, Newton refinement, feasibility filtering,
/// and argmax selection. Ties break toward smaller x1.
TwoPAResult optimize_two_pa(const ScenarioConfig& sc, int grid_size = 1000,
                            double tol = 1e-9, double neighborhood = -1.0);

}  // namespace passim
