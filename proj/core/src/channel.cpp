#include "passim/channel.hpp"

#include <cmath>

namespace passim {

cplx wireless_gain(double pa_x, double pa_height, double user_a, double user_y,
                   double wavelength) {
    const double dx = pa_x - user_a;
    const double r = std::sqrt(dx * dx + user_y * user_y + pa_height * pa_height);
    const double k0 = 2.0 * kPi / wavelength;
    const cplx j{0.0, 1.0};
    return (wavelength / (4.0 * kPi)) * std::exp(j * (k0 * r)) / r;
}

Eigen::VectorXcd waveguide_vector(const std::vector<cplx>& rho_column,
                                  double propagation_constant,
                                  const std::vector<double>& positions) {
    if (rho_column.size() != positions.size()) {
        throw ConfigError("radiation profile and positions size mismatch");
    }
    const cplx j{0.0, 1.0};
    Eigen::VectorXcd g(static_cast<Eigen::Index>(positions.size()));
    for (std::size_t n = 0; n < positions.size(); ++n) {
        g(static_cast<Eigen::Index>(n)) =
            rho_column[n] * std::exp(-j * (propagation_constant * positions[n]));
    }
    return g;
}

bool layout_feasible(const ScenarioConfig& sc, const std::vector<double>& positions) {
    if (static_cast<int>(positions.size()) != sc.pa_count) return false;
    const auto& g = sc.geometry;
    for (std::size_t n = 0; n < positions.size(); ++n) {
        if (positions[n] < g.position_bounds[0] - 1e-12 ||
            positions[n] > g.position_bounds[1] + 1e-12) {
            return false;
        }
        if (n > 0 && positions[n] - positions[n - 1] < g.min_spacing - 1e-12) {
            return false;
        }
    }
    return true;
}

ChannelSet effective_channel(const ScenarioConfig& sc,
                             const std::vector<double>& positions) {
    if (!layout_feasible(sc, positions)) {
        throw InfeasibleError("PA layout violates bounds, ordering, or min spacing");
    }
    const int n_pa = sc.pa_count;
    const int n_mode = sc.mode_count();
    const int n_user = sc.user_count();

    const RadiationProfile rp = radiation_profile(sc);

    ChannelSet cs;
    cs.H.resize(n_pa, n_user);
    cs.distances.resize(n_pa, n_user);
    for (int n = 0; n < n_pa; ++n) {
        for (int k = 0; k < n_user; ++k) {
            const double dx = positions[n] - sc.users.along_axis[k];
            const double y = sc.users.lateral[k];
            cs.distances(n, k) =
                std::sqrt(dx * dx + y * y + sc.geometry.height * sc.geometry.height);
            cs.H(n, k) = wireless_gain(positions[n], sc.geometry.height,
                                       sc.users.along_axis[k], y,
                                       sc.carrier.wavelength);
        }
    }

    cs.G.resize(n_pa, n_mode);
    for (int m = 0; m < n_mode; ++m) {
        std::vector<cplx> rho_col(n_pa);
        for (int n = 0; n < n_pa; ++n) rho_col[n] = rp.rho[n][m];
        cs.G.col(m) = waveguide_vector(rho_col, sc.modes[m].propagation_constant,
                                       positions);
    }

    cs.H_eff = cs.H.adjoint() * cs.G;
    return cs;
}

}  // namespace passim
