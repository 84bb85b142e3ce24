#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "passim/cmt.hpp"
#include "passim/scenario.hpp"

namespace passim {

using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

/// Wireless matrix H (N x K), in-waveguide matrix G (N x M), effective
/// baseband channel H_eff = H^H G (K x M), and PA-user distances.
struct ChannelSet {
    CMatrix H;
    CMatrix G;
    CMatrix H_eff;
    RMatrix distances;  // R_{n,k}, N x K
};

/// Free-space spherical-wavefront gain h = (lambda0/4pi) e^{j k0 R} / R.
cplx wireless_gain(double pa_x, double pa_height, double user_a, double user_y,
                   double wavelength);

/// g_{n,m} = rho_{n,m} e^{-j beta_m x_n} for one mode column.
Eigen::VectorXcd waveguide_vector(const std::vector<cplx>& rho_column,
                                  double propagation_constant,
                                  const std::vector<double>& positions);

/// Assembles the full channel set for a PA layout. Positions must be
/// ascending, within bounds, and spaced by at least min_spacing.
ChannelSet effective_channel(const ScenarioConfig& sc,
                             const std::vector<double>& positions);

/// Layout feasibility used by effective_channel and the optimizers.
bool layout_feasible(const ScenarioConfig& sc, const std::vector<double>& positions);

}  // namespace passim
