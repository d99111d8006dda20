#pragma once

#include <span>
#include <vector>

#include "wdsemu/network.hpp"

namespace wdsemu {

/// Hazen-Williams flow exponent.
inline constexpr double kFlowExponent = 1.852;

/// r = 10.667 * l * d^-4.871 * c^-1.852 (SI: metres, flows in m^3/s).
/// Throws std::domain_error naming the first non-positive argument.
double resistance_coefficient(double length, double diameter, double roughness);

/// r * sgn(q) * |q|^1.852
double headloss(double resistance, double flow);

/// sgn(dh) * (|dh| / r)^(1/1.852), the inverse of headloss in q.
double flow_from_headloss(double resistance, double head_difference);

/// Per node v: sum over e_vu of q_e plus d_v. Zero wherever mass balance holds.
std::vector<double> node_imbalance(const WaterNetwork& net, const HydraulicState& state);

/// Max over directed edges of |h_v - h_u - headloss(r_e, q_e)|.
double max_headloss_residual(const WaterNetwork& net, const HydraulicState& state);

/// Pressure p = h - elevation, for display.
std::vector<double> pressures(const WaterNetwork& net, std::span<const double> heads);

}  // namespace wdsemu
