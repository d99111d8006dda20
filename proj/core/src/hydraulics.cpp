#include "wdsemu/hydraulics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wdsemu {

namespace {

double sign(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

void require_positive(double value, const char* field) {
  if (!(value > 0.0)) {
    throw std::domain_error(std::string("resistance_coefficient: ") + field +
                            " must be positive, got " + std::to_string(value));
  }
}

void check_dims(const WaterNetwork& net, const HydraulicState& state) {
  if (state.heads.size() != net.num_nodes() || state.demands.size() != net.num_nodes() ||
      state.flows.size() != net.num_edges()) {
    throw DataError("hydraulic state dimensions do not match the network");
  }
}

}  // namespace

double resistance_coefficient(double length, double diameter, double roughness) {
  require_positive(length, "length");
  require_positive(diameter, "diameter");
  require_positive(roughness, "roughness");
  return 10.667 * length * std::pow(diameter, -4.871) * std::pow(roughness, -kFlowExponent);
}

double headloss(double resistance, double flow) {
  return resistance * sign(flow) * std::pow(std::abs(flow), kFlowExponent);
}

double flow_from_headloss(double resistance, double head_difference) {
  // Multiplying by the reciprocal keeps this bit-identical to the taped path.
  const double inv_r = 1.0 / resistance;
  return sign(head_difference) * std::pow(std::abs(head_difference) * inv_r, 1.0 / kFlowExponent);
}

std::vector<double> node_imbalance(const WaterNetwork& net, const HydraulicState& state) {
  if (state.demands.size() != net.num_nodes() || state.flows.size() != net.num_edges()) {
    throw DataError("node_imbalance: state dimensions do not match the network");
  }
  std::vector<double> out(net.num_nodes());
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    double sum = state.demands[v];
    for (EdgeIndex e : net.out_edges(static_cast<NodeIndex>(v))) sum += state.flows[static_cast<std::size_t>(e)];
    out[v] = sum;
  }
  return out;
}

double max_headloss_residual(const WaterNetwork& net, const HydraulicState& state) {
  check_dims(net, state);
  double worst = 0.0;
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    const auto ei = static_cast<EdgeIndex>(e);
    const double dh = state.heads[static_cast<std::size_t>(net.source(ei))] -
                      state.heads[static_cast<std::size_t>(net.target(ei))];
    worst = std::max(worst, std::abs(dh - headloss(net.resistance(ei), state.flows[e])));
  }
  return worst;
}

std::vector<double> pressures(const WaterNetwork& net, std::span<const double> heads) {
  std::vector<double> out(heads.size());
  for (std::size_t v = 0; v < heads.size(); ++v) out[v] = heads[v] - net.nodes()[v].elevation;
  return out;
}

}  // namespace wdsemu
