#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wdsemu/autodiff.hpp"
#include "wdsemu/network.hpp"

namespace wdsemu {

inline constexpr double kDefaultZeta = 1e-8;

/// w_e = ReLU(-r_e sgn(q_e) |q_e|^x): the head drop implied by an inflow on
/// e_vu, zero for outflows.
double inflow_drop(double resistance, double flow);

/// c = min reservoir head - N_n * max_e w_e. Throws DataError without
/// reservoirs or on a flow vector of the wrong length.
double floor_constant(const WaterNetwork& net, std::span<const double> flows);

struct FixpointInput {
  std::vector<double> initial_heads;  // reservoirs at h*, others normally at c
  std::vector<double> flows;          // q-hat per directed edge
  double zeta = kDefaultZeta;
};

/// Reservoirs at their fixed heads, every other node at floor_constant.
FixpointInput make_fixpoint_input(const WaterNetwork& net, std::span<const double> flows,
                                  double zeta = kDefaultZeta);

struct FixpointTrace {
  /// Number of sweeps that changed some head; heads after that many sweeps
  /// are a fixed point of the update.
  std::size_t iterations = 0;
  bool converged = false;
  /// Heads after sweep 0..iterations, when requested.
  std::vector<std::vector<double>> snapshots;
};

struct Propagation {
  std::vector<double> heads;
  FixpointTrace trace;
  /// Edge e_vu whose message last raised node v, or -1 if v never moved.
  std::vector<EdgeIndex> parent_edge;
  /// Sweep (1-based) of that last raise, 0 if never.
  std::vector<std::size_t> raised_at;
};

/// Jacobi sweeps of h_v <- max(h_v, max_u h_u - w_{e_vu}) with reservoirs
/// pinned, until a sweep changes nothing. Equality is exact because every
/// value is a max of previously computed numbers.
///
/// Throws DataError if reservoir entries differ from h*, and
/// std::logic_error if more than N_n sweeps keep changing heads.
Propagation propagate_heads(const WaterNetwork& net, const FixpointInput& input, bool record_snapshots = false);

/// Same sweep on precomputed drops w_e.
Propagation propagate_heads_with_drops(const WaterNetwork& net, std::span<const double> initial_heads,
                                       std::span<const double> drops, bool record_snapshots = false);

struct Reconstruction {
  std::vector<double> flows;    // q-tilde per directed edge
  std::vector<double> demands;  // d-tilde per node
};

/// q~_e = sgn(h_v - h_u) (|h_v - h_u| / r_e)^(1/x) + zeta and d~_v = -sum q~_{e_vu}.
Reconstruction reconstruct_flows_demands(const WaterNetwork& net, std::span<const double> heads,
                                         double zeta = kDefaultZeta);

struct FixpointOutput {
  std::vector<double> heads;
  std::vector<double> demands;
  std::vector<double> flows;
  FixpointTrace trace;
};

/// Physics layer: flows q-hat to consistent heads, flows and demands.
FixpointOutput fixpoint_apply(const WaterNetwork& net, std::span<const double> flows, double zeta = kDefaultZeta);

/// Tape variant for training. Gradients flow from the heads through the
/// drops along the chain of edges that produced each final head; the floor
/// constant is treated as a constant.
struct FixpointVars {
  ad::Var heads;    // N_n x 1
  ad::Var flows;    // N_e x 1
  ad::Var demands;  // N_n x 1
  std::size_t iterations = 0;
};

FixpointVars fixpoint_apply(ad::Tape& tape, const WaterNetwork& net, ad::Var flows, double zeta = kDefaultZeta);

}  // namespace wdsemu
