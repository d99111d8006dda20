#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wdsemu/network.hpp"
#include "wdsemu/scenario.hpp"

namespace wdsemu {

struct SolverConfig {
  int max_iterations = 200;
  double head_tolerance = 1e-8;     // max |head update| [m]
  double balance_tolerance = 1e-6;  // max node imbalance [m^3/s]
  double regularization = 1e-10;    // added to |dh| in the Jacobian
};

struct SolveReport {
  int iterations = 0;
  double max_imbalance = 0.0;
  double last_head_update = 0.0;
};

/// Demand-driven steady state by Newton iteration on the unknown consumer
/// heads. Flows are recomputed from heads, so every edge satisfies the head
/// loss law to rounding error; the returned reservoir demands are the
/// (negative) supplies that close the mass balance there.
///
/// Throws DataError for negative or mis-sized demands and NumericError when
/// the iteration does not converge or the Jacobian is singular.
HydraulicState solve_steady_state(const WaterNetwork& net, std::span<const double> demands,
                                  const SolverConfig& cfg = {}, SolveReport* report = nullptr);

struct BatchItem {
  std::optional<HydraulicState> state;
  std::string error;
  double seconds = 0.0;
};

/// Independent solves per demand row; failures are recorded per row.
std::vector<BatchItem> batch_solve(const WaterNetwork& net, const Matrix& demand_series,
                                   const SolverConfig& cfg = {});

/// Solves every time step of every scenario (with its perturbed diameters)
/// and stores heads/flows in the set. Throws on the first failure.
void solve_scenarios(ScenarioSet& set, const SolverConfig& cfg = {});

}  // namespace wdsemu
