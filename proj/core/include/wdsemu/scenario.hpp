#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "wdsemu/inp.hpp"
#include "wdsemu/network.hpp"

namespace wdsemu {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Scenario {
  std::uint64_t seed = 0;
  Matrix demands;  // time x nodes [m^3/s], zero at reservoirs
  std::vector<double> diameter_multipliers;  // one per physical pipe
  // Reference solution, empty until solved: time x nodes and time x edges.
  Matrix heads;
  Matrix flows;

  bool solved() const { return heads.rows() == demands.rows() && heads.rows() > 0; }
};

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// 60/20/20 split of one scenario's time steps, in time order.
struct ScenarioSplit {
  IndexRange train;
  IndexRange val;
  IndexRange test;
};

ScenarioSplit split_time_steps(std::size_t steps);

struct ScenarioOptions {
  double demand_noise_std = 0.1;
  double diameter_noise_std = 1.0 / 30.0;
  double min_diameter_multiplier = 0.5;
  double demand_multiplier = 1.0;
  /// Use the network's base demands and patterns when any base demand is set;
  /// otherwise each scenario draws base demands from |N(0,1)|.
  bool use_base_demands = true;
  const PatternTable* patterns = nullptr;
  double pattern_step_hours = 1.0;
};

struct ScenarioSet {
  WaterNetwork base;
  std::vector<Scenario> scenarios;
  double sampling_minutes = 30.0;

  std::size_t steps_per_scenario() const {
    return scenarios.empty() ? 0 : static_cast<std::size_t>(scenarios.front().demands.rows());
  }
  std::size_t total_samples() const;
  /// Base network with scenario k's diameter multipliers applied.
  WaterNetwork network_for(std::size_t k) const;
};

inline constexpr std::size_t kSamplesPerDay = 48;

/// Seeded synthetic scenarios: diameter noise (1 + N(0, sigma_d)) clamped at
/// 0.5, base demand times (pattern + N(0, sigma_q)) rectified at zero, 48
/// samples per day. Scenario k uses seed ^ k.
ScenarioSet generate_scenarios(const WaterNetwork& net, std::size_t n_scenarios, std::size_t days,
                               std::uint64_t seed, const ScenarioOptions& options = {});

}  // namespace wdsemu
