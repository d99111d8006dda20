#include "wdsemu/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wdsemu {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

ScenarioSplit split_time_steps(std::size_t steps) {
  const std::size_t train_end = steps * 6 / 10;
  const std::size_t val_end = steps * 8 / 10;
  return {{0, train_end}, {train_end, val_end}, {val_end, steps}};
}

std::size_t ScenarioSet::total_samples() const {
  std::size_t n = 0;
  for (const auto& s : scenarios) n += static_cast<std::size_t>(s.demands.rows());
  return n;
}

WaterNetwork ScenarioSet::network_for(std::size_t k) const {
  return base.with_diameter_multipliers(scenarios.at(k).diameter_multipliers);
}

ScenarioSet generate_scenarios(const WaterNetwork& net, std::size_t n_scenarios, std::size_t days,
                               std::uint64_t seed, const ScenarioOptions& options) {
  if (n_scenarios == 0 || days == 0) throw DataError("generate_scenarios needs at least one scenario and one day");
  const std::size_t steps = days * kSamplesPerDay;
  const std::size_t n = net.num_nodes();
  const double sample_hours = 30.0 / 60.0;

  const bool has_base = options.use_base_demands &&
                        std::any_of(net.nodes().begin(), net.nodes().end(),
                                    [](const Node& node) { return node.base_demand > 0.0; });

  ScenarioSet set{net, {}, 30.0};
  set.scenarios.reserve(n_scenarios);
  for (std::size_t k = 0; k < n_scenarios; ++k) {
    Scenario sc;
    sc.seed = seed ^ static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(splitmix64(sc.seed));
    std::normal_distribution<double> unit(0.0, 1.0);

    sc.diameter_multipliers.resize(net.num_pipes());
    for (auto& m : sc.diameter_multipliers) {
      m = std::max(options.min_diameter_multiplier, 1.0 + options.diameter_noise_std * unit(rng));
    }

    std::vector<double> base(n, 0.0);
    for (NodeIndex v : net.consumers()) {
      const double drawn = std::abs(unit(rng));
      base[static_cast<std::size_t>(v)] = has_base ? net.node(v).base_demand : drawn;
    }

    sc.demands = Matrix::Zero(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < steps; ++t) {
      for (NodeIndex v : net.consumers()) {
        double pattern = 1.0;
        const auto& pid = net.node(v).pattern;
        if (has_base && options.patterns != nullptr && !pid.empty()) {
          const auto it = options.patterns->find(pid);
          if (it != options.patterns->end() && !it->second.empty()) {
            const auto slot = static_cast<std::size_t>(std::floor(static_cast<double>(t) * sample_hours /
                                                                  options.pattern_step_hours));
            pattern = it->second[slot % it->second.size()];
          }
        }
        const double noisy = base[static_cast<std::size_t>(v)] * (pattern + options.demand_noise_std * unit(rng));
        sc.demands(static_cast<Eigen::Index>(t), v) = std::max(0.0, noisy) * options.demand_multiplier;
      }
    }
    set.scenarios.push_back(std::move(sc));
  }
  return set;
}

}  // namespace wdsemu
