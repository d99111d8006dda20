#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "wdsemu/fixpoint.hpp"
#include "wdsemu/gcn.hpp"
#include "wdsemu/inp.hpp"
#include "wdsemu/oracle.hpp"
#include "wdsemu/trainer.hpp"

namespace {

using namespace wdsemu;

const ParsedInp& hanoi() {
  static const ParsedInp parsed = load_inp(WDSEMU_DATA_DIR "/hanoi.inp");
  return parsed;
}

std::vector<double> demands(const WaterNetwork& net, double scale) {
  std::vector<double> d(net.num_nodes(), 0.0);
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    if (!net.is_reservoir(NodeIndex(v))) d[v] = net.node(NodeIndex(v)).base_demand * scale;
  }
  return d;
}

void BM_OracleSolve(benchmark::State& state) {
  const auto& net = hanoi().network;
  const auto d = demands(net, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_steady_state(net, d));
}
BENCHMARK(BM_OracleSolve)->Unit(benchmark::kMicrosecond);

void BM_FixpointApply(benchmark::State& state) {
  const auto& net = hanoi().network;
  const auto flows = solve_steady_state(net, demands(net, 1.0)).flows;
  for (auto _ : state) benchmark::DoNotOptimize(fixpoint_apply(net, flows));
}
BENCHMARK(BM_FixpointApply)->Unit(benchmark::kMicrosecond);

void BM_Emulate(benchmark::State& state) {
  const auto& net = hanoi().network;
  const auto params = init_params(5, std::size_t(state.range(0)), 0);
  const auto d = demands(net, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(emulate(params, net, d, 20));
}
BENCHMARK(BM_Emulate)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
