#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wdsemu/fixpoint.hpp"
#include "wdsemu/gcn.hpp"
#include "wdsemu/oracle.hpp"
#include "wdsemu/trainer.hpp"

namespace wdsemu {

struct EvalConfig {
  std::size_t iterations = 20;
  double zeta = kDefaultZeta;
  /// Consumers with |d*| at or below this are left out of demand MRAE.
  double demand_floor = 1e-6;
  /// Edges with |q*| at or below this are left out of flow MRAE.
  double flow_floor = 1e-6;
  double outlier_fraction = 0.05;
  std::size_t batch_size = 32;
  bool time_oracle = true;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and population standard deviation; zeros for an empty input.
Summary summarize(std::span<const double> values);

/// Per-sample errors, all relative (fractions, not percent).
struct SampleMetrics {
  double demand_mrae = 0.0;       // d-hat vs d*
  double demand_mrae_phys = 0.0;  // d-tilde vs d*
  double head_mrae = 0.0;         // h-tilde vs oracle heads
  double flow_mrae = 0.0;         // q-tilde vs oracle flows
  std::int64_t conformity = 0;    // sign mismatches of head difference vs flow
  std::int64_t zeta_sign_flips = 0;
};

struct MetricSet {
  std::size_t samples = 0;
  Summary demand_mrae;
  Summary demand_mrae_phys;
  Summary head_mrae;
  Summary flow_mrae;
  std::int64_t conformity = 0;
  std::int64_t zeta_sign_flips = 0;
};

struct EvalReport {
  MetricSet all;
  /// Worst outlier_fraction of samples by demand MRAE removed.
  MetricSet excluding_outliers;
  std::vector<SampleMetrics> per_sample;
  double emulator_seconds_per_sample = 0.0;
  double oracle_seconds_per_sample = 0.0;
};

/// Mean |a - b| / |b| over the listed entries with |b| above the floor.
double mrae(std::span<const double> estimate, std::span<const double> truth, std::span<const std::int32_t> rows,
            double floor);

/// Sum over directed edges of |sgn(h_v - h_u) - sgn(q_e - zeta)|.
std::int64_t conformity(const WaterNetwork& net, std::span<const double> heads, std::span<const double> flows,
                        double zeta);

SampleMetrics sample_metrics(const Sample& sample, const Emulation& out, const EvalConfig& cfg);

/// Runs the emulator with a fixed iteration count on every sample and
/// compares against the stored oracle states. Throws DataError if a sample
/// has no reference solution.
EvalReport evaluate(const ModelParams& params, std::span<const Sample> samples, const EvalConfig& cfg = {});

/// Emulator outputs for many samples, batched into block-diagonal graphs.
std::vector<Emulation> emulate_samples(const ModelParams& params, std::span<const Sample> samples,
                                       std::size_t iterations, double zeta, std::size_t batch_size);

struct BenchRow {
  std::size_t samples = 0;
  double oracle_s = 0.0;
  double emulator_s = 0.0;
};

/// Wall-clock of oracle solves and emulator evaluations over the first n
/// samples (cycling through the pool) for each requested count.
std::vector<BenchRow> benchmark(const ModelParams& params, std::span<const Sample> pool,
                                std::span<const std::size_t> counts, const EvalConfig& cfg = {});

void write_bench_csv(const std::string& path, std::span<const BenchRow> rows);

}  // namespace wdsemu
