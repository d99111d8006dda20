#include "wdsemu/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "wdsemu/error.hpp"

namespace wdsemu {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

std::vector<double> slice(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  return {v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end)};
}

MetricSet aggregate(std::span<const SampleMetrics> rows) {
  MetricSet m;
  m.samples = rows.size();
  std::vector<double> d, dp, h, q;
  for (const auto& r : rows) {
    d.push_back(r.demand_mrae);
    dp.push_back(r.demand_mrae_phys);
    h.push_back(r.head_mrae);
    q.push_back(r.flow_mrae);
    m.conformity += r.conformity;
    m.zeta_sign_flips += r.zeta_sign_flips;
  }
  m.demand_mrae = summarize(d);
  m.demand_mrae_phys = summarize(dp);
  m.head_mrae = summarize(h);
  m.flow_mrae = summarize(q);
  return m;
}

}  // namespace

Summary summarize(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / n)};
}

double mrae(std::span<const double> estimate, std::span<const double> truth, std::span<const std::int32_t> rows,
            double floor) {
  double total = 0.0;
  std::size_t count = 0;
  for (auto r : rows) {
    const auto i = static_cast<std::size_t>(r);
    const double t = std::abs(truth[i]);
    if (t <= floor) continue;
    total += std::abs(estimate[i] - truth[i]) / t;
    ++count;
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

std::int64_t conformity(const WaterNetwork& net, std::span<const double> heads, std::span<const double> flows,
                        double zeta) {
  std::int64_t c = 0;
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    const auto ei = static_cast<EdgeIndex>(e);
    const double dh = heads[static_cast<std::size_t>(net.source(ei))] - heads[static_cast<std::size_t>(net.target(ei))];
    c += std::abs(sgn(dh) - sgn(flows[e] - zeta));
  }
  return c;
}

SampleMetrics sample_metrics(const Sample& sample, const Emulation& out, const EvalConfig& cfg) {
  const WaterNetwork& net = *sample.net;
  if (!sample.has_reference()) {
    throw DataError("evaluate: scenario " + std::to_string(sample.scenario) + " step " + std::to_string(sample.step) +
                    " has no oracle state");
  }
  std::vector<std::int32_t> edges(net.num_edges());
  std::iota(edges.begin(), edges.end(), 0);
  const auto consumers = net.consumers();
  SampleMetrics m;
  m.demand_mrae = mrae(out.demands_gcn, sample.demands, consumers, cfg.demand_floor);
  m.demand_mrae_phys = mrae(out.demands_phys, sample.demands, consumers, cfg.demand_floor);
  m.head_mrae = mrae(out.heads, sample.heads, consumers, 0.0);
  m.flow_mrae = mrae(out.flows_phys, sample.flows, edges, cfg.flow_floor);
  m.conformity = conformity(net, out.heads, out.flows_phys, cfg.zeta);
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    const auto ei = static_cast<EdgeIndex>(e);
    const double dh = out.heads[static_cast<std::size_t>(net.source(ei))] - out.heads[static_cast<std::size_t>(net.target(ei))];
    if (sgn(dh) != sgn(out.flows_phys[e])) ++m.zeta_sign_flips;
  }
  return m;
}

std::vector<Emulation> emulate_samples(const ModelParams& params, std::span<const Sample> samples,
                                       std::size_t iterations, double zeta, std::size_t batch_size) {
  std::vector<Emulation> out;
  out.reserve(samples.size());
  batch_size = std::max<std::size_t>(batch_size, 1);
  for (std::size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const std::size_t end = std::min(samples.size(), begin + batch_size);
    std::vector<const Sample*> ptrs;
    for (std::size_t i = begin; i < end; ++i) ptrs.push_back(&samples[i]);
    const Batch b = make_batch(ptrs);
    const Emulation all = emulate(params, b.net, b.demands, iterations, zeta);
    for (std::size_t k = 0; k < ptrs.size(); ++k) {
      const std::size_t n0 = b.node_offset[k], n1 = b.node_offset[k + 1];
      const std::size_t e0 = b.edge_offset[k], e1 = b.edge_offset[k + 1];
      out.push_back({slice(all.flows_gcn, e0, e1), slice(all.demands_gcn, n0, n1), slice(all.heads, n0, n1),
                     slice(all.flows_phys, e0, e1), slice(all.demands_phys, n0, n1)});
    }
  }
  return out;
}

EvalReport evaluate(const ModelParams& params, std::span<const Sample> samples, const EvalConfig& cfg) {
  EvalReport report;
  for (const auto& s : samples) {
    if (!s.has_reference()) {
      throw DataError("evaluate: scenario " + std::to_string(s.scenario) + " step " + std::to_string(s.step) +
                      " has no oracle state");
    }
  }
  const auto start = Clock::now();
  const auto outputs = emulate_samples(params, samples, cfg.iterations, cfg.zeta, cfg.batch_size);
  if (!samples.empty()) report.emulator_seconds_per_sample = seconds_since(start) / static_cast<double>(samples.size());

  for (std::size_t i = 0; i < samples.size(); ++i) report.per_sample.push_back(sample_metrics(samples[i], outputs[i], cfg));
  report.all = aggregate(report.per_sample);

  std::vector<SampleMetrics> kept = report.per_sample;
  const auto drop = static_cast<std::size_t>(std::floor(cfg.outlier_fraction * static_cast<double>(kept.size())));
  std::stable_sort(kept.begin(), kept.end(),
                   [](const SampleMetrics& a, const SampleMetrics& b) { return a.demand_mrae < b.demand_mrae; });
  kept.resize(kept.size() - drop);
  report.excluding_outliers = aggregate(kept);

  if (cfg.time_oracle && !samples.empty()) {
    const auto t0 = Clock::now();
    for (const auto& s : samples) (void)solve_steady_state(*s.net, s.demands);
    report.oracle_seconds_per_sample = seconds_since(t0) / static_cast<double>(samples.size());
  }
  return report;
}

std::vector<BenchRow> benchmark(const ModelParams& params, std::span<const Sample> pool,
                                std::span<const std::size_t> counts, const EvalConfig& cfg) {
  std::vector<BenchRow> rows;
  for (std::size_t n : counts) {
    if (n == 0) continue;
    if (pool.empty()) throw DataError("benchmark: empty sample pool");
    std::vector<Sample> chosen;
    chosen.reserve(n);
    for (std::size_t i = 0; i < n; ++i) chosen.push_back(pool[i % pool.size()]);
    BenchRow row{n, 0.0, 0.0};
    auto t0 = Clock::now();
    for (const auto& s : chosen) (void)solve_steady_state(*s.net, s.demands);
    row.oracle_s = seconds_since(t0);
    t0 = Clock::now();
    (void)emulate_samples(params, chosen, cfg.iterations, cfg.zeta, cfg.batch_size);
    row.emulator_s = seconds_since(t0);
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(const std::string& path, std::span<const BenchRow> rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write benchmark table to '" + path + "'");
  out.precision(9);
  out << "samples,oracle_s,emulator_s\n";
  for (const auto& r : rows) out << r.samples << ',' << r.oracle_s << ',' << r.emulator_s << '\n';
}

}  // namespace wdsemu
