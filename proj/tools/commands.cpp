#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "csv.hpp"
#include "json.hpp"
#include "wdsemu/container.hpp"
#include "wdsemu/error.hpp"
#include "wdsemu/fixpoint.hpp"
#include "wdsemu/hydraulics.hpp"
#include "wdsemu/inp.hpp"
#include "wdsemu/oracle.hpp"
#include "wdsemu/scenario.hpp"

namespace wdsemu::cli {

namespace {

using nlohmann::json;

std::string default_edges_path(const std::string& node_path) {
  const auto dot = node_path.rfind('.');
  const auto slash = node_path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return node_path + "_edges.csv";
  return node_path.substr(0, dot) + "_edges" + node_path.substr(dot);
}

void emit_json(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

std::vector<double> base_demands(const WaterNetwork& net, double multiplier) {
  std::vector<double> d(net.num_nodes(), 0.0);
  for (NodeIndex v : net.consumers()) d[static_cast<std::size_t>(v)] = net.node(v).base_demand * multiplier;
  return d;
}

ScenarioSet scenarios_for(const Options& o, const ParsedInp& parsed, std::size_t default_count, std::uint64_t seed,
                          bool solve) {
  if (!o.dataset.empty()) {
    ScenarioSet set = load_dataset(o.dataset, parsed.network);
    if (solve) {
      for (const auto& sc : set.scenarios) {
        if (!sc.solved()) throw DataError("dataset '" + o.dataset + "' has unsolved scenarios; rerun gen without --no-solve");
      }
    }
    return set;
  }
  ScenarioOptions opt;
  opt.demand_noise_std = o.demand_noise;
  opt.diameter_noise_std = o.diameter_noise;
  opt.demand_multiplier = o.demand_multiplier;
  opt.patterns = &parsed.patterns;
  opt.pattern_step_hours = parsed.pattern_step_hours;
  ScenarioSet set = generate_scenarios(parsed.network, o.scenarios ? o.scenarios : default_count, o.days, seed, opt);
  if (solve) solve_scenarios(set);
  return set;
}

SplitPart split_part(const std::string& name) {
  if (name == "train") return SplitPart::train;
  if (name == "val") return SplitPart::val;
  if (name == "test") return SplitPart::test;
  if (name == "all") return SplitPart::all;
  throw std::invalid_argument("--split must be one of train, val, test, all");
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

json metric_set_json(const MetricSet& m) {
  return {{"samples", m.samples},
          {"demand_mrae", summary_json(m.demand_mrae)},
          {"demand_mrae_physics", summary_json(m.demand_mrae_phys)},
          {"head_mrae", summary_json(m.head_mrae)},
          {"flow_mrae", summary_json(m.flow_mrae)},
          {"conformity", m.conformity},
          {"zeta_sign_flips", m.zeta_sign_flips}};
}

// The same scenario seed must not be reused between training and evaluation.
constexpr std::uint64_t kEvalSeedOffset = 0x5eed0000ULL;

}  // namespace

int run_parse(const Options& o) {
  const ParsedInp parsed = load_inp(o.inp);
  const WaterNetwork& net = parsed.network;
  json j;
  j["nodes"] = net.num_nodes();
  j["pipes"] = net.num_pipes();
  j["directed_edges"] = net.num_edges();
  j["reservoirs"] = net.reservoirs().size();
  j["consumers"] = net.consumers().size();
  j["diameter"] = graph_diameter(net);
  j["flow_units"] = parsed.flow_units;
  double total = 0.0;
  for (const auto& n : net.nodes()) total += n.base_demand;
  j["total_base_demand_m3s"] = total;
  j["patterns"] = json::array();
  for (const auto& [id, values] : parsed.patterns) j["patterns"].push_back({{"id", id}, {"length", values.size()}});
  j["unknown_sections"] = parsed.document.unknown_sections();
  j["warnings"] = std::vector<std::string>(net.warnings().begin(), net.warnings().end());
  j["hash"] = to_hex(network_hash(net));
  emit_json(j, o.out);
  return 0;
}

int run_solve(const Options& o) {
  const ParsedInp parsed = load_inp(o.inp);
  const WaterNetwork& net = parsed.network;
  std::vector<double> demands = base_demands(net, 1.0);
  if (!o.demands_csv.empty()) demands = read_demands(o.demands_csv, net, demands);
  for (auto& d : demands) d *= o.demand_multiplier;
  SolveReport report;
  const HydraulicState st = solve_steady_state(net, demands, {}, &report);
  write_node_csv(o.out, net, st.heads, st.demands);
  const std::string edges = o.edges_out.empty() ? default_edges_path(o.out) : o.edges_out;
  write_edge_csv(edges, net, st.flows);
  const auto imbalance = node_imbalance(net, st);
  double max_imb = 0.0;
  for (double x : imbalance) max_imb = std::max(max_imb, std::abs(x));
  std::printf("iterations=%d max_node_imbalance=%.3e max_headloss_residual=%.3e\n", report.iterations, max_imb,
              max_headloss_residual(net, st));
  return 0;
}

int run_gen(const Options& o) {
  const ParsedInp parsed = load_inp(o.inp);
  Options gen = o;
  gen.dataset.clear();
  ScenarioSet set = scenarios_for(gen, parsed, 5, o.seed, !o.no_solve);
  save_dataset(o.out, set);
  std::printf("scenarios=%zu samples=%zu solved=%s hash=%s\n", set.scenarios.size(), set.total_samples(),
              o.no_solve ? "no" : "yes", to_hex(network_hash(parsed.network)).c_str());
  return 0;
}

static Checkpoint train_checkpoint(const ModelParams& params, const TrainConfig& cfg, std::size_t epochs_done,
                                   std::uint64_t data_seed) {
  Checkpoint ck = to_checkpoint(params);
  ck.hyperparameters["epochs"] = static_cast<double>(epochs_done);
  ck.hyperparameters["rho"] = cfg.rho;
  ck.hyperparameters["delta"] = cfg.delta;
  ck.hyperparameters["k_min"] = static_cast<double>(cfg.k_min);
  ck.hyperparameters["k_max"] = static_cast<double>(cfg.k_max);
  ck.hyperparameters["lr"] = cfg.lr;
  ck.hyperparameters["batch_size"] = static_cast<double>(cfg.batch_size);
  ck.hyperparameters["seed"] = static_cast<double>(cfg.seed);
  ck.hyperparameters["train_seed"] = static_cast<double>(data_seed);
  return ck;
}

int run_train(const Options& o) {
  o.train.validate();
  const ParsedInp parsed = load_inp(o.inp);
  const ScenarioSet set = scenarios_for(o, parsed, 5, o.seed, false);
  const std::vector<Sample> samples = make_samples(set, SplitPart::train);
  ModelParams params = init_params(o.train.layers, o.train.latent, o.train.seed);
  std::fprintf(stderr, "training on %zu samples, %zu parameters\n", samples.size(), params.parameter_count());
  const auto start = std::chrono::steady_clock::now();
  const auto history = train(params, samples, o.train, [&](const EpochRecord& r, const ModelParams& p) {
    if (o.log_every && (r.epoch % o.log_every == 0 || r.epoch + 1 == o.train.epochs)) {
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::fprintf(stderr, "epoch %zu loss %.6e lr %.3e K %zu (%.0f s)\n", r.epoch, r.loss, r.lr, r.k, s);
    }
    if (o.checkpoint_every && (r.epoch + 1) % o.checkpoint_every == 0) {
      save_checkpoint(o.out, train_checkpoint(p, o.train, r.epoch + 1, o.seed));
    }
  });
  save_checkpoint(o.out, train_checkpoint(params, o.train, o.train.epochs, o.seed));
  if (!o.loss_curve.empty()) write_loss_curve(o.loss_curve, history);
  std::printf("final_loss=%.9e checkpoint=%s\n", history.empty() ? 0.0 : history.back().loss, o.out.c_str());
  return 0;
}

int run_eval(const Options& o) {
  const ParsedInp parsed = load_inp(o.inp);
  const ModelParams params = from_checkpoint(load_checkpoint(o.model));
  EvalConfig cfg;
  cfg.iterations = o.train.eval_iterations;
  cfg.zeta = o.train.zeta;
  cfg.batch_size = o.eval_batch;
  const SplitPart part = split_part(o.split);
  const ScenarioSet set = scenarios_for(o, parsed, 3, o.seed + kEvalSeedOffset, true);
  const std::vector<Sample> samples = make_samples(set, part);
  const EvalReport report = evaluate(params, samples, cfg);
  json j;
  j["all"] = metric_set_json(report.all);
  j["excluding_outliers"] = metric_set_json(report.excluding_outliers);
  j["emulator_seconds_per_sample"] = report.emulator_seconds_per_sample;
  j["oracle_seconds_per_sample"] = report.oracle_seconds_per_sample;
  emit_json(j, o.out);

  if (!o.sigma_sweep.empty()) {
    if (o.sweep_out.empty()) throw std::invalid_argument("--sigma-sweep needs --sweep-out");
    std::ofstream out(o.sweep_out);
    if (!out) throw DataError("cannot write '" + o.sweep_out + "'");
    out.precision(9);
    out << "sigma,demand_mrae_mean,demand_mrae_std,head_mrae_mean\n";
    for (double sigma : o.sigma_sweep) {
      Options noisy = o;
      noisy.dataset.clear();
      noisy.diameter_noise = sigma;
      const ScenarioSet s = scenarios_for(noisy, parsed, 3, o.seed + kEvalSeedOffset, true);
      const auto rows = make_samples(s, part);
      EvalConfig c = cfg;
      c.time_oracle = false;
      const EvalReport r = evaluate(params, rows, c);
      out << sigma << ',' << r.all.demand_mrae.mean << ',' << r.all.demand_mrae.std << ',' << r.all.head_mrae.mean
          << '\n';
    }
  }
  return 0;
}

int run_bench(const Options& o) {
  const ParsedInp parsed = load_inp(o.inp);
  const ModelParams params = from_checkpoint(load_checkpoint(o.model));
  const ScenarioSet set = scenarios_for(o, parsed, 3, o.seed + kEvalSeedOffset, false);
  const std::vector<Sample> pool = make_samples(set, SplitPart::all);
  EvalConfig cfg;
  cfg.iterations = o.train.eval_iterations;
  cfg.zeta = o.train.zeta;
  cfg.batch_size = o.eval_batch;
  const auto rows = benchmark(params, pool, o.counts, cfg);
  write_bench_csv(o.out, rows);
  for (const auto& r : rows) std::printf("samples=%zu oracle_s=%.4f emulator_s=%.4f\n", r.samples, r.oracle_s, r.emulator_s);
  return 0;
}

int run_fixpoint(const Options& o) {
  const ParsedInp parsed = load_inp(o.inp);
  const WaterNetwork& net = parsed.network;
  std::vector<double> flows;
  if (o.flows_csv.empty()) {
    flows = solve_steady_state(net, base_demands(net, o.demand_multiplier)).flows;
  } else {
    flows = read_edge_flows(o.flows_csv, net);
  }
  const FixpointOutput fx = fixpoint_apply(net, flows, o.train.zeta);
  write_node_csv(o.out, net, fx.heads, fx.demands);
  const std::string edges = o.edges_out.empty() ? default_edges_path(o.out) : o.edges_out;
  write_edge_csv(edges, net, fx.flows);
  std::printf("iterations=%zu converged=%s\n", fx.trace.iterations, fx.trace.converged ? "yes" : "no");
  return 0;
}

}  // namespace wdsemu::cli
