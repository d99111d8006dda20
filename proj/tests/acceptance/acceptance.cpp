// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Usage: acceptance [criterion numbers...]
//
// Criteria 5 and 8 share a trained checkpoint. It is cached as
// <artifacts>/desk_scale.wdsm and reused when its recorded training settings
// match; WDSEMU_ACCEPTANCE_DIR overrides the artifact directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "wdsemu/container.hpp"
#include "wdsemu/fixpoint.hpp"
#include "wdsemu/gcn.hpp"
#include "wdsemu/hydraulics.hpp"
#include "wdsemu/inp.hpp"
#include "wdsemu/metrics.hpp"
#include "wdsemu/oracle.hpp"
#include "wdsemu/runtime.hpp"
#include "wdsemu/scenario.hpp"
#include "wdsemu/trainer.hpp"

namespace fs = std::filesystem;
using namespace wdsemu;
namespace wt = wdsemu::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

fs::path artifact_dir() {
  if (const char* env = std::getenv("WDSEMU_ACCEPTANCE_DIR")) return env;
  return WDSEMU_ARTIFACT_DIR;
}

std::vector<double> random_flows(std::mt19937_64& rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> q(n);
  for (auto& x : q) x = dist(rng);
  return q;
}

// Desk-scale setup shared by criteria 5, 6 and 8.
constexpr std::uint64_t kTrainSeed = 1;
constexpr std::uint64_t kEvalSeed = kTrainSeed + 0x5eed0000ULL;
constexpr std::size_t kTrainScenarios = 5;
constexpr std::size_t kEvalScenarios = 3;
constexpr std::size_t kDays = 2;
constexpr std::size_t kEpochs = 600;

TrainConfig desk_config() {
  TrainConfig cfg;
  cfg.epochs = kEpochs;
  return cfg;
}

ScenarioSet hanoi_scenarios(const ParsedInp& parsed, std::size_t n, std::uint64_t seed, double diameter_noise,
                            bool solve) {
  ScenarioOptions opts;
  opts.patterns = &parsed.patterns;
  opts.pattern_step_hours = parsed.pattern_step_hours;
  opts.diameter_noise_std = diameter_noise;
  auto set = generate_scenarios(parsed.network, n, kDays, seed, opts);
  if (solve) solve_scenarios(set);
  return set;
}

bool checkpoint_matches(const Checkpoint& ck, const TrainConfig& cfg) {
  const std::map<std::string, double> want{{"epochs", double(cfg.epochs)},  {"seed", double(cfg.seed)},
                                           {"batch_size", double(cfg.batch_size)}, {"k_min", double(cfg.k_min)},
                                           {"k_max", double(cfg.k_max)},    {"lr", cfg.lr},
                                           {"rho", cfg.rho},                {"delta", cfg.delta},
                                           {"layers", double(cfg.layers)},  {"latent_dim", double(cfg.latent)},
                                           {"train_seed", double(kTrainSeed)}};
  for (const auto& [k, v] : want) {
    const auto it = ck.hyperparameters.find(k);
    if (it == ck.hyperparameters.end() || it->second != v) return false;
  }
  return true;
}

struct DeskModel {
  ModelParams params;
  std::vector<EpochRecord> history;  // empty when loaded from the cache
  double train_seconds = 0.0;
  bool cached = false;
};

const DeskModel& desk_model(const ParsedInp& parsed) {
  static std::optional<DeskModel> model;
  if (model) return *model;
  model.emplace();
  const TrainConfig cfg = desk_config();
  const fs::path dir = artifact_dir();
  fs::create_directories(dir);
  const fs::path ck_path = dir / "desk_scale.wdsm";
  const fs::path curve_path = dir / "desk_scale_loss.csv";
  if (fs::exists(ck_path)) {
    try {
      const Checkpoint ck = load_checkpoint(ck_path.string());
      if (checkpoint_matches(ck, cfg)) {
        model->params = from_checkpoint(ck);
        model->cached = true;
        std::fprintf(stderr, "using cached checkpoint %s\n", ck_path.c_str());
        return *model;
      }
    } catch (const std::exception& e) {
      std::fprintf(stderr, "ignoring cached checkpoint: %s\n", e.what());
    }
  }
  const ScenarioSet set = hanoi_scenarios(parsed, kTrainScenarios, kTrainSeed, 1.0 / 30.0, false);
  const auto samples = make_samples(set, SplitPart::train);
  model->params = init_params(cfg.layers, cfg.latent, cfg.seed);
  std::fprintf(stderr, "training %zu epochs on %zu samples\n", cfg.epochs, samples.size());
  const auto t0 = Clock::now();
  model->history = train(model->params, samples, cfg, [&](const EpochRecord& r, const ModelParams&) {
    if (r.epoch % 25 == 0) {
      std::fprintf(stderr, "  epoch %zu loss %.4e K %zu (%.0f s)\n", r.epoch, r.loss, r.k, seconds_since(t0));
    }
  });
  model->train_seconds = seconds_since(t0);
  Checkpoint ck = to_checkpoint(model->params);
  ck.hyperparameters["epochs"] = double(cfg.epochs);
  ck.hyperparameters["seed"] = double(cfg.seed);
  ck.hyperparameters["batch_size"] = double(cfg.batch_size);
  ck.hyperparameters["k_min"] = double(cfg.k_min);
  ck.hyperparameters["k_max"] = double(cfg.k_max);
  ck.hyperparameters["lr"] = cfg.lr;
  ck.hyperparameters["rho"] = cfg.rho;
  ck.hyperparameters["delta"] = cfg.delta;
  ck.hyperparameters["train_seed"] = double(kTrainSeed);
  save_checkpoint(ck_path.string(), ck);
  write_loss_curve(curve_path.string(), model->history);
  return *model;
}

// --- criterion 1 -----------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(5, 60);
  std::size_t ok = 0, worst_j = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = size(rng);
    std::uniform_int_distribution<std::size_t> extra(0, n);
    std::uniform_int_distribution<std::size_t> res(1, std::min<std::size_t>(3, n - 1));
    auto net = wt::random_connected(rng, n, extra(rng), res(rng));
    auto q = random_flows(rng, net.num_edges(), 3.0);
    try {
      auto p = propagate_heads(net, make_fixpoint_input(net, q), true);
      bool good = p.trace.converged && p.trace.iterations <= net.num_nodes();
      // Exact fixed point: one more sweep leaves every head unchanged.
      auto again = propagate_heads(net, FixpointInput{p.heads, q, kDefaultZeta});
      good = good && again.heads == p.heads && again.trace.iterations == 0;
      worst_j = std::max(worst_j, p.trace.iterations);
      ok += good ? 1 : 0;
    } catch (const std::exception&) {
    }
  }
  std::size_t tree_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto net = wt::random_tree(rng, size(rng));
    auto q = random_flows(rng, net.num_edges(), 3.0);
    auto p = propagate_heads(net, make_fixpoint_input(net, q));
    tree_ok += (p.trace.converged && p.trace.iterations <= wt::tree_depth(net)) ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  return {ok == 1000 && tree_ok == 200 && secs < 60.0,
          std::to_string(ok) + "/1000 graphs at exact fixed point within N_n (max J " + std::to_string(worst_j) +
              "), " + std::to_string(tree_ok) + "/200 trees with J <= L_max, " + fmt("%.1f s", secs)};
}

// --- criterion 2 -----------------------------------------------------------

Outcome criterion2(const ParsedInp& parsed) {
  const auto t0 = Clock::now();
  const auto set = hanoi_scenarios(parsed, 2, 77, 1.0 / 30.0, false);
  double max_dq = 0, max_dh = 0;
  std::size_t states = 0;
  for (std::size_t k = 0; k < set.scenarios.size() && states < 100; ++k) {
    const WaterNetwork net = set.network_for(k);
    for (Eigen::Index t = 0; t < set.scenarios[k].demands.rows() && states < 100; ++t, ++states) {
      const auto row = set.scenarios[k].demands.row(t);
      const auto s = solve_steady_state(net, std::vector<double>(row.data(), row.data() + row.size()));
      const auto out = fixpoint_apply(net, s.flows, kDefaultZeta);
      for (std::size_t e = 0; e < net.num_edges(); ++e) {
        max_dq = std::max(max_dq, std::abs(out.flows[e] - (s.flows[e] + kDefaultZeta)));
      }
      for (std::size_t v = 0; v < net.num_nodes(); ++v) max_dh = std::max(max_dh, std::abs(out.heads[v] - s.heads[v]));
    }
  }
  const double secs = seconds_since(t0);
  return {states == 100 && max_dq <= 1e-9 && max_dh <= 1e-9 && secs < 60.0,
          std::to_string(states) + " states, max|q~-(q*+zeta)| " + fmt("%.2e", max_dq) + ", max|h~-h*| " +
              fmt("%.2e", max_dh) + ", " + fmt("%.1f s", secs)};
}

// --- criterion 3 -----------------------------------------------------------

Outcome criterion3(const ParsedInp& parsed) {
  double worst_imb = 0, worst_res = 0, worst_bf = 0;
  std::size_t solves = 0;
  auto record = [&](const WaterNetwork& net, const HydraulicState& s) {
    for (double x : node_imbalance(net, s)) worst_imb = std::max(worst_imb, std::abs(x));
    worst_res = std::max(worst_res, max_headloss_residual(net, s));
    ++solves;
  };
  // Hanoi-class scenarios.
  const auto set = hanoi_scenarios(parsed, 3, 31, 1.0 / 30.0, false);
  for (std::size_t k = 0; k < set.scenarios.size(); ++k) {
    const WaterNetwork net = set.network_for(k);
    for (const auto& item : batch_solve(net, set.scenarios[k].demands)) {
      if (!item.state) return {false, "oracle failed: " + item.error};
      record(net, *item.state);
    }
  }
  // Triangles and other tiny networks against the dense brute-force solver.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> r(0.5, 30.0), d(0.01, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto tri = wt::make_network({100.0}, 2, {{0, 1, r(rng)}, {0, 2, r(rng)}, {1, 2, r(rng)}});
    const std::vector<double> dem{0.0, d(rng), d(rng)};
    const auto s = solve_steady_state(tri, dem);
    record(tri, s);
    const auto ref = wt::brute_force_heads(tri, dem);
    for (std::size_t v = 0; v < 3; ++v) worst_bf = std::max(worst_bf, std::abs(s.heads[v] - ref[v]));
  }
  return {worst_imb <= 1e-6 && worst_res <= 1e-6 && worst_bf <= 1e-8,
          std::to_string(solves) + " solves, max imbalance " + fmt("%.2e", worst_imb) + ", max head-loss residual " +
              fmt("%.2e", worst_res) + ", triangle vs brute force " + fmt("%.2e", worst_bf)};
}

// --- criterion 4 -----------------------------------------------------------

std::vector<double> flatten(const ModelParams& p) {
  std::vector<double> x;
  for (const auto& [n, t] : p.named()) x.insert(x.end(), t->values().begin(), t->values().end());
  return x;
}

void unflatten(ModelParams& p, const std::vector<double>& x) {
  std::size_t k = 0;
  for (auto& [n, t] : p.named()) {
    for (auto& v : t->values()) v = x[k++];
  }
}

Outcome criterion4() {
  const auto net = wt::make_network({60.0}, 4, {{0, 1, 2.0}, {1, 2, 3.0}, {2, 3, 1.5}, {3, 1, 4.0}, {3, 4, 2.5}});
  const std::vector<double> demands{0.0, 0.2, 0.1, 0.3, 0.15};
  TrainConfig cfg;
  cfg.full_unroll = true;
  std::size_t checked = 0, failed = 0;
  double worst = 0;
  for (std::uint64_t seed : {11U, 12U, 13U}) {
    auto params = init_params(cfg.layers, 8, seed);
    std::vector<ad::Tensor> grads;
    loss_and_gradients(params, net, demands, 2, cfg, &grads);
    std::vector<double> g;
    for (const auto& t : grads) g.insert(g.end(), t.values().begin(), t.values().end());
    auto f = [&](const std::vector<double>& x) {
      ModelParams p = params;
      unflatten(p, x);
      return loss_and_gradients(p, net, demands, 2, cfg, nullptr);
    };
    auto res = wt::finite_difference_check(f, flatten(params), g);
    checked += res.checked;
    failed += res.failed;
    worst = std::max(worst, res.worst_rel);
  }
  return {failed == 0 && checked > 0,
          std::to_string(checked - failed) + "/" + std::to_string(checked) +
              " parameter gradients within tolerance (5-node net, K=2, all iterations differentiated), worst rel " +
              fmt("%.2e", worst)};
}

// --- criterion 5 -----------------------------------------------------------

Outcome criterion5(const ParsedInp& parsed) {
  const DeskModel& model = desk_model(parsed);
  const auto eval_set = hanoi_scenarios(parsed, kEvalScenarios, kEvalSeed, 1.0 / 30.0, true);
  const auto samples = make_samples(eval_set, SplitPart::all);
  EvalConfig cfg;
  const auto report = evaluate(model.params, samples, cfg);
  const auto& a = report.all;
  std::ostringstream detail;
  detail << samples.size() << " eval samples, demand MRAE " << fmt("%.3f%%", 100 * a.demand_mrae.mean) << " +- "
         << fmt("%.3f%%", 100 * a.demand_mrae.std) << ", head MRAE " << fmt("%.4f%%", 100 * a.head_mrae.mean)
         << ", C = " << a.conformity << " (excluding 5% outliers: demand "
         << fmt("%.3f%%", 100 * report.excluding_outliers.demand_mrae.mean) << ")";
  if (!model.history.empty()) {
    detail << ", trained in " << fmt("%.0f s", model.train_seconds) << ", loss " << fmt("%.3e", model.history.front().loss)
           << " -> " << fmt("%.3e", model.history.back().loss);
  } else {
    detail << ", cached checkpoint";
  }
  return {a.demand_mrae.mean <= 0.02 && a.head_mrae.mean <= 0.005 && a.conformity == 0, detail.str()};
}

// --- criterion 6 -----------------------------------------------------------

Outcome criterion6(const ParsedInp& parsed) {
  // Timing does not depend on the weights, so an untrained model of the
  // default size stands in when criterion 5 has not produced one.
  const ModelParams params = init_params(5, 128, 0);
  const auto set = hanoi_scenarios(parsed, kEvalScenarios, kEvalSeed, 1.0 / 30.0, false);
  const auto pool = make_samples(set, SplitPart::all);
  const std::vector<std::size_t> counts{100, 1000, 10000};
  EvalConfig cfg;
  const auto rows = benchmark(params, pool, counts, cfg);
  write_bench_csv((artifact_dir() / "bench.csv").string(), rows);
  double lo = 1e300, hi = 0;
  std::ostringstream detail;
  for (const auto& r : rows) {
    const double per = r.emulator_s / double(r.samples);
    lo = std::min(lo, per);
    hi = std::max(hi, per);
    detail << r.samples << ": oracle " << fmt("%.2f s", r.oracle_s) << " emulator " << fmt("%.2f s", r.emulator_s)
           << "; ";
  }
  const bool flat = hi <= 2.0 * lo;
  const bool faster = rows.back().emulator_s < rows.back().oracle_s;
  detail << "per-sample emulator spread " << fmt("%.2fx", hi / lo) << (flat ? " (ok)" : " (too wide)")
         << ", emulator " << (faster ? "faster" : "slower") << " than oracle at 10^4";
  return {flat && faster, detail.str()};
}

// --- criterion 7 -----------------------------------------------------------

Outcome criterion7() {
  std::vector<std::string> failures;
  std::mt19937_64 rng(70);

  // Antisymmetry and exact global mass balance.
  for (int trial = 0; trial < 100; ++trial) {
    auto net = wt::random_connected(rng, 30, 20, 1 + trial % 3);
    std::vector<double> q(net.num_edges());
    std::uniform_int_distribution<int> k(-8192, 8192);
    for (auto& x : q) x = std::ldexp(double(k(rng)), -12);
    auto anti = antisymmetrize(net, random_flows(rng, net.num_edges(), 5.0));
    for (std::size_t e = 0; e < anti.size(); ++e) {
      if (anti[e] != -anti[std::size_t(net.partner(EdgeIndex(e)))]) {
        failures.push_back("antisymmetry");
        break;
      }
    }
    auto d = demands_from_flows(net, antisymmetrize(net, q));
    if (std::accumulate(d.begin(), d.end(), 0.0) != 0.0) failures.push_back("sum of d-hat");
  }

  // Residual identity at zero parameters.
  for (int trial = 0; trial < 10; ++trial) {
    auto net = wt::random_connected(rng, 20, 10, 2);
    ad::Tape tape(false);
    auto pv = bind_params(tape, zero_params(3, 8), false);
    ad::Tensor D(net.num_nodes(), 2), Q(net.num_edges(), 2);
    for (auto& x : D.values()) x = std::uniform_real_distribution<double>(0, 1)(rng);
    for (auto& x : Q.values()) x = std::uniform_real_distribution<double>(-1, 1)(rng);
    auto out = gcn_forward(pv, net, tape.constant(D), tape.constant(Q));
    for (std::size_t e = 0; e < net.num_edges(); ++e) {
      if (out.value()[e] != Q(e, 0)) {
        failures.push_back("residual identity");
        break;
      }
    }
  }

  // Permutation equivariance under node and pipe relabeling.
  {
    auto net = wt::random_connected(rng, 16, 8, 2);
    const auto params = init_params(3, 8, 9);
    ad::Tensor D(net.num_nodes(), 2), Q(net.num_edges(), 2);
    for (auto& x : D.values()) x = std::uniform_real_distribution<double>(0, 1)(rng);
    for (auto& x : Q.values()) x = std::uniform_real_distribution<double>(-1, 1)(rng);
    auto run = [&](const WaterNetwork& g, const ad::Tensor& d, const ad::Tensor& q) {
      ad::Tape tape(false);
      auto pv = bind_params(tape, params, false);
      const auto& v = gcn_forward(pv, g, tape.constant(d), tape.constant(q)).value();
      return std::vector<double>(v.values().begin(), v.values().end());
    };
    const auto base = run(net, D, Q);
    std::vector<NodeIndex> perm(net.num_nodes());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Node> nodes(net.num_nodes());
    for (std::size_t v = 0; v < nodes.size(); ++v) nodes[std::size_t(perm[v])] = net.node(NodeIndex(v));
    std::vector<Pipe> pipes(net.pipes().begin(), net.pipes().end());
    std::vector<std::size_t> order(pipes.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Pipe> new_pipes;
    std::vector<std::size_t> edge_map(net.num_edges());
    for (std::size_t k = 0; k < order.size(); ++k) {
      Pipe p = pipes[order[k]];
      p.from = perm[std::size_t(p.from)];
      p.to = perm[std::size_t(p.to)];
      new_pipes.push_back(p);
      edge_map[2 * order[k]] = 2 * k;
      edge_map[2 * order[k] + 1] = 2 * k + 1;
    }
    WaterNetwork permuted(nodes, new_pipes);
    ad::Tensor D2(D.rows(), 2), Q2(Q.rows(), 2);
    for (std::size_t v = 0; v < D.rows(); ++v) {
      for (std::size_t c = 0; c < 2; ++c) D2(std::size_t(perm[v]), c) = D(v, c);
    }
    for (std::size_t e = 0; e < Q.rows(); ++e) {
      for (std::size_t c = 0; c < 2; ++c) Q2(edge_map[e], c) = Q(e, c);
    }
    const auto moved = run(permuted, D2, Q2);
    for (std::size_t e = 0; e < base.size(); ++e) {
      if (std::abs(moved[edge_map[e]] - base[e]) > 1e-12 * std::max(1.0, std::abs(base[e]))) {
        failures.push_back("permutation equivariance");
        break;
      }
    }
  }

  // Parser round trip on the golden files.
  const std::string golden = WDSEMU_TEST_DATA;
  for (const auto& path : {golden + "/minimal.inp", golden + "/mixed.inp", std::string(WDSEMU_DATA_DIR) + "/hanoi.inp"}) {
    const auto doc = parse_inp_document(wt::read_file(path));
    if (!(parse_inp_document(render_inp(doc)) == doc)) failures.push_back("round trip " + path);
  }
  if (render_inp(parse_inp_document(wt::read_file(golden + "/minimal.inp"))) !=
      wt::read_file(golden + "/minimal.rendered.inp")) {
    failures.push_back("golden render");
  }

  if (failures.empty()) {
    return {true, "antisymmetry, exact sum of d-hat, residual identity, permutation equivariance, INP round trip"};
  }
  std::string msg = "failed:";
  for (const auto& f : failures) msg += " " + f + ";";
  return {false, msg};
}

// --- criterion 8 -----------------------------------------------------------

Outcome criterion8(const ParsedInp& parsed) {
  const DeskModel& model = desk_model(parsed);
  const fs::path csv = artifact_dir() / "sigma_sweep.csv";
  std::ofstream out(csv);
  out.precision(9);
  out << "sigma,demand_mrae_mean,demand_mrae_std,head_mrae_mean\n";
  EvalConfig cfg;
  cfg.time_oracle = false;
  std::vector<double> means;
  std::ostringstream detail;
  for (int i = 0; i <= 5; ++i) {
    const double sigma = 0.02 * i;
    const auto set = hanoi_scenarios(parsed, kEvalScenarios, kEvalSeed, sigma, true);
    const auto report = evaluate(model.params, make_samples(set, SplitPart::all), cfg);
    means.push_back(report.all.demand_mrae.mean);
    out << sigma << ',' << report.all.demand_mrae.mean << ',' << report.all.demand_mrae.std << ','
        << report.all.head_mrae.mean << '\n';
    detail << fmt("%.2f:", sigma) << fmt("%.3f%% ", 100 * report.all.demand_mrae.mean);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < means.size(); ++i) monotone = monotone && means[i] >= means[i - 1];
  detail << (monotone ? "non-decreasing" : "not monotone") << ", csv " << csv.string();
  return {monotone, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  configure_allocator();
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto selected = [&](int c) { return wanted.empty() || wanted.count(c) > 0; };

  const ParsedInp hanoi = wt::load_hanoi();
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [] { return criterion1(); }},
      {2, [&] { return criterion2(hanoi); }},
      {3, [&] { return criterion3(hanoi); }},
      {4, [] { return criterion4(); }},
      {5, [&] { return criterion5(hanoi); }},
      {6, [&] { return criterion6(hanoi); }},
      {7, [] { return criterion7(); }},
      {8, [&] { return criterion8(hanoi); }},
  };
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    if (!selected(id)) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s (%s) [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
