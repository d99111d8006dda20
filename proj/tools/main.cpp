#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "csv.hpp"
#include "wdsemu/error.hpp"
#include "wdsemu/runtime.hpp"

namespace {

using wdsemu::cli::Options;

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

/// Registers options on subcommands and remembers how to set each of them
/// from a config value.
class Binder {
 public:
  template <class T>
  void opt(CLI::App* app, const std::string& name, T& var, const std::string& desc, const std::string& short_name = "") {
    auto* o = app->add_option((short_name.empty() ? "" : short_name + ",") + "--" + name, var, desc);
    o->capture_default_str();
    if constexpr (!std::is_same_v<T, std::string> && requires { var.push_back(var.front()); }) o->delimiter(',');
    setters_.emplace(name, [&var, name](const std::string& value) { assign(var, value, name); });
  }
  void require(const std::string& name, const std::string& value) const {
    if (value.empty()) throw std::invalid_argument("--" + name + " is required for this command");
  }
  void flag(CLI::App* app, const std::string& name, bool& var, const std::string& desc) {
    app->add_flag("--" + name, var, desc);
    setters_.emplace(name, [&var, name](const std::string& value) {
      if (value == "1" || value == "true" || value == "yes") var = true;
      else if (value == "0" || value == "false" || value == "no") var = false;
      else throw std::invalid_argument("config key '" + name + "' expects true or false");
    });
  }
  void apply(const std::map<std::string, std::string>& config) const {
    for (const auto& [key, value] : config) {
      const auto it = setters_.find(key);
      if (it == setters_.end()) throw std::invalid_argument("unknown config key '" + key + "'");
      it->second(value);
    }
  }

 private:
  template <class T>
  static void assign(T& var, const std::string& value, const std::string& name) {
    if (!CLI::detail::lexical_cast(value, var)) throw std::invalid_argument("config key '" + name + "' has bad value '" + value + "'");
  }
  template <class T>
  static void assign(std::vector<T>& var, const std::string& value, const std::string& name) {
    var.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      T v{};
      assign(v, item, name);
      var.push_back(v);
    }
  }

  std::map<std::string, std::function<void(const std::string&)>> setters_;
};

void add_scenario_options(Binder& b, CLI::App* app, Options& o) {
  b.opt(app, "dataset", o.dataset, "Dataset container (WDSD); generated on the fly when omitted");
  b.opt(app, "scenarios", o.scenarios, "Number of generated scenarios");
  b.opt(app, "days", o.days, "Days per generated scenario");
  b.opt(app, "diameter-noise", o.diameter_noise, "Relative std of pipe diameter noise");
  b.opt(app, "demand-noise", o.demand_noise, "Std of additive noise on the demand pattern");
}

void add_model_options(Binder& b, CLI::App* app, Options& o) {
  b.opt(app, "latent-dim", o.train.latent, "Latent dimension");
  b.opt(app, "layers", o.train.layers, "Number of message-passing layers");
}

}  // namespace

int main(int argc, char** argv) {
  wdsemu::configure_allocator();
  Options o;
  Binder b;
  std::string config;
  CLI::App app{"Water distribution network emulator: hydraulic oracle, physics layer and message-passing model"};
  app.require_subcommand(1);
  app.add_option("--config", config, "Flat key=value file; its values override command-line flags");
  b.opt(&app, "seed", o.seed, "Seed for scenario generation");
  b.opt(&app, "demand-multiplier", o.demand_multiplier, "Global demand scale factor");
  b.opt(&app, "out", o.out, "Output path", "-o");
  b.opt(&app, "zeta", o.train.zeta, "Additive flow constant of the physics layer");

  auto* parse = app.add_subcommand("parse", "Parse an INP file and print a JSON summary");
  parse->add_option("inp", o.inp, "Network file")->required();

  auto* solve = app.add_subcommand("solve", "Steady-state oracle solve to CSV");
  solve->add_option("inp", o.inp, "Network file")->required();
  solve->add_option("demands", o.demands_csv, "CSV with node_id,demand [m^3/s]; base demands otherwise");
  b.opt(solve, "edges-out", o.edges_out, "Edge flow CSV (default: <out>_edges.csv)");

  auto* gen = app.add_subcommand("gen", "Generate (and solve) demand scenarios into a dataset container");
  gen->add_option("inp", o.inp, "Network file")->required();
  b.opt(gen, "scenarios", o.scenarios, "Number of scenarios");
  b.opt(gen, "days", o.days, "Days per scenario");
  b.opt(gen, "diameter-noise", o.diameter_noise, "Relative std of pipe diameter noise");
  b.opt(gen, "demand-noise", o.demand_noise, "Std of additive noise on the demand pattern");
  b.flag(gen, "no-solve", o.no_solve, "Store demands only");

  auto* train = app.add_subcommand("train", "Train the emulator and write a checkpoint (WDSM)");
  train->add_option("inp", o.inp, "Network file")->required();
  add_scenario_options(b, train, o);
  add_model_options(b, train, o);
  b.opt(train, "epochs", o.train.epochs, "Training epochs");
  b.opt(train, "lr", o.train.lr, "Initial learning rate");
  b.opt(train, "lr-step", o.train.scheduler_step, "Epochs per learning-rate decay step");
  b.opt(train, "lr-decay", o.train.scheduler_decay, "Learning-rate decay factor");
  b.opt(train, "k-min", o.train.k_min, "Smallest number of iterations K");
  b.opt(train, "k-max", o.train.k_max, "Largest number of iterations K");
  b.opt(train, "rho", o.train.rho, "Weight of the physics demand term");
  b.opt(train, "delta", o.train.delta, "Weight of the flow agreement term");
  b.opt(train, "batch-size", o.train.batch_size, "Samples per optimizer step");
  b.opt(train, "grad-clip", o.train.grad_clip_norm, "Global gradient norm bound");
  b.opt(train, "model-seed", o.train.seed, "Seed for weight init, K draws and shuffling");
  b.flag(train, "full-unroll", o.train.full_unroll, "Backpropagate through all K iterations");
  b.opt(train, "loss-curve", o.loss_curve, "CSV with epoch,loss,lr,K");
  b.opt(train, "log-every", o.log_every, "Progress line every n epochs (0: quiet)");
  b.opt(train, "checkpoint-every", o.checkpoint_every, "Also write the checkpoint every n epochs (0: only at the end)");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint against oracle solutions");
  eval->add_option("inp", o.inp, "Network file")->required();
  add_scenario_options(b, eval, o);
  b.opt(eval, "model", o.model, "Checkpoint file");
  b.opt(eval, "iterations", o.train.eval_iterations, "Emulator iterations");
  b.opt(eval, "split", o.split, "Time-step split to use: train, val, test or all");
  b.opt(eval, "eval-batch", o.eval_batch, "Samples per emulator batch");
  b.opt(eval, "sigma-sweep", o.sigma_sweep, "Diameter noise levels for a robustness sweep");
  b.opt(eval, "sweep-out", o.sweep_out, "CSV for the robustness sweep");

  auto* bench = app.add_subcommand("bench", "Time oracle and emulator over growing sample counts");
  bench->add_option("inp", o.inp, "Network file")->required();
  add_scenario_options(b, bench, o);
  b.opt(bench, "model", o.model, "Checkpoint file");
  b.opt(bench, "counts", o.counts, "Sample counts");
  b.opt(bench, "iterations", o.train.eval_iterations, "Emulator iterations");
  b.opt(bench, "eval-batch", o.eval_batch, "Samples per emulator batch");

  auto* fix = app.add_subcommand("fixpoint", "Run the physics layer once on given flows");
  fix->add_option("inp", o.inp, "Network file")->required();
  b.opt(fix, "flows", o.flows_csv, "CSV with edge_id,from,to,flow; oracle flows of the base demands otherwise");
  b.opt(fix, "edges-out", o.edges_out, "Edge flow CSV (default: <out>_edges.csv)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (!config.empty()) b.apply(wdsemu::cli::read_config(config));
    if (!parse->parsed() && !eval->parsed()) b.require("out", o.out);
    if (eval->parsed() || bench->parsed()) b.require("model", o.model);
    if (parse->parsed()) return wdsemu::cli::run_parse(o);
    if (solve->parsed()) return wdsemu::cli::run_solve(o);
    if (gen->parsed()) return wdsemu::cli::run_gen(o);
    if (train->parsed()) return wdsemu::cli::run_train(o);
    if (eval->parsed()) return wdsemu::cli::run_eval(o);
    if (bench->parsed()) return wdsemu::cli::run_bench(o);
    if (fix->parsed()) return wdsemu::cli::run_fixpoint(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const wdsemu::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const wdsemu::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
