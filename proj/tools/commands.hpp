#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wdsemu/metrics.hpp"
#include "wdsemu/trainer.hpp"

namespace wdsemu::cli {

struct Options {
  std::string inp;
  std::string demands_csv;
  std::string flows_csv;
  std::string out;
  std::string edges_out;
  std::string dataset;
  std::string model;
  std::string loss_curve;
  std::string sweep_out;

  std::uint64_t seed = 0;
  double demand_multiplier = 1.0;
  std::size_t scenarios = 0;  // 0: command default
  std::size_t days = 2;
  double diameter_noise = 1.0 / 30.0;
  double demand_noise = 0.1;
  bool no_solve = false;

  TrainConfig train;
  std::size_t log_every = 10;
  std::size_t checkpoint_every = 0;

  std::string split = "all";
  std::size_t eval_batch = 32;
  std::vector<double> sigma_sweep;
  std::vector<std::size_t> counts{100, 1000, 10000};
};

int run_parse(const Options& o);
int run_solve(const Options& o);
int run_gen(const Options& o);
int run_train(const Options& o);
int run_eval(const Options& o);
int run_bench(const Options& o);
int run_fixpoint(const Options& o);

}  // namespace wdsemu::cli
