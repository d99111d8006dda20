#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wdsemu/fixpoint.hpp"
#include "wdsemu/gcn.hpp"
#include "wdsemu/scenario.hpp"

namespace wdsemu {

struct TrainConfig {
  std::size_t epochs = 3000;
  double lr = 1e-4;
  std::size_t scheduler_step = 300;
  double scheduler_decay = 0.75;
  std::size_t k_min = 10;
  std::size_t k_max = 15;
  std::size_t eval_iterations = 20;
  double rho = 0.1;
  double delta = 0.1;
  std::size_t batch_size = 8;
  double grad_clip_norm = 1.0;
  std::uint64_t seed = 0;
  std::size_t layers = 5;
  std::size_t latent = 128;
  double zeta = kDefaultZeta;
  /// Backpropagate through all K iterations instead of the last one only.
  bool full_unroll = false;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// lr * decay^floor(epoch / step), epochs counted from 0.
  double learning_rate(std::size_t epoch) const;
};

/// One steady-state sample: a network (shared across a scenario), true
/// demands and, when available, the reference heads and flows.
struct Sample {
  std::shared_ptr<const WaterNetwork> net;
  std::vector<double> demands;
  std::vector<double> heads;
  std::vector<double> flows;
  std::size_t scenario = 0;
  std::size_t step = 0;

  bool has_reference() const { return !heads.empty(); }
};

enum class SplitPart { train, val, test, all };

/// Samples of every scenario restricted to one part of the 60/20/20 split.
std::vector<Sample> make_samples(const ScenarioSet& set, SplitPart part);

/// Several samples glued into one block-diagonal graph.
struct Batch {
  WaterNetwork net;
  std::vector<double> demands;
  std::vector<std::size_t> node_offset;  // per sample, plus a final end
  std::vector<std::size_t> edge_offset;
};

Batch make_batch(std::span<const Sample* const> samples);

/// Outputs of the K-th iteration.
struct EmulationVars {
  ad::Var flows_gcn;      // q-hat, antisymmetric
  ad::Var demands_gcn;    // d-hat
  ad::Var heads;          // h-tilde
  ad::Var flows_phys;     // q-tilde
  ad::Var demands_phys;   // d-tilde
};

/// Runs K iterations of f1 then f2 on `tape`. Unless full_unroll is set, the
/// first K-1 iterations run on a scratch tape and enter the last one as
/// constants.
EmulationVars emulate(ad::Tape& tape, const ParamVars& params, const ModelParams& values, const WaterNetwork& net,
                      std::span<const double> demands, std::size_t iterations, double zeta, bool full_unroll);

struct Emulation {
  std::vector<double> flows_gcn;
  std::vector<double> demands_gcn;
  std::vector<double> heads;
  std::vector<double> flows_phys;
  std::vector<double> demands_phys;
};

/// Inference only, no gradients.
Emulation emulate(const ModelParams& params, const WaterNetwork& net, std::span<const double> demands,
                  std::size_t iterations, double zeta = kDefaultZeta);

/// L(d*, d-hat) + rho L(d*, d-tilde) + delta L(q-hat, q-tilde); demand
/// terms over consumers only.
ad::Var training_loss(const WaterNetwork& net, std::span<const double> demands, const EmulationVars& out,
                      double rho, double delta);

/// Adam with bias correction and no weight decay.
class Adam {
 public:
  Adam(const ModelParams& like, double beta1, double beta2, double eps);
  void step(ModelParams& params, std::span<const ad::Tensor> grads, double lr);
  std::size_t steps() const { return t_; }

 private:
  double beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<ad::Tensor> m_, v_;
};

/// Scales the gradients so their global L2 norm is at most max_norm and
/// returns the norm before clipping.
double clip_global_norm(std::span<ad::Tensor> grads, double max_norm);

struct StepResult {
  double loss = 0.0;
  double grad_norm = 0.0;
};

/// Forward, backward, clip and Adam update on one batch. Throws
/// NumericError on a non-finite loss, naming the first offending sample.
StepResult train_epoch_step(ModelParams& params, Adam& adam, std::span<const Sample* const> batch,
                            std::size_t iterations, double lr, const TrainConfig& cfg);

/// Loss and gradients without an update (gradient checks, diagnostics).
double loss_and_gradients(const ModelParams& params, const WaterNetwork& net, std::span<const double> demands,
                          std::size_t iterations, const TrainConfig& cfg, std::vector<ad::Tensor>* grads);

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
  std::size_t k = 0;
};

using EpochCallback = std::function<void(const EpochRecord&, const ModelParams&)>;

/// Full training loop: per epoch draw K, shuffle, step over batches.
std::vector<EpochRecord> train(ModelParams& params, std::span<const Sample> samples, const TrainConfig& cfg,
                               const EpochCallback& on_epoch = {});

void write_loss_curve(const std::string& path, std::span<const EpochRecord> records);

}  // namespace wdsemu
