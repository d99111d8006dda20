#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wdsemu/autodiff.hpp"
#include "wdsemu/container.hpp"
#include "wdsemu/network.hpp"

namespace wdsemu {

/// Bias-free two-layer perceptron x -> SeLU(x W0) W1.
struct Mlp {
  ad::Tensor w0;
  ad::Tensor w1;
};

/// Weights of the local message-passing model. Linear maps act on row
/// vectors: y = x W with W stored in x out.
struct ModelParams {
  std::size_t layers = 5;
  std::size_t latent = 128;
  ad::Tensor alpha;  // 2 x M
  ad::Tensor beta;   // 2 x M
  std::vector<Mlp> gamma;  // 3M -> M per layer
  std::vector<Mlp> eta;    // M -> M per layer
  Mlp lambda;              // 3M -> 1

  std::size_t parameter_count() const;
  /// Every weight tensor in checkpoint order with its checkpoint name.
  std::vector<std::pair<std::string, ad::Tensor*>> named();
  std::vector<std::pair<std::string, const ad::Tensor*>> named() const;
};

ModelParams zero_params(std::size_t layers, std::size_t latent);
/// Fan-in scaled uniform init U(-sqrt(3/fan_in), sqrt(3/fan_in)), seeded.
ModelParams init_params(std::size_t layers, std::size_t latent, std::uint64_t seed);

Checkpoint to_checkpoint(const ModelParams& params);
/// Throws DataError on missing tensors or inconsistent shapes.
ModelParams from_checkpoint(const Checkpoint& checkpoint);

/// Model inputs for one sample: D (nodes x 2), Q (edges x 2), h0.
struct Features {
  ad::Tensor demands;
  ad::Tensor flows;
  std::vector<double> heads;
};

/// h0 = h* at reservoirs and 0 elsewhere; d1 = d2 = true demand (0 at
/// reservoirs); q1 = q2 = flows implied by h0 through the head-loss law.
/// Throws DataError on negative consumer demands or a length mismatch.
Features init_features(const WaterNetwork& net, std::span<const double> true_demands);

/// Weights recorded on a tape.
struct ParamVars {
  ad::Var alpha;
  ad::Var beta;
  std::vector<std::pair<ad::Var, ad::Var>> gamma;
  std::vector<std::pair<ad::Var, ad::Var>> eta;
  std::pair<ad::Var, ad::Var> lambda;
  /// Same order as ModelParams::named().
  std::vector<ad::Var> all() const;
};

/// Records every weight as a variable (trainable) or as a constant.
ParamVars bind_params(ad::Tape& tape, const ModelParams& params, bool trainable = true);

/// q-hat per directed edge (edges x 1): q1 plus the residual from lambda.
/// Throws std::invalid_argument on feature shape mismatch.
ad::Var gcn_forward(const ParamVars& params, const WaterNetwork& net, ad::Var demands, ad::Var flows);

/// Keeps the canonical direction of each pipe and negates it on the partner.
ad::Var antisymmetrize(const WaterNetwork& net, ad::Var flows);
std::vector<double> antisymmetrize(const WaterNetwork& net, std::span<const double> flows);

/// d_v = -sum of flows on edges leaving v.
ad::Var demands_from_flows(const WaterNetwork& net, ad::Var flows);
std::vector<double> demands_from_flows(const WaterNetwork& net, std::span<const double> flows);

}  // namespace wdsemu
