#include "wdsemu/gcn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "wdsemu/error.hpp"
#include "wdsemu/hydraulics.hpp"

namespace wdsemu {

using ad::Tensor;
using ad::Var;

namespace {

Mlp zero_mlp(std::size_t in, std::size_t hidden, std::size_t out) { return {Tensor(in, hidden), Tensor(hidden, out)}; }

void fill_uniform(Tensor& t, std::mt19937_64& rng) {
  const double bound = std::sqrt(3.0 / static_cast<double>(t.rows()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.values()) v = dist(rng);
}

std::string layer_name(const char* prefix, std::size_t layer, int part) {
  return std::string(prefix) + "." + std::to_string(layer) + "." + std::to_string(part) + ".W";
}

}  // namespace

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named()) n += t->size();
  return n;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named() {
  std::vector<std::pair<std::string, Tensor*>> out;
  out.emplace_back("α.W", &alpha);
  out.emplace_back("β.W", &beta);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    out.emplace_back(layer_name("γ", i, 0), &gamma[i].w0);
    out.emplace_back(layer_name("γ", i, 1), &gamma[i].w1);
  }
  for (std::size_t i = 0; i < eta.size(); ++i) {
    out.emplace_back(layer_name("η", i, 0), &eta[i].w0);
    out.emplace_back(layer_name("η", i, 1), &eta[i].w1);
  }
  out.emplace_back("λ.0.W", &lambda.w0);
  out.emplace_back("λ.1.W", &lambda.w1);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<ModelParams*>(this)->named()) out.emplace_back(name, t);
  return out;
}

ModelParams zero_params(std::size_t layers, std::size_t latent) {
  if (layers == 0 || latent == 0) throw std::invalid_argument("model needs at least one layer and one latent unit");
  ModelParams p;
  p.layers = layers;
  p.latent = latent;
  p.alpha = Tensor(2, latent);
  p.beta = Tensor(2, latent);
  for (std::size_t i = 0; i < layers; ++i) {
    p.gamma.push_back(zero_mlp(3 * latent, latent, latent));
    p.eta.push_back(zero_mlp(latent, latent, latent));
  }
  p.lambda = zero_mlp(3 * latent, latent, 1);
  return p;
}

ModelParams init_params(std::size_t layers, std::size_t latent, std::uint64_t seed) {
  ModelParams p = zero_params(layers, latent);
  std::mt19937_64 rng(seed);
  for (auto& [name, t] : p.named()) fill_uniform(*t, rng);
  return p;
}

Checkpoint to_checkpoint(const ModelParams& params) {
  Checkpoint ck;
  ck.hyperparameters["layers"] = static_cast<double>(params.layers);
  ck.hyperparameters["latent_dim"] = static_cast<double>(params.latent);
  for (const auto& [name, t] : params.named()) ck.tensors.emplace_back(name, t->to_matrix());
  return ck;
}

ModelParams from_checkpoint(const Checkpoint& checkpoint) {
  const auto get = [&](const char* key) {
    auto it = checkpoint.hyperparameters.find(key);
    if (it == checkpoint.hyperparameters.end()) throw DataError(std::string("checkpoint lacks hyperparameter '") + key + "'");
    if (!(it->second >= 1.0) || it->second != std::floor(it->second)) {
      throw DataError(std::string("checkpoint hyperparameter '") + key + "' is not a positive integer");
    }
    return static_cast<std::size_t>(it->second);
  };
  ModelParams p = zero_params(get("layers"), get("latent_dim"));
  for (auto& [name, t] : p.named()) {
    const Matrix& m = checkpoint.tensor(name);
    if (static_cast<std::size_t>(m.rows()) != t->rows() || static_cast<std::size_t>(m.cols()) != t->cols()) {
      throw DataError("checkpoint tensor '" + name + "' has shape " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + ", expected " + std::to_string(t->rows()) + "x" +
                      std::to_string(t->cols()));
    }
    *t = Tensor::from_matrix(m);
  }
  return p;
}

Features init_features(const WaterNetwork& net, std::span<const double> true_demands) {
  const std::size_t n = net.num_nodes();
  if (true_demands.size() != n) throw DataError("init_features: demand vector has the wrong length");
  Features f;
  f.demands = Tensor(n, 2);
  f.flows = Tensor(net.num_edges(), 2);
  f.heads.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto vi = static_cast<NodeIndex>(v);
    if (net.is_reservoir(vi)) {
      f.heads[v] = net.node(vi).head;
      continue;
    }
    const double d = true_demands[v];
    if (!(d >= 0.0)) throw DataError("init_features: consumer '" + net.node(vi).id + "' has a negative demand");
    f.demands(v, 0) = d;
    f.demands(v, 1) = d;
  }
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    const auto ei = static_cast<EdgeIndex>(e);
    const double dh = f.heads[static_cast<std::size_t>(net.source(ei))] - f.heads[static_cast<std::size_t>(net.target(ei))];
    const double q = flow_from_headloss(net.resistance(ei), dh);
    f.flows(e, 0) = q;
    f.flows(e, 1) = q;
  }
  return f;
}

std::vector<Var> ParamVars::all() const {
  std::vector<Var> out{alpha, beta};
  for (const auto& [a, b] : gamma) {
    out.push_back(a);
    out.push_back(b);
  }
  for (const auto& [a, b] : eta) {
    out.push_back(a);
    out.push_back(b);
  }
  out.push_back(lambda.first);
  out.push_back(lambda.second);
  return out;
}

ParamVars bind_params(ad::Tape& tape, const ModelParams& params, bool trainable) {
  const auto put = [&](const Tensor& t) { return trainable ? tape.variable(t) : tape.constant(t); };
  ParamVars pv;
  pv.alpha = put(params.alpha);
  pv.beta = put(params.beta);
  for (const auto& m : params.gamma) pv.gamma.emplace_back(put(m.w0), put(m.w1));
  for (const auto& m : params.eta) pv.eta.emplace_back(put(m.w0), put(m.w1));
  pv.lambda = {put(params.lambda.w0), put(params.lambda.w1)};
  return pv;
}

namespace {

// First layer of an MLP applied to SeLU(g_u || g_v || z_e) for every e = e_vu.
// SeLU acts elementwise, so the product splits into per-node products that
// are gathered per edge, which avoids materializing the concatenation.
Var edge_first_layer(const WaterNetwork& net, Var w0, Var selu_g, Var selu_z, std::size_t latent) {
  const Var w_target = ad::slice_rows(w0, 0, latent);
  const Var w_source = ad::slice_rows(w0, latent, 2 * latent);
  const Var w_edge = ad::slice_rows(w0, 2 * latent, 3 * latent);
  const Var from_target = ad::gather_rows(ad::matmul(selu_g, w_target), net.targets());
  const Var from_source = ad::gather_rows(ad::matmul(selu_g, w_source), net.sources());
  return ad::add(ad::add(from_target, from_source), ad::matmul(selu_z, w_edge));
}

}  // namespace

Var gcn_forward(const ParamVars& params, const WaterNetwork& net, Var demands, Var flows) {
  if (demands.rows() != net.num_nodes() || demands.cols() != 2 || flows.rows() != net.num_edges() ||
      flows.cols() != 2) {
    throw std::invalid_argument("gcn_forward: features must be N_n x 2 and N_e x 2");
  }
  const std::size_t latent = params.alpha.cols();
  Var g = ad::matmul(ad::selu(demands), params.alpha);
  Var z = ad::matmul(ad::selu(flows), params.beta);
  for (std::size_t i = 0; i < params.gamma.size(); ++i) {
    const auto& [g0, g1] = params.gamma[i];
    const Var hidden = edge_first_layer(net, g0, ad::selu(g), ad::selu(z), latent);
    const Var m_edge = ad::matmul(ad::selu(hidden), g1);
    const Var m_node = ad::max_aggregate(m_edge, net.sources(), net.num_nodes());
    const auto& [e0, e1] = params.eta[i];
    g = ad::matmul(ad::selu(ad::matmul(m_node, e0)), e1);
    z = m_edge;
  }
  const Var hidden = edge_first_layer(net, params.lambda.first, ad::selu(g), ad::selu(z), latent);
  const Var residual = ad::matmul(ad::selu(hidden), params.lambda.second);
  const Var q1 = ad::matmul(flows, demands.tape->constant(Tensor::column(std::vector<double>{1.0, 0.0})));
  return ad::add(q1, residual);
}

std::vector<double> antisymmetrize(const WaterNetwork& net, std::span<const double> flows) {
  if (flows.size() != net.num_edges()) throw DataError("antisymmetrize: flow vector has the wrong length");
  std::vector<double> out(flows.size());
  for (std::size_t e = 0; e < flows.size(); ++e) {
    const auto ei = static_cast<EdgeIndex>(e);
    out[e] = net.is_canonical(ei) ? flows[e] : -flows[static_cast<std::size_t>(net.partner(ei))];
  }
  return out;
}

Var antisymmetrize(const WaterNetwork& net, Var flows) {
  if (flows.rows() != net.num_edges() || flows.cols() != 1) throw DataError("antisymmetrize: flows must be N_e x 1");
  std::vector<std::int32_t> keep(net.num_edges());
  Tensor sign(net.num_edges(), 1);
  for (std::size_t e = 0; e < keep.size(); ++e) {
    const auto ei = static_cast<EdgeIndex>(e);
    const bool canonical = net.is_canonical(ei);
    keep[e] = canonical ? ei : net.partner(ei);
    sign[e] = canonical ? 1.0 : -1.0;
  }
  return ad::mul_const(ad::gather_rows(flows, keep), sign);
}

std::vector<double> demands_from_flows(const WaterNetwork& net, std::span<const double> flows) {
  if (flows.size() != net.num_edges()) throw DataError("demands_from_flows: flow vector has the wrong length");
  std::vector<double> d(net.num_nodes(), 0.0);
  for (std::size_t e = 0; e < flows.size(); ++e) d[static_cast<std::size_t>(net.source(static_cast<EdgeIndex>(e)))] -= flows[e];
  return d;
}

Var demands_from_flows(const WaterNetwork& net, Var flows) {
  return ad::scale(ad::scatter_add_rows(flows, net.sources(), net.num_nodes()), -1.0);
}

}  // namespace wdsemu
