#include "wdsemu/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "wdsemu/error.hpp"

namespace wdsemu {

using ad::Tensor;
using ad::Var;

void TrainConfig::validate() const {
  const auto fail = [](const std::string& what) { throw std::invalid_argument("train config: " + what); };
  if (k_min < 1 || k_max > 64 || k_min > k_max) fail("K range must satisfy 1 <= k_min <= k_max <= 64");
  if (!(rho > 0.0 && rho < 1.0)) fail("rho must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(lr > 0.0)) fail("lr must be positive");
  if (scheduler_step == 0) fail("scheduler_step must be positive");
  if (!(scheduler_decay > 0.0 && scheduler_decay <= 1.0)) fail("scheduler_decay must lie in (0, 1]");
  if (batch_size == 0) fail("batch_size must be positive");
  if (!(grad_clip_norm > 0.0)) fail("grad_clip_norm must be positive");
  if (layers == 0 || latent == 0) fail("layers and latent_dim must be positive");
  if (eval_iterations == 0) fail("eval_iterations must be positive");
  if (!(zeta >= 0.0)) fail("zeta must be non-negative");
}

double TrainConfig::learning_rate(std::size_t epoch) const {
  return lr * std::pow(scheduler_decay, static_cast<double>(epoch / scheduler_step));
}

std::vector<Sample> make_samples(const ScenarioSet& set, SplitPart part) {
  std::vector<Sample> out;
  for (std::size_t k = 0; k < set.scenarios.size(); ++k) {
    const Scenario& sc = set.scenarios[k];
    const auto steps = static_cast<std::size_t>(sc.demands.rows());
    const ScenarioSplit split = split_time_steps(steps);
    IndexRange range{0, steps};
    if (part == SplitPart::train) range = split.train;
    if (part == SplitPart::val) range = split.val;
    if (part == SplitPart::test) range = split.test;
    if (range.size() == 0) continue;
    auto net = std::make_shared<const WaterNetwork>(set.network_for(k));
    for (std::size_t t = range.begin; t < range.end; ++t) {
      Sample s;
      s.net = net;
      s.scenario = k;
      s.step = t;
      const auto row = sc.demands.row(static_cast<Eigen::Index>(t));
      s.demands.assign(row.data(), row.data() + row.size());
      if (sc.solved()) {
        const auto h = sc.heads.row(static_cast<Eigen::Index>(t));
        const auto q = sc.flows.row(static_cast<Eigen::Index>(t));
        s.heads.assign(h.data(), h.data() + h.size());
        s.flows.assign(q.data(), q.data() + q.size());
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

Batch make_batch(std::span<const Sample* const> samples) {
  if (samples.empty()) throw std::invalid_argument("make_batch: empty batch");
  std::vector<const WaterNetwork*> parts;
  for (const Sample* s : samples) {
    if (s->demands.size() != s->net->num_nodes()) throw DataError("make_batch: demand vector has the wrong length");
    parts.push_back(s->net.get());
  }
  Batch b{samples.size() == 1 ? *samples[0]->net : WaterNetwork::disjoint_union(parts), {}, {0}, {0}};
  for (const Sample* s : samples) {
    b.demands.insert(b.demands.end(), s->demands.begin(), s->demands.end());
    b.node_offset.push_back(b.node_offset.back() + s->net->num_nodes());
    b.edge_offset.push_back(b.edge_offset.back() + s->net->num_edges());
  }
  return b;
}

namespace {

struct IterationVars {
  Var flows_gcn;
  Var demands_gcn;
  FixpointVars phys;
};

IterationVars iterate_once(ad::Tape& tape, const ParamVars& params, const WaterNetwork& net, Var d, Var q,
                           double zeta) {
  const Var q_hat = antisymmetrize(net, gcn_forward(params, net, d, q));
  const Var d_hat = demands_from_flows(net, q_hat);
  return {q_hat, d_hat, fixpoint_apply(tape, net, q_hat, zeta)};
}

Tensor two_columns(const Tensor& a, const Tensor& b) {
  Tensor out(a.rows(), 2);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    out(i, 0) = a[i];
    out(i, 1) = b[i];
  }
  return out;
}

}  // namespace

EmulationVars emulate(ad::Tape& tape, const ParamVars& params, const ModelParams& values, const WaterNetwork& net,
                      std::span<const double> demands, std::size_t iterations, double zeta, bool full_unroll) {
  if (iterations == 0) throw std::invalid_argument("emulate: at least one iteration is required");
  const Features f = init_features(net, demands);
  Tensor d_true(net.num_nodes(), 1);
  for (std::size_t v = 0; v < net.num_nodes(); ++v) d_true[v] = f.demands(v, 0);

  Var d = tape.constant(f.demands);
  Var q = tape.constant(f.flows);
  std::size_t k = 0;
  if (!full_unroll && iterations > 1) {
    ad::Tape scratch(false);
    const ParamVars fixed = bind_params(scratch, values, false);
    const std::size_t mark = scratch.size();
    Tensor dv = f.demands;
    Tensor qv = f.flows;
    for (; k + 1 < iterations; ++k) {
      const auto it = iterate_once(scratch, fixed, net, scratch.constant(dv), scratch.constant(qv), zeta);
      dv = two_columns(d_true, it.demands_gcn.value());
      qv = two_columns(it.flows_gcn.value(), it.phys.flows.value());
      scratch.truncate(mark);
    }
    d = tape.constant(std::move(dv));
    q = tape.constant(std::move(qv));
  }
  const Var d_true_var = tape.constant(d_true);
  IterationVars it = iterate_once(tape, params, net, d, q, zeta);
  for (++k; k < iterations; ++k) {
    const std::vector<Var> dcols{d_true_var, it.demands_gcn};
    const std::vector<Var> qcols{it.flows_gcn, it.phys.flows};
    it = iterate_once(tape, params, net, ad::concat_cols(dcols), ad::concat_cols(qcols), zeta);
  }
  return {it.flows_gcn, it.demands_gcn, it.phys.heads, it.phys.flows, it.phys.demands};
}

Emulation emulate(const ModelParams& params, const WaterNetwork& net, std::span<const double> demands,
                  std::size_t iterations, double zeta) {
  ad::Tape tape(false);
  const ParamVars pv = bind_params(tape, params, false);
  const EmulationVars out = emulate(tape, pv, params, net, demands, iterations, zeta, false);
  const auto vec = [](Var v) {
    const auto s = v.value().values();
    return std::vector<double>(s.begin(), s.end());
  };
  return {vec(out.flows_gcn), vec(out.demands_gcn), vec(out.heads), vec(out.flows_phys), vec(out.demands_phys)};
}

Var training_loss(const WaterNetwork& net, std::span<const double> demands, const EmulationVars& out, double rho,
                  double delta) {
  ad::Tape& tape = *out.flows_gcn.tape;
  Tensor d_true(net.num_nodes(), 1);
  for (NodeIndex v : net.consumers()) d_true[static_cast<std::size_t>(v)] = demands[static_cast<std::size_t>(v)];
  const Var target = tape.constant(std::move(d_true));
  std::vector<std::int32_t> all_edges(net.num_edges());
  std::iota(all_edges.begin(), all_edges.end(), 0);
  const auto consumers = net.consumers();
  const Var l_gcn = ad::mean_abs_diff(target, out.demands_gcn, consumers);
  const Var l_phys = ad::mean_abs_diff(target, out.demands_phys, consumers);
  const Var l_flow = ad::mean_abs_diff(out.flows_gcn, out.flows_phys, all_edges);
  return ad::add(l_gcn, ad::add(ad::scale(l_phys, rho), ad::scale(l_flow, delta)));
}

Adam::Adam(const ModelParams& like, double beta1, double beta2, double eps) : beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& [name, t] : like.named()) {
    m_.emplace_back(t->rows(), t->cols());
    v_.emplace_back(t->rows(), t->cols());
  }
}

void Adam::step(ModelParams& params, std::span<const Tensor> grads, double lr) {
  auto named = params.named();
  if (grads.size() != named.size() || m_.size() != named.size()) throw std::invalid_argument("Adam::step: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < named.size(); ++k) {
    Tensor& w = *named[k].second;
    const Tensor& g = grads[k];
    if (!w.same_shape(g)) throw std::invalid_argument("Adam::step: gradient shape mismatch for " + named[k].first);
    for (std::size_t i = 0; i < w.size(); ++i) {
      m_[k][i] = beta1_ * m_[k][i] + (1.0 - beta1_) * g[i];
      v_[k][i] = beta2_ * v_[k][i] + (1.0 - beta2_) * g[i] * g[i];
      w[i] -= lr * (m_[k][i] / c1) / (std::sqrt(v_[k][i] / c2) + eps_);
    }
  }
}

double clip_global_norm(std::span<Tensor> grads, double max_norm) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.mat().squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double s = max_norm / norm;
    for (auto& g : grads) g.mat() *= s;
  }
  return norm;
}

double loss_and_gradients(const ModelParams& params, const WaterNetwork& net, std::span<const double> demands,
                          std::size_t iterations, const TrainConfig& cfg, std::vector<Tensor>* grads) {
  ad::Tape tape(grads != nullptr);
  const ParamVars pv = bind_params(tape, params, grads != nullptr);
  const EmulationVars out = emulate(tape, pv, params, net, demands, iterations, cfg.zeta, cfg.full_unroll);
  const Var loss = training_loss(net, demands, out, cfg.rho, cfg.delta);
  const double value = loss.value()[0];
  if (grads && std::isfinite(value)) {
    tape.backward(loss);
    grads->clear();
    for (Var v : pv.all()) grads->push_back(tape.grad(v));
  }
  return value;
}

namespace {

[[noreturn]] void report_non_finite(std::span<const Sample* const> batch, const ModelParams& params,
                                    std::size_t iterations, const TrainConfig& cfg) {
  std::ostringstream msg;
  msg << "non-finite training loss";
  for (const Sample* s : batch) {
    const double l = loss_and_gradients(params, *s->net, s->demands, iterations, cfg, nullptr);
    if (std::isfinite(l)) continue;
    msg << " at scenario " << s->scenario << " step " << s->step << " (K=" << iterations << "); demands:";
    for (std::size_t v = 0; v < s->demands.size(); ++v) msg << ' ' << s->net->node(static_cast<NodeIndex>(v)).id << '=' << s->demands[v];
    throw NumericError(msg.str());
  }
  msg << " for the batch, although every sample is finite on its own";
  throw NumericError(msg.str());
}

}  // namespace

StepResult train_epoch_step(ModelParams& params, Adam& adam, std::span<const Sample* const> batch,
                            std::size_t iterations, double lr, const TrainConfig& cfg) {
  const Batch b = make_batch(batch);
  std::vector<Tensor> grads;
  StepResult r;
  r.loss = loss_and_gradients(params, b.net, b.demands, iterations, cfg, &grads);
  if (!std::isfinite(r.loss)) report_non_finite(batch, params, iterations, cfg);
  r.grad_norm = clip_global_norm(grads, cfg.grad_clip_norm);
  if (!std::isfinite(r.grad_norm)) throw NumericError("non-finite gradient norm at loss " + std::to_string(r.loss));
  adam.step(params, grads, lr);
  return r;
}

std::vector<EpochRecord> train(ModelParams& params, std::span<const Sample> samples, const TrainConfig& cfg,
                               const EpochCallback& on_epoch) {
  cfg.validate();
  if (samples.empty()) throw DataError("train: no training samples");
  Adam adam(params, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> draw_k(cfg.k_min, cfg.k_max);
  std::vector<const Sample*> order;
  for (const auto& s : samples) order.push_back(&s);

  std::vector<EpochRecord> history;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::size_t k = draw_k(rng);
    const double lr = cfg.learning_rate(epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double weighted = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const std::span<const Sample* const> batch(order.data() + begin, end - begin);
      weighted += train_epoch_step(params, adam, batch, k, lr, cfg).loss * static_cast<double>(batch.size());
    }
    history.push_back({epoch, weighted / static_cast<double>(order.size()), lr, k});
    if (on_epoch) on_epoch(history.back(), params);
  }
  return history;
}

void write_loss_curve(const std::string& path, std::span<const EpochRecord> records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write loss curve to '" + path + "'");
  out.precision(17);
  out << "epoch,loss,lr,K\n";
  for (const auto& r : records) out << r.epoch << ',' << r.loss << ',' << r.lr << ',' << r.k << '\n';
}

}  // namespace wdsemu
