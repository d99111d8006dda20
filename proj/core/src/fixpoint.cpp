#include "wdsemu/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "wdsemu/hydraulics.hpp"

namespace wdsemu {

namespace {

double min_reservoir_head(const WaterNetwork& net) {
  if (net.reservoirs().empty()) throw DataError("fixpoint: network has no reservoir");
  double h = std::numeric_limits<double>::infinity();
  for (NodeIndex r : net.reservoirs()) h = std::min(h, net.node(r).head);
  return h;
}

double floor_from_drops(const WaterNetwork& net, std::span<const double> drops) {
  double max_drop = 0.0;
  for (double w : drops) max_drop = std::max(max_drop, w);
  return min_reservoir_head(net) - static_cast<double>(net.num_nodes()) * max_drop;
}

std::vector<double> initial_heads_from_floor(const WaterNetwork& net, double floor) {
  std::vector<double> h(net.num_nodes(), floor);
  for (NodeIndex r : net.reservoirs()) h[static_cast<std::size_t>(r)] = net.node(r).head;
  return h;
}

}  // namespace

double inflow_drop(double resistance, double flow) { return std::max(0.0, -headloss(resistance, flow)); }

double floor_constant(const WaterNetwork& net, std::span<const double> flows) {
  if (flows.size() != net.num_edges()) throw DataError("floor_constant: flow vector has the wrong length");
  std::vector<double> drops(flows.size());
  for (std::size_t e = 0; e < flows.size(); ++e) drops[e] = inflow_drop(net.resistance(static_cast<EdgeIndex>(e)), flows[e]);
  return floor_from_drops(net, drops);
}

FixpointInput make_fixpoint_input(const WaterNetwork& net, std::span<const double> flows, double zeta) {
  FixpointInput in;
  in.initial_heads = initial_heads_from_floor(net, floor_constant(net, flows));
  in.flows.assign(flows.begin(), flows.end());
  in.zeta = zeta;
  return in;
}

Propagation propagate_heads_with_drops(const WaterNetwork& net, std::span<const double> initial_heads,
                                       std::span<const double> drops, bool record_snapshots) {
  const std::size_t n = net.num_nodes();
  if (initial_heads.size() != n || drops.size() != net.num_edges()) {
    throw DataError("propagate_heads: input dimensions do not match the network");
  }
  for (NodeIndex r : net.reservoirs()) {
    if (initial_heads[static_cast<std::size_t>(r)] != net.node(r).head) {
      throw DataError("propagate_heads: reservoir '" + net.node(r).id + "' does not start at its fixed head");
    }
  }

  Propagation out;
  out.heads.assign(initial_heads.begin(), initial_heads.end());
  out.parent_edge.assign(n, -1);
  out.raised_at.assign(n, 0);
  if (record_snapshots) out.trace.snapshots.push_back(out.heads);

  std::vector<double> next(n);
  const auto consumers = net.consumers();
  for (std::size_t sweep = 1;; ++sweep) {
    next = out.heads;
    bool changed = false;
    for (NodeIndex v : consumers) {
      const auto vi = static_cast<std::size_t>(v);
      double best = out.heads[vi];
      EdgeIndex best_edge = -1;
      for (EdgeIndex e : net.out_edges(v)) {
        const double m = out.heads[static_cast<std::size_t>(net.target(e))] - drops[static_cast<std::size_t>(e)];
        if (m > best) {
          best = m;
          best_edge = e;
        }
      }
      if (best_edge >= 0) {
        next[vi] = best;
        out.parent_edge[vi] = best_edge;
        out.raised_at[vi] = sweep;
        changed = true;
      }
    }
    if (!changed) {
      out.trace.converged = true;
      break;
    }
    out.heads.swap(next);
    out.trace.iterations = sweep;
    if (record_snapshots) out.trace.snapshots.push_back(out.heads);
    if (sweep > n) throw std::logic_error("propagate_heads: no fixed point within N_n sweeps");
  }
  return out;
}

Propagation propagate_heads(const WaterNetwork& net, const FixpointInput& input, bool record_snapshots) {
  if (input.flows.size() != net.num_edges()) throw DataError("propagate_heads: flow vector has the wrong length");
  std::vector<double> drops(input.flows.size());
  for (std::size_t e = 0; e < drops.size(); ++e) {
    drops[e] = inflow_drop(net.resistance(static_cast<EdgeIndex>(e)), input.flows[e]);
  }
  return propagate_heads_with_drops(net, input.initial_heads, drops, record_snapshots);
}

Reconstruction reconstruct_flows_demands(const WaterNetwork& net, std::span<const double> heads, double zeta) {
  if (heads.size() != net.num_nodes()) throw DataError("reconstruct_flows_demands: head vector has the wrong length");
  Reconstruction out;
  out.flows.resize(net.num_edges());
  out.demands.assign(net.num_nodes(), 0.0);
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    const auto ei = static_cast<EdgeIndex>(e);
    const auto v = static_cast<std::size_t>(net.source(ei));
    const double dh = heads[v] - heads[static_cast<std::size_t>(net.target(ei))];
    out.flows[e] = flow_from_headloss(net.resistance(ei), dh) + zeta;
    out.demands[v] -= out.flows[e];
  }
  return out;
}

FixpointOutput fixpoint_apply(const WaterNetwork& net, std::span<const double> flows, double zeta) {
  const auto input = make_fixpoint_input(net, flows, zeta);
  auto prop = propagate_heads(net, input);
  auto rec = reconstruct_flows_demands(net, prop.heads, zeta);
  return {std::move(prop.heads), std::move(rec.demands), std::move(rec.flows), std::move(prop.trace)};
}

FixpointVars fixpoint_apply(ad::Tape& tape, const WaterNetwork& net, ad::Var flows, double zeta) {
  using ad::Tensor;
  using ad::Var;
  if (flows.rows() != net.num_edges() || flows.cols() != 1) {
    throw DataError("fixpoint_apply: flows must be an N_e x 1 tensor");
  }
  const auto r = net.resistances();
  Tensor neg_r(net.num_edges(), 1);
  Tensor inv_r(net.num_edges(), 1);
  for (std::size_t e = 0; e < r.size(); ++e) {
    neg_r[e] = -r[e];
    inv_r[e] = 1.0 / r[e];
  }
  const Var drops = ad::relu(ad::mul_const(ad::signed_power(flows, kFlowExponent), neg_r));

  const auto& w = drops.value();
  const auto init = initial_heads_from_floor(net, floor_from_drops(net, w.values()));
  auto prop = std::make_shared<Propagation>(propagate_heads_with_drops(net, init, w.values()));
  const std::size_t iterations = prop->trace.iterations;

  // Backward order: latest-raised nodes first, so each node's gradient is
  // complete before it is passed to the node its head was copied from.
  auto order = std::make_shared<std::vector<NodeIndex>>();
  for (std::size_t v = 0; v < net.num_nodes(); ++v) {
    if (prop->parent_edge[v] >= 0) order->push_back(static_cast<NodeIndex>(v));
  }
  std::stable_sort(order->begin(), order->end(), [&](NodeIndex a, NodeIndex b) {
    return prop->raised_at[static_cast<std::size_t>(a)] > prop->raised_at[static_cast<std::size_t>(b)];
  });
  auto targets = std::make_shared<std::vector<NodeIndex>>(net.targets().begin(), net.targets().end());

  const Var heads = tape.record(Tensor::column(prop->heads), {drops},
                                [drops, prop, order, targets](ad::Tape& t, const Tensor& g) {
                                  auto* gw = t.grad_buffer(drops);
                                  if (!gw) return;
                                  std::vector<double> gh(g.values().begin(), g.values().end());
                                  for (NodeIndex v : *order) {
                                    const auto vi = static_cast<std::size_t>(v);
                                    const auto e = static_cast<std::size_t>(prop->parent_edge[vi]);
                                    gh[static_cast<std::size_t>((*targets)[e])] += gh[vi];
                                    (*gw)[e] -= gh[vi];
                                  }
                                });

  const Var dh = ad::sub(ad::gather_rows(heads, net.sources()), ad::gather_rows(heads, net.targets()));
  const Var q_tilde = ad::add(ad::signed_power(ad::mul_const(dh, inv_r), 1.0 / kFlowExponent),
                              tape.constant(Tensor(net.num_edges(), 1, zeta)));
  const Var d_tilde = ad::scale(ad::scatter_add_rows(q_tilde, net.sources(), net.num_nodes()), -1.0);
  return {heads, q_tilde, d_tilde, iterations};
}

}  // namespace wdsemu
