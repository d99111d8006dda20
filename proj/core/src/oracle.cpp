#include "wdsemu/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <limits>

#include "wdsemu/hydraulics.hpp"

namespace wdsemu {

namespace {

struct Evaluation {
  std::vector<double> flows;     // per physical pipe, from -> to
  std::vector<double> residual;  // per unknown
  double max_abs = 0.0;
  double norm2 = 0.0;
};

}  // namespace

HydraulicState solve_steady_state(const WaterNetwork& net, std::span<const double> demands,
                                  const SolverConfig& cfg, SolveReport* report) {
  const std::size_t n = net.num_nodes();
  if (demands.size() != n) throw DataError("demand vector has the wrong length");
  for (NodeIndex v : net.consumers()) {
    const double d = demands[static_cast<std::size_t>(v)];
    if (!(d >= 0.0)) throw DataError("negative or invalid demand at node '" + net.node(v).id + "'");
  }

  std::vector<int> unknown(n, -1);
  int n_unknown = 0;
  for (NodeIndex v : net.consumers()) unknown[static_cast<std::size_t>(v)] = n_unknown++;

  double min_head = std::numeric_limits<double>::infinity();
  for (NodeIndex r : net.reservoirs()) min_head = std::min(min_head, net.node(r).head);
  std::vector<double> heads(n);
  for (std::size_t v = 0; v < n; ++v) heads[v] = net.is_reservoir(static_cast<NodeIndex>(v)) ? net.nodes()[v].head : min_head - 1.0;

  const auto pipes = net.pipes();
  auto evaluate = [&](const std::vector<double>& h) {
    Evaluation ev;
    ev.flows.resize(pipes.size());
    ev.residual.assign(static_cast<std::size_t>(n_unknown), 0.0);
    for (NodeIndex v : net.consumers()) {
      ev.residual[static_cast<std::size_t>(unknown[static_cast<std::size_t>(v)])] = demands[static_cast<std::size_t>(v)];
    }
    for (std::size_t p = 0; p < pipes.size(); ++p) {
      const auto a = static_cast<std::size_t>(pipes[p].from), b = static_cast<std::size_t>(pipes[p].to);
      const double q = flow_from_headloss(pipes[p].attr.resistance, h[a] - h[b]);
      ev.flows[p] = q;
      if (unknown[a] >= 0) ev.residual[static_cast<std::size_t>(unknown[a])] += q;
      if (unknown[b] >= 0) ev.residual[static_cast<std::size_t>(unknown[b])] -= q;
    }
    for (double f : ev.residual) {
      ev.max_abs = std::max(ev.max_abs, std::abs(f));
      ev.norm2 += f * f;
    }
    return ev;
  };

  Evaluation ev = evaluate(heads);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::SparseMatrix<double> jac(n_unknown, n_unknown);
  Eigen::VectorXd rhs(n_unknown);
  bool analyzed = false;
  const double inv_x = 1.0 / kFlowExponent;

  // Jacobian of the mass-balance residual: a Laplacian weighted by dq/dh.
  auto newton_direction = [&]() -> Eigen::VectorXd {
    triplets.clear();
    for (std::size_t p = 0; p < pipes.size(); ++p) {
      const auto a = static_cast<std::size_t>(pipes[p].from), b = static_cast<std::size_t>(pipes[p].to);
      const double dh = std::abs(heads[a] - heads[b]);
      const double g =
          inv_x * std::pow(pipes[p].attr.resistance, -inv_x) * std::pow(dh + cfg.regularization, inv_x - 1.0);
      const int ia = unknown[a], ib = unknown[b];
      if (ia >= 0) triplets.emplace_back(ia, ia, g);
      if (ib >= 0) triplets.emplace_back(ib, ib, g);
      if (ia >= 0 && ib >= 0) {
        triplets.emplace_back(ia, ib, -g);
        triplets.emplace_back(ib, ia, -g);
      }
    }
    jac.setFromTriplets(triplets.begin(), triplets.end());
    if (!analyzed) {
      solver.analyzePattern(jac);
      analyzed = true;
    }
    solver.factorize(jac);
    if (solver.info() != Eigen::Success) throw NumericError("oracle: singular Jacobian (disconnected component?)");
    for (int i = 0; i < n_unknown; ++i) rhs[i] = -ev.residual[static_cast<std::size_t>(i)];
    Eigen::VectorXd step = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !step.allFinite()) throw NumericError("oracle: linear solve failed");
    return step;
  };
  auto apply = [&](const Eigen::VectorXd& step, double t) {
    std::vector<double> trial(heads);
    for (std::size_t v = 0; v < n; ++v) {
      if (unknown[v] >= 0) trial[v] = heads[v] + t * step[unknown[v]];
    }
    return trial;
  };

  double last_update = n_unknown == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = n_unknown == 0;
  while (!converged && iter < cfg.max_iterations) {
    ++iter;
    const Eigen::VectorXd step = newton_direction();
    double t = 1.0;
    std::vector<double> trial;
    Evaluation trial_ev;
    for (int ls = 0; ls < 40; ++ls) {
      trial = apply(step, t);
      trial_ev = evaluate(trial);
      if (trial_ev.norm2 < (1.0 - 1e-4 * t) * ev.norm2) break;
      t *= 0.5;
    }
    heads = std::move(trial);
    ev = std::move(trial_ev);
    last_update = t * step.cwiseAbs().maxCoeff();
    converged = ev.max_abs <= cfg.balance_tolerance && last_update <= cfg.head_tolerance;
  }
  if (converged) {
    // Full steps while they still help push the imbalance to rounding level.
    for (int polish = 0; polish < 2 && n_unknown > 0; ++polish) {
      const Eigen::VectorXd step = newton_direction();
      auto trial = apply(step, 1.0);
      auto trial_ev = evaluate(trial);
      if (!(trial_ev.norm2 < ev.norm2)) break;
      heads = std::move(trial);
      ev = std::move(trial_ev);
    }
  }
  if (report != nullptr) {
    report->iterations = iter;
    report->max_imbalance = ev.max_abs;
    report->last_head_update = last_update;
  }
  if (!converged) {
    throw NumericError("oracle: no convergence after " + std::to_string(iter) +
                       " iterations, max imbalance " + std::to_string(ev.max_abs));
  }

  HydraulicState state;
  state.heads = heads;
  state.flows.resize(net.num_edges());
  for (std::size_t p = 0; p < pipes.size(); ++p) {
    state.flows[2 * p] = ev.flows[p];
    state.flows[2 * p + 1] = -ev.flows[p];
  }
  state.demands.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (unknown[v] >= 0) {
      state.demands[v] = demands[v];
    } else {
      double out = 0.0;
      for (EdgeIndex e : net.out_edges(static_cast<NodeIndex>(v))) out += state.flows[static_cast<std::size_t>(e)];
      state.demands[v] = -out;
    }
  }
  state.physical = true;
  return state;
}

std::vector<BatchItem> batch_solve(const WaterNetwork& net, const Matrix& demand_series, const SolverConfig& cfg) {
  std::vector<BatchItem> out(static_cast<std::size_t>(demand_series.rows()));
  std::vector<double> row(static_cast<std::size_t>(demand_series.cols()));
  for (Eigen::Index t = 0; t < demand_series.rows(); ++t) {
    auto& item = out[static_cast<std::size_t>(t)];
    for (Eigen::Index v = 0; v < demand_series.cols(); ++v) row[static_cast<std::size_t>(v)] = demand_series(t, v);
    const auto start = std::chrono::steady_clock::now();
    try {
      item.state = solve_steady_state(net, row, cfg);
    } catch (const std::exception& err) {
      item.error = err.what();
    }
    item.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

void solve_scenarios(ScenarioSet& set, const SolverConfig& cfg) {
  for (std::size_t k = 0; k < set.scenarios.size(); ++k) {
    auto& sc = set.scenarios[k];
    const WaterNetwork net = set.network_for(k);
    auto results = batch_solve(net, sc.demands, cfg);
    sc.heads.resize(sc.demands.rows(), static_cast<Eigen::Index>(net.num_nodes()));
    sc.flows.resize(sc.demands.rows(), static_cast<Eigen::Index>(net.num_edges()));
    for (std::size_t t = 0; t < results.size(); ++t) {
      if (!results[t].state) {
        throw NumericError("scenario " + std::to_string(k) + " step " + std::to_string(t) + ": " + results[t].error);
      }
      const auto& st = *results[t].state;
      for (std::size_t v = 0; v < st.heads.size(); ++v) sc.heads(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(v)) = st.heads[v];
      for (std::size_t e = 0; e < st.flows.size(); ++e) sc.flows(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(e)) = st.flows[e];
    }
  }
}

}  // namespace wdsemu
