#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wdsemu::testing {

WaterNetwork make_network(const std::vector<double>& reservoir_heads, std::size_t n_consumers,
                          const std::vector<EdgeSpec>& edges) {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < reservoir_heads.size(); ++i) {
    Node n;
    n.id = "R" + std::to_string(i);
    n.kind = NodeKind::Reservoir;
    n.head = reservoir_heads[i];
    n.elevation = reservoir_heads[i];
    nodes.push_back(n);
  }
  for (std::size_t i = 0; i < n_consumers; ++i) {
    Node n;
    n.id = "J" + std::to_string(i);
    nodes.push_back(n);
  }
  std::vector<Pipe> pipes;
  for (std::size_t p = 0; p < edges.size(); ++p) {
    Pipe pipe;
    pipe.id = "P" + std::to_string(p);
    pipe.from = edges[p].from;
    pipe.to = edges[p].to;
    pipe.attr.length = 1.0;
    pipe.attr.diameter = 1.0;
    pipe.attr.roughness = 1.0;
    pipe.attr.resistance = edges[p].resistance;
    pipes.push_back(pipe);
  }
  return WaterNetwork(std::move(nodes), std::move(pipes));
}

WaterNetwork random_connected(std::mt19937_64& rng, std::size_t n_nodes, std::size_t extra_edges,
                              std::size_t n_reservoirs) {
  std::uniform_real_distribution<double> res(0.5, 5.0), head(80.0, 120.0);
  std::vector<double> heads(n_reservoirs);
  for (auto& h : heads) h = head(rng);
  std::vector<EdgeSpec> edges;
  std::vector<std::pair<NodeIndex, NodeIndex>> used;
  auto has = [&](NodeIndex a, NodeIndex b) {
    for (auto [x, y] : used) {
      if ((x == a && y == b) || (x == b && y == a)) return true;
    }
    return false;
  };
  for (std::size_t v = 1; v < n_nodes; ++v) {
    std::uniform_int_distribution<std::size_t> pick(0, v - 1);
    const auto u = static_cast<NodeIndex>(pick(rng));
    const auto w = static_cast<NodeIndex>(v);
    // Random orientation so both canonical cases occur.
    if (rng() & 1U) {
      edges.push_back({u, w, res(rng)});
    } else {
      edges.push_back({w, u, res(rng)});
    }
    used.emplace_back(u, w);
  }
  std::uniform_int_distribution<std::size_t> any(0, n_nodes - 1);
  for (std::size_t k = 0, tries = 0; k < extra_edges && tries < 50 * (extra_edges + 1); ++tries) {
    const auto a = static_cast<NodeIndex>(any(rng));
    const auto b = static_cast<NodeIndex>(any(rng));
    if (a == b || has(a, b)) continue;
    edges.push_back({a, b, res(rng)});
    used.emplace_back(a, b);
    ++k;
  }
  return make_network(heads, n_nodes - n_reservoirs, edges);
}

WaterNetwork random_tree(std::mt19937_64& rng, std::size_t n_nodes) {
  return random_connected(rng, n_nodes, 0, 1);
}

std::size_t tree_depth(const WaterNetwork& net) {
  std::size_t depth = 0;
  for (auto d : reservoir_hop_distance(net)) depth = std::max(depth, d);
  return depth;
}

ParsedInp load_hanoi() { return load_inp(std::string(WDSEMU_DATA_DIR) + "/hanoi.inp"); }

std::vector<double> random_demands(std::mt19937_64& rng, const WaterNetwork& net, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> d(net.num_nodes(), 0.0);
  for (NodeIndex v : net.consumers()) d[static_cast<std::size_t>(v)] = dist(rng);
  return d;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wdsemu::testing

namespace wdsemu::testing {

namespace {

double edge_flow(double r, double dh) {
  const double s = dh > 0 ? 1.0 : (dh < 0 ? -1.0 : 0.0);
  return s * std::pow(std::abs(dh) / r, 1.0 / 1.852);
}

}  // namespace

std::vector<double> brute_force_heads(const WaterNetwork& net, const std::vector<double>& demands) {
  const auto cons = net.consumers();
  const std::size_t n = cons.size();
  std::vector<double> h(net.num_nodes());
  double hmin = 1e300;
  for (NodeIndex r : net.reservoirs()) hmin = std::min(hmin, net.node(r).head);
  for (std::size_t v = 0; v < h.size(); ++v) {
    h[v] = net.is_reservoir(static_cast<NodeIndex>(v)) ? net.node(static_cast<NodeIndex>(v)).head : hmin - 1.0;
  }
  auto residual = [&](const std::vector<double>& heads) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      const NodeIndex v = cons[i];
      double s = demands[static_cast<std::size_t>(v)];
      for (EdgeIndex e : net.out_edges(v)) {
        s += edge_flow(net.resistance(e), heads[static_cast<std::size_t>(v)] -
                                              heads[static_cast<std::size_t>(net.target(e))]);
      }
      f[i] = s;
    }
    return f;
  };
  auto norm = [](const std::vector<double>& f) {
    double s = 0;
    for (double x : f) s += x * x;
    return std::sqrt(s);
  };
  for (int it = 0; it < 200; ++it) {
    auto f = residual(h);
    if (norm(f) < 1e-13) break;
    std::vector<std::vector<double>> jac(n, std::vector<double>(n + 1));
    for (std::size_t j = 0; j < n; ++j) {
      const auto v = static_cast<std::size_t>(cons[j]);
      const double step = 1e-7 * std::max(1.0, std::abs(h[v]));
      auto hp = h, hm = h;
      hp[v] += step;
      hm[v] -= step;
      auto fp = residual(hp), fm = residual(hm);
      for (std::size_t i = 0; i < n; ++i) jac[i][j] = (fp[i] - fm[i]) / (2 * step);
    }
    for (std::size_t i = 0; i < n; ++i) jac[i][n] = -f[i];
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r) {
        if (std::abs(jac[r][c]) > std::abs(jac[piv][c])) piv = r;
      }
      std::swap(jac[c], jac[piv]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double factor = jac[r][c] / jac[c][c];
        for (std::size_t k = c; k <= n; ++k) jac[r][k] -= factor * jac[c][k];
      }
    }
    // Halve the step until the residual norm drops.
    double t = 1.0;
    const double base = norm(f);
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      auto trial = h;
      for (std::size_t i = 0; i < n; ++i) trial[static_cast<std::size_t>(cons[i])] += t * jac[i][n] / jac[i][i];
      if (norm(residual(trial)) < base) {
        h = trial;
        break;
      }
    }
  }
  return h;
}

}  // namespace wdsemu::testing

namespace wdsemu::testing {

FdResult finite_difference_check(const std::function<double(const std::vector<double>&)>& f,
                                 const std::vector<double>& x, const std::vector<double>& grad, double h,
                                 double rel_tol, double abs_tol, double small) {
  FdResult out;
  auto xp = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    const double fd = (fp - fm) / (2 * h);
    const double err = std::abs(fd - grad[i]);
    const double scale = std::max(std::abs(fd), std::abs(grad[i]));
    const bool ok = scale < small ? err <= abs_tol || err <= rel_tol * scale : err <= rel_tol * scale;
    if (scale >= small) out.worst_rel = std::max(out.worst_rel, err / scale);
    ++out.checked;
    if (!ok) ++out.failed;
  }
  return out;
}

}  // namespace wdsemu::testing
