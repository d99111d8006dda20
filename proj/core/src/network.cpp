#include "wdsemu/network.hpp"

#include <algorithm>
#include <queue>
#include <unordered_set>

#include "wdsemu/hydraulics.hpp"

namespace wdsemu {

WaterNetwork::WaterNetwork(std::vector<Node> nodes, std::vector<Pipe> pipes)
    : nodes_(std::move(nodes)), pipes_(std::move(pipes)) {
  const auto n = nodes_.size();
  {
    std::unordered_set<std::string> seen;
    for (const auto& node : nodes_) {
      if (!seen.insert(node.id).second) throw DataError("duplicate node id '" + node.id + "'");
    }
    seen.clear();
    for (const auto& pipe : pipes_) {
      if (!seen.insert(pipe.id).second) throw DataError("duplicate pipe id '" + pipe.id + "'");
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    (nodes_[v].kind == NodeKind::Reservoir ? reservoirs_ : consumers_).push_back(static_cast<NodeIndex>(v));
  }
  if (reservoirs_.empty()) throw DataError("network has no reservoir");

  const auto m = pipes_.size();
  source_.resize(2 * m);
  target_.resize(2 * m);
  partner_.resize(2 * m);
  canonical_.resize(2 * m);
  resistance_.resize(2 * m);
  std::vector<std::size_t> count(n + 1, 0);
  for (std::size_t p = 0; p < m; ++p) {
    auto& pipe = pipes_[p];
    if (pipe.from < 0 || pipe.to < 0 || static_cast<std::size_t>(pipe.from) >= n ||
        static_cast<std::size_t>(pipe.to) >= n) {
      throw DataError("pipe '" + pipe.id + "' references a node outside the network");
    }
    if (pipe.from == pipe.to) throw DataError("pipe '" + pipe.id + "' is a self loop");
    if (pipe.attr.resistance <= 0.0) {
      pipe.attr.resistance = resistance_coefficient(pipe.attr.length, pipe.attr.diameter, pipe.attr.roughness);
    }
    const std::size_t fwd = 2 * p, bwd = 2 * p + 1;
    source_[fwd] = pipe.from;
    target_[fwd] = pipe.to;
    source_[bwd] = pipe.to;
    target_[bwd] = pipe.from;
    partner_[fwd] = static_cast<EdgeIndex>(bwd);
    partner_[bwd] = static_cast<EdgeIndex>(fwd);
    canonical_[fwd] = pipe.from < pipe.to ? 1 : 0;
    canonical_[bwd] = pipe.from < pipe.to ? 0 : 1;
    resistance_[fwd] = resistance_[bwd] = pipe.attr.resistance;
    ++count[static_cast<std::size_t>(pipe.from) + 1];
    ++count[static_cast<std::size_t>(pipe.to) + 1];
  }

  out_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) out_offset_[v + 1] = out_offset_[v] + count[v + 1];
  out_edges_.resize(2 * m);
  std::vector<std::size_t> fill(out_offset_.begin(), out_offset_.end() - 1);
  for (std::size_t e = 0; e < 2 * m; ++e) {
    out_edges_[fill[static_cast<std::size_t>(source_[e])]++] = static_cast<EdgeIndex>(e);
  }

  std::vector<std::uint8_t> reached(n, 0);
  std::queue<NodeIndex> frontier;
  for (NodeIndex r : reservoirs_) {
    reached[static_cast<std::size_t>(r)] = 1;
    frontier.push(r);
  }
  while (!frontier.empty()) {
    const NodeIndex v = frontier.front();
    frontier.pop();
    for (EdgeIndex e : out_edges(v)) {
      const auto u = static_cast<std::size_t>(target(e));
      if (!reached[u]) {
        reached[u] = 1;
        frontier.push(target(e));
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!reached[v]) throw DataError("node '" + nodes_[v].id + "' is not reachable from any reservoir");
  }

  if (num_edges() <= n) {
    warnings_.push_back("directed edge count " + std::to_string(num_edges()) +
                        " does not exceed node count " + std::to_string(n) +
                        "; mass balance alone may determine the flows");
  }
  for (NodeIndex v : consumers_) {
    if (degree(v) < 2) warnings_.push_back("consumer '" + node(v).id + "' has a single pipe");
  }
}

std::span<const EdgeIndex> WaterNetwork::out_edges(NodeIndex v) const {
  const auto i = static_cast<std::size_t>(v);
  return std::span<const EdgeIndex>(out_edges_).subspan(out_offset_[i], out_offset_[i + 1] - out_offset_[i]);
}

NodeIndex WaterNetwork::find_node(std::string_view id) const {
  for (std::size_t v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v].id == id) return static_cast<NodeIndex>(v);
  }
  return -1;
}

WaterNetwork WaterNetwork::with_diameter_multipliers(std::span<const double> multipliers) const {
  if (multipliers.size() != pipes_.size()) {
    throw DataError("diameter multiplier count does not match pipe count");
  }
  auto pipes = pipes_;
  for (std::size_t p = 0; p < pipes.size(); ++p) {
    pipes[p].attr.diameter *= multipliers[p];
    pipes[p].attr.resistance = 0.0;
  }
  return WaterNetwork(nodes_, std::move(pipes));
}

WaterNetwork WaterNetwork::disjoint_union(std::span<const WaterNetwork* const> parts) {
  std::vector<Node> nodes;
  std::vector<Pipe> pipes;
  NodeIndex offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::string prefix = std::to_string(k) + ":";
    for (const auto& node : parts[k]->nodes()) {
      nodes.push_back(node);
      nodes.back().id = prefix + node.id;
    }
    for (const auto& pipe : parts[k]->pipes()) {
      Pipe copy = pipe;
      copy.id = prefix + pipe.id;
      copy.from += offset;
      copy.to += offset;
      pipes.push_back(std::move(copy));
    }
    offset += static_cast<NodeIndex>(parts[k]->num_nodes());
  }
  return WaterNetwork(std::move(nodes), std::move(pipes));
}

namespace {

std::vector<std::size_t> bfs_hops(const WaterNetwork& net, std::span<const NodeIndex> roots) {
  constexpr auto kUnseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(net.num_nodes(), kUnseen);
  std::queue<NodeIndex> frontier;
  for (NodeIndex r : roots) {
    dist[static_cast<std::size_t>(r)] = 0;
    frontier.push(r);
  }
  while (!frontier.empty()) {
    const NodeIndex v = frontier.front();
    frontier.pop();
    for (EdgeIndex e : net.out_edges(v)) {
      const auto u = static_cast<std::size_t>(net.target(e));
      if (dist[u] == kUnseen) {
        dist[u] = dist[static_cast<std::size_t>(v)] + 1;
        frontier.push(net.target(e));
      }
    }
  }
  return dist;
}

}  // namespace

std::size_t graph_diameter(const WaterNetwork& net) {
  std::size_t diameter = 0;
  for (std::size_t s = 0; s < net.num_nodes(); ++s) {
    const NodeIndex root = static_cast<NodeIndex>(s);
    for (std::size_t d : bfs_hops(net, std::span<const NodeIndex>(&root, 1))) {
      if (d == static_cast<std::size_t>(-1)) throw DataError("graph_diameter: network is disconnected");
      diameter = std::max(diameter, d);
    }
  }
  return diameter;
}

std::vector<std::size_t> reservoir_hop_distance(const WaterNetwork& net) {
  return bfs_hops(net, net.reservoirs());
}

}  // namespace wdsemu
