#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wdsemu/error.hpp"

namespace wdsemu {

using NodeIndex = std::int32_t;
using EdgeIndex = std::int32_t;

enum class NodeKind : std::uint8_t { Reservoir, Consumer };

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Consumer;
  double elevation = 0.0;    // [m]
  double head = 0.0;         // fixed head h* for reservoirs [m], unused otherwise
  double base_demand = 0.0;  // nominal demand from the network file [m^3/s]
  std::string pattern;       // demand pattern id, empty for none
};

struct PipeAttr {
  double length = 0.0;      // [m]
  double diameter = 0.0;    // [m]
  double roughness = 0.0;   // Hazen-Williams C
  double resistance = 0.0;  // cached r_e
};

/// One physical pipe as given by the caller. Directions are not meaningful.
struct Pipe {
  std::string id;
  NodeIndex from = 0;
  NodeIndex to = 0;
  PipeAttr attr;
};

/// Immutable water distribution network.
///
/// Every physical pipe p is stored as the two directed edges 2p (from->to) and
/// 2p+1 (to->from). A flow on a directed edge e_vu is positive when water
/// leaves v towards u.
class WaterNetwork {
 public:
  /// Validates topology and caches resistances. Throws DataError on self
  /// loops, dangling endpoints, missing reservoirs, duplicate ids, or nodes
  /// unreachable from every reservoir.
  WaterNetwork(std::vector<Node> nodes, std::vector<Pipe> pipes);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_pipes() const { return pipes_.size(); }
  std::size_t num_edges() const { return 2 * pipes_.size(); }

  const Node& node(NodeIndex v) const { return nodes_[static_cast<std::size_t>(v)]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Pipe> pipes() const { return pipes_; }
  const Pipe& pipe_of(EdgeIndex e) const { return pipes_[static_cast<std::size_t>(e) / 2]; }

  bool is_reservoir(NodeIndex v) const { return node(v).kind == NodeKind::Reservoir; }
  std::span<const NodeIndex> reservoirs() const { return reservoirs_; }
  std::span<const NodeIndex> consumers() const { return consumers_; }

  NodeIndex source(EdgeIndex e) const { return source_[static_cast<std::size_t>(e)]; }
  NodeIndex target(EdgeIndex e) const { return target_[static_cast<std::size_t>(e)]; }
  EdgeIndex partner(EdgeIndex e) const { return partner_[static_cast<std::size_t>(e)]; }
  /// True for the direction whose (from, to) node indices compare smaller.
  bool is_canonical(EdgeIndex e) const { return canonical_[static_cast<std::size_t>(e)] != 0; }
  double resistance(EdgeIndex e) const { return resistance_[static_cast<std::size_t>(e)]; }

  std::span<const NodeIndex> sources() const { return source_; }
  std::span<const NodeIndex> targets() const { return target_; }
  std::span<const EdgeIndex> partners() const { return partner_; }
  std::span<const double> resistances() const { return resistance_; }

  /// Directed edges leaving v, i.e. every e_vu with u in N(v).
  std::span<const EdgeIndex> out_edges(NodeIndex v) const;
  /// Number of physical pipes at v.
  std::size_t degree(NodeIndex v) const { return out_edges(v).size(); }

  NodeIndex find_node(std::string_view id) const;  // -1 if absent

  /// Non-fatal structural remarks (e.g. N_e <= N_n).
  std::span<const std::string> warnings() const { return warnings_; }

  /// Copy with every pipe diameter scaled by the matching multiplier and the
  /// resistances recomputed.
  WaterNetwork with_diameter_multipliers(std::span<const double> multipliers) const;

  /// Disjoint union of several networks; node ids are prefixed with the part
  /// index. Node and edge indices of part k are offset by the sizes of parts
  /// 0..k-1, so pairing and per-node edge order carry over.
  static WaterNetwork disjoint_union(std::span<const WaterNetwork* const> parts);

 private:
  std::vector<Node> nodes_;
  std::vector<Pipe> pipes_;
  std::vector<NodeIndex> reservoirs_;
  std::vector<NodeIndex> consumers_;
  std::vector<NodeIndex> source_;
  std::vector<NodeIndex> target_;
  std::vector<EdgeIndex> partner_;
  std::vector<std::uint8_t> canonical_;
  std::vector<double> resistance_;
  std::vector<std::size_t> out_offset_;
  std::vector<EdgeIndex> out_edges_;
  std::vector<std::string> warnings_;
};

/// Heads and demands per node, flows per directed edge, for one snapshot.
struct HydraulicState {
  std::vector<double> heads;
  std::vector<double> demands;
  std::vector<double> flows;
  /// Set by producers that guarantee exact antisymmetry of paired flows.
  bool physical = false;
};

/// Longest shortest path (hop count) on the undirected skeleton. Throws
/// DataError for a disconnected network.
std::size_t graph_diameter(const WaterNetwork& net);

/// Hop distance from the nearest reservoir for every node (BFS).
std::vector<std::size_t> reservoir_hop_distance(const WaterNetwork& net);

}  // namespace wdsemu
