#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "test_support.hpp"
#include "wdsemu/hydraulics.hpp"
#include "wdsemu/network.hpp"

using namespace wdsemu;
using wdsemu::testing::make_network;

TEST_CASE("resistance coefficient") {
  CHECK(resistance_coefficient(1, 1, 1) == doctest::Approx(10.667).epsilon(1e-15));
  CHECK(resistance_coefficient(2, 1, 1) == 2.0 * resistance_coefficient(1, 1, 1));

  const double expected = 10.667 * 1000.0 / std::pow(100.0, 1.852);
  CHECK(resistance_coefficient(1000, 1, 100) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(resistance_coefficient(1000, 1, 100) == doctest::Approx(2.109).epsilon(5e-4));

  CHECK_THROWS_WITH_AS(resistance_coefficient(0, 1, 1), doctest::Contains("length"), std::domain_error);
  CHECK_THROWS_WITH_AS(resistance_coefficient(1, -1, 1), doctest::Contains("diameter"), std::domain_error);
  CHECK_THROWS_WITH_AS(resistance_coefficient(1, 1, 0), doctest::Contains("roughness"), std::domain_error);
}

TEST_CASE("headloss and its inverse") {
  CHECK(headloss(1, 0) == 0.0);
  CHECK(headloss(1, -1) == -1.0);
  CHECK(headloss(1, 2) == doctest::Approx(std::exp(1.852 * std::log(2.0))).epsilon(1e-14));
  CHECK(headloss(1, 2) == doctest::Approx(3.6100).epsilon(1e-4));
  CHECK(flow_from_headloss(1, 0) == 0.0);
  CHECK(flow_from_headloss(1, -1) == -1.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r_dist(1e-3, 1e4), q_dist(-10.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double r = r_dist(rng), q = q_dist(rng);
    CHECK(headloss(r, -q) == -headloss(r, q));
    const double back = flow_from_headloss(r, headloss(r, q));
    worst = std::max(worst, std::abs(back - q) / std::abs(q));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("node imbalance") {
  // Node J0 with two pipes: to R0 and to J1.
  auto net = make_network({100.0}, 2, {{1, 0, 1.0}, {1, 2, 1.0}});
  HydraulicState s;
  s.heads.assign(3, 0.0);
  s.flows.assign(4, 0.0);
  s.demands.assign(3, 0.0);
  s.flows[0] = -5.0;  // J0 -> R0
  s.flows[1] = 5.0;
  s.flows[2] = 3.0;   // J0 -> J1
  s.flows[3] = -3.0;
  s.demands[1] = 2.0;
  CHECK(node_imbalance(net, s)[1] == 0.0);
  s.demands[1] = 1.0;
  CHECK(node_imbalance(net, s)[1] == -1.0);

  s.flows.pop_back();
  CHECK_THROWS_AS(node_imbalance(net, s), DataError);
}

TEST_CASE("graph diameter") {
  auto path = make_network({1.0}, 3, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}});
  CHECK(graph_diameter(path) == 3);
  auto star = make_network({1.0}, 4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}});
  CHECK(graph_diameter(star) == 2);
  CHECK(graph_diameter(wdsemu::testing::load_hanoi().network) == 13);
}

TEST_CASE("doubled edges and pairing") {
  std::mt19937_64 rng(3);
  auto net = wdsemu::testing::random_connected(rng, 20, 10, 2);
  REQUIRE(net.num_edges() == 2 * net.num_pipes());
  std::size_t canonical = 0;
  for (EdgeIndex e = 0; e < static_cast<EdgeIndex>(net.num_edges()); ++e) {
    CHECK(net.partner(net.partner(e)) == e);
    CHECK(net.partner(e) == (e ^ 1));
    CHECK(net.source(e) == net.target(net.partner(e)));
    CHECK(net.resistance(e) == net.resistance(net.partner(e)));
    CHECK(net.is_canonical(e) != net.is_canonical(net.partner(e)));
    if (net.is_canonical(e)) {
      CHECK(net.source(e) < net.target(e));
      ++canonical;
    }
  }
  CHECK(canonical == net.num_pipes());
  for (NodeIndex v = 0; v < static_cast<NodeIndex>(net.num_nodes()); ++v) {
    for (EdgeIndex e : net.out_edges(v)) CHECK(net.source(e) == v);
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_network({1.0}, 1, {{1, 1, 1}}), DataError);
  CHECK_THROWS_AS(make_network({1.0}, 1, {{0, 5, 1}}), DataError);
  CHECK_THROWS_AS(make_network({}, 2, {{0, 1, 1}}), DataError);
  CHECK_THROWS_AS(make_network({1.0}, 2, {{0, 1, 1}}), DataError);  // J1 unreachable
}

TEST_CASE("diameter multipliers rescale resistances") {
  std::vector<Node> nodes(2);
  nodes[0].id = "R";
  nodes[0].kind = NodeKind::Reservoir;
  nodes[0].head = 50;
  nodes[1].id = "J";
  Pipe p;
  p.id = "P";
  p.from = 0;
  p.to = 1;
  p.attr = {100.0, 0.3, 120.0, 0.0};
  WaterNetwork net(nodes, {p});
  const std::vector<double> mult{0.5};
  auto scaled = net.with_diameter_multipliers(mult);
  CHECK(scaled.resistance(0) == doctest::Approx(net.resistance(0) * std::pow(0.5, -4.871)).epsilon(1e-12));
  CHECK_THROWS_AS(net.with_diameter_multipliers(std::vector<double>{1.0, 1.0}), DataError);
}

TEST_CASE("disjoint union offsets") {
  auto a = make_network({10.0}, 2, {{0, 1, 1}, {1, 2, 2}});
  auto b = make_network({20.0}, 1, {{1, 0, 3}});
  const WaterNetwork* parts[] = {&a, &b};
  auto u = WaterNetwork::disjoint_union(parts);
  CHECK(u.num_nodes() == 5);
  CHECK(u.num_edges() == 6);
  CHECK(u.reservoirs().size() == 2);
  CHECK(u.source(4) == 4);
  CHECK(u.target(4) == 3);
  CHECK(u.resistance(5) == 3.0);
  CHECK(u.node(3).id == "1:R0");
  CHECK_THROWS_AS(graph_diameter(u), DataError);
}

TEST_CASE("reservoir hop distance") {
  auto net = make_network({1.0}, 3, {{0, 1, 1}, {1, 2, 1}, {0, 3, 1}});
  auto d = reservoir_hop_distance(net);
  CHECK(d == std::vector<std::size_t>{0, 1, 2, 1});
}
