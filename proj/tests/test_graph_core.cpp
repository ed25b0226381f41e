#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <sstream>

#include "rdsnet/errors.hpp"
#include "rdsnet/network.hpp"
#include "rdsnet/network_io.hpp"

using namespace rdsnet;

namespace {

// Four nodes, statuses [1,1,0,0]; three directed and two undirected edges.
// All oracle values below are worked out by hand from the definitions.
PartiallyDirectedNetwork net_a() {
  return make_network(4, {1, 1, 0, 0}, {{0, 1}, {2, 0}, {1, 3}},
                      {{1, 2}, {2, 3}});
}

}  // namespace

TEST_CASE("canonical form accepts a valid network") {
  const auto net = net_a();
  CHECK(net.n == 4);
  CHECK(net.infected_count() == 2);
  CHECK(net.adjacency_entries() == 7);  // 3 directed + 2*2 undirected
  CHECK_NOTHROW(validate_network(net));
}

TEST_CASE("make_network normalizes edge order") {
  // Undirected pairs given (hi, lo) and out-of-order lists are canonicalized.
  const auto net = make_network(4, {1, 1, 0, 0}, {{2, 0}, {0, 1}, {1, 3}},
                                {{3, 2}, {2, 1}});
  CHECK(net == net_a());
}

TEST_CASE("canonical form rejections") {
  CHECK_THROWS_AS(make_network(3, {1, 0, 0}, {{1, 1}}, {}), DataError);
  CHECK_THROWS_AS(make_network(3, {1, 0, 0}, {}, {{2, 2}}), DataError);
  CHECK_THROWS_AS(make_network(3, {1, 0, 0}, {{0, 1}, {0, 1}}, {}), DataError);
  CHECK_THROWS_AS(make_network(3, {1, 0, 0}, {}, {{0, 1}, {1, 0}}), DataError);
  CHECK_THROWS_AS(make_network(3, {1, 0, 0}, {{0, 1}, {1, 0}}, {}), DataError);
  CHECK_THROWS_AS(make_network(3, {1, 0, 0}, {{0, 1}}, {{0, 1}}), DataError);
  CHECK_THROWS_AS(make_network(3, {1, 0, 0}, {{0, 3}}, {}), DataError);
  CHECK_THROWS_AS(make_network(3, {1, 0, 0}, {{-1, 0}}, {}), DataError);
  CHECK_THROWS_AS(make_network(3, {1, 0}, {}, {}), DataError);
  CHECK_THROWS_AS(make_network(3, {1, 0, 2}, {}, {}), DataError);
}

TEST_CASE("validate_network rejects non-canonical storage") {
  PartiallyDirectedNetwork net{3, {1, 0, 0}, {{1, 0}, {0, 1}}, {}};
  CHECK_THROWS_AS(validate_network(net), DataError);
  PartiallyDirectedNetwork und{3, {1, 0, 0}, {}, {{2, 1}}};
  CHECK_THROWS_AS(validate_network(und), DataError);
}

TEST_CASE("degree accessors") {
  const auto net = net_a();
  const std::vector<std::int64_t> want_in{1, 2, 2, 2};
  const std::vector<std::int64_t> want_out{1, 2, 3, 1};
  for (NodeId i = 0; i < net.n; ++i) {
    CHECK(in_degree(net, i) == want_in[static_cast<std::size_t>(i)]);
    CHECK(out_degree(net, i) == want_out[static_cast<std::size_t>(i)]);
  }

  // by-hand: node0 receives only from node2 (status 0); node1 from node0
  // (status 1) and node2 (status 0, undirected); node2 from 1 (status 1)
  // and 3 (status 0); node3 from 1 (status 1) and 2 (status 0).
  CHECK(partial_in_degree(net, 0, 1) == 0);
  CHECK(partial_in_degree(net, 0, 0) == 1);
  CHECK(partial_in_degree(net, 1, 1) == 1);
  CHECK(partial_in_degree(net, 1, 0) == 1);
  CHECK(partial_in_degree(net, 2, 1) == 1);
  CHECK(partial_in_degree(net, 2, 0) == 1);
  CHECK(partial_in_degree(net, 3, 1) == 1);
  CHECK(partial_in_degree(net, 3, 0) == 1);
  for (NodeId i = 0; i < net.n; ++i)
    CHECK(partial_in_degree(net, i, 0) + partial_in_degree(net, i, 1) ==
          in_degree(net, i));
}

TEST_CASE("block edge counts and in-ratios") {
  const auto net = net_a();
  const auto counts = block_edge_counts(net);
  CHECK(counts.e11 == 1);
  CHECK(counts.e10 == 2);
  CHECK(counts.e01 == 2);
  CHECK(counts.e00 == 2);
  CHECK(counts.total() == net.adjacency_entries());

  CHECK(edge_ratio_in(counts, 1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(edge_ratio_in(counts, 1, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(edge_ratio_in(counts, 0, 1) == doctest::Approx(0.5));
  CHECK(edge_ratio_in(counts, 0, 0) == doctest::Approx(0.5));
}

TEST_CASE("network stats on a hand-worked example") {
  const auto s = network_stats(net_a());
  CHECK(s.mu == doctest::Approx(0.5));
  CHECK(s.lambda == doctest::Approx(1.75));
  CHECK(s.alpha == doctest::Approx(3.0 / 7.0));
  // within-density e11/(n1(n1-1)) = 1/2; cross (e10+e01)/(2 n1 n0) = 4/8.
  CHECK(s.h == doctest::Approx(1.0));
  // mean in-degree: infected 3/2, uninfected 4/2; same for out-degree.
  CHECK(s.m == doctest::Approx(0.75));
  CHECK(s.w == doctest::Approx(0.75));
}

TEST_CASE("network stats degenerate guards") {
  CHECK_THROWS_AS(network_stats(make_network(2, {1, 1}, {}, {{0, 1}})),
                  DegenerateError);
  // no cross edges at all
  CHECK_THROWS_AS(
      network_stats(make_network(4, {1, 1, 0, 0}, {{0, 1}}, {{2, 3}})),
      DegenerateError);
}

TEST_CASE("json round trip preserves the network exactly") {
  const auto net = net_a();
  const auto j = network_to_json(net);
  CHECK(j.at("n").get<int>() == 4);
  const auto back = network_from_json(j);
  CHECK(back == net);
}

TEST_CASE("network_from_json validates") {
  auto j = network_to_json(net_a());
  j["directed"].push_back({3, 3});
  CHECK_THROWS_AS(network_from_json(j), DataError);
}

TEST_CASE("write/read network through a file") {
  const auto net = net_a();
  const std::string path = "graph_core_roundtrip.json";
  write_network(path, net);
  const auto back = read_network(path);
  CHECK(back == net);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_network(path), DataError);
}
