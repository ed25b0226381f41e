#ifndef RDSNET_NETWORK_HPP
#define RDSNET_NETWORK_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rdsnet/errors.hpp"

namespace rdsnet {

using NodeId = std::int32_t;
using Status = std::uint8_t;  // 0 or 1, 1 = infected
using Edge = std::pair<NodeId, NodeId>;

// Partially directed network over nodes 0..n-1. Canonical form:
//   - directed holds ordered pairs (i,j), no (j,i) twin, no {i,j} twin
//   - undirected holds unordered pairs stored as (lo,hi)
//   - both vectors sorted and duplicate-free, no self-pairs
// Values are immutable after construction; all operations are pure.
struct PartiallyDirectedNetwork {
  NodeId n = 0;
  std::vector<Status> status;
  std::vector<Edge> directed;
  std::vector<Edge> undirected;

  NodeId infected_count() const {
    NodeId c = 0;
    for (Status z : status) c += (z != 0);
    return c;
  }

  // Adjacency entries: an undirected edge counts as two (y_ij and y_ji).
  std::int64_t adjacency_entries() const {
    return static_cast<std::int64_t>(directed.size()) +
           2 * static_cast<std::int64_t>(undirected.size());
  }

  bool operator==(const PartiallyDirectedNetwork&) const = default;
};

// Ordered-pair adjacency counts per status block. An undirected edge between
// statuses k != l adds 1 to e_kl and 1 to e_lk; a within-status undirected
// edge adds 2 to e_kk.
struct EdgeBlockCounts {
  std::int64_t e11 = 0;
  std::int64_t e10 = 0;
  std::int64_t e01 = 0;
  std::int64_t e00 = 0;

  std::int64_t total() const { return e11 + e10 + e01 + e00; }
  std::int64_t get(int k, int l) const {
    return k ? (l ? e11 : e10) : (l ? e01 : e00);
  }
};

struct NetworkStats {
  double h = 0;       // within-infected vs cross tie-probability ratio
  double m = 0;       // mean in-degree, infected over uninfected
  double w = 0;       // mean out-degree, infected over uninfected
  double alpha = 0;   // directed share of adjacency entries
  double lambda = 0;  // adjacency entries per node
  double mu = 0;      // prevalence
};

namespace detail {

inline void check_node(const PartiallyDirectedNetwork& net, NodeId i) {
  if (i < 0 || i >= net.n)
    throw UsageError("node id " + std::to_string(i) + " out of range [0, " +
                     std::to_string(net.n) + ")");
}

inline void check_status_value(int k) {
  if (k != 0 && k != 1) throw UsageError("status must be 0 or 1");
}

}  // namespace detail

// Validates the canonical-form invariants; throws DataError on violation.
inline void validate_network(const PartiallyDirectedNetwork& net) {
  if (net.n < 0) throw DataError("negative node count");
  if (static_cast<NodeId>(net.status.size()) != net.n)
    throw DataError("status vector length does not match n");
  for (Status z : net.status)
    if (z > 1) throw DataError("status values must be 0 or 1");

  auto check_pair = [&](const Edge& e, bool ordered_lo_hi) {
    if (e.first < 0 || e.first >= net.n || e.second < 0 || e.second >= net.n)
      throw DataError("edge endpoint out of range");
    if (e.first == e.second) throw DataError("self-pair not allowed");
    if (ordered_lo_hi && e.first > e.second)
      throw DataError("undirected pair must be stored (lo, hi)");
  };
  for (const Edge& e : net.directed) check_pair(e, false);
  for (const Edge& e : net.undirected) check_pair(e, true);

  if (!std::is_sorted(net.directed.begin(), net.directed.end()))
    throw DataError("directed edges not sorted");
  if (!std::is_sorted(net.undirected.begin(), net.undirected.end()))
    throw DataError("undirected edges not sorted");
  if (std::adjacent_find(net.directed.begin(), net.directed.end()) !=
      net.directed.end())
    throw DataError("duplicate directed edge");
  if (std::adjacent_find(net.undirected.begin(), net.undirected.end()) !=
      net.undirected.end())
    throw DataError("duplicate undirected edge");

  // Canonical form: directed (i,j) excludes directed (j,i) and undirected {i,j}.
  for (const Edge& e : net.directed) {
    Edge rev{e.second, e.first};
    if (std::binary_search(net.directed.begin(), net.directed.end(), rev))
      throw DataError("anti-parallel directed pair (" + std::to_string(e.first) +
                      "," + std::to_string(e.second) + ")");
    Edge und{std::min(e.first, e.second), std::max(e.first, e.second)};
    if (std::binary_search(net.undirected.begin(), net.undirected.end(), und))
      throw DataError("pair carries both a directed and an undirected edge");
  }
}

// Builds a canonical network from unsorted edge lists; rejects non-canonical
// input rather than repairing it (repair lives in acm::simplify / ingest).
inline PartiallyDirectedNetwork make_network(NodeId n, std::vector<Status> status,
                                             std::vector<Edge> directed,
                                             std::vector<Edge> undirected) {
  for (Edge& e : undirected)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(directed.begin(), directed.end());
  std::sort(undirected.begin(), undirected.end());
  PartiallyDirectedNetwork net{n, std::move(status), std::move(directed),
                               std::move(undirected)};
  validate_network(net);
  return net;
}

inline std::int64_t in_degree(const PartiallyDirectedNetwork& net, NodeId i) {
  detail::check_node(net, i);
  std::int64_t d = 0;
  for (const Edge& e : net.directed) d += (e.second == i);
  for (const Edge& e : net.undirected) d += (e.first == i || e.second == i);
  return d;
}

inline std::int64_t out_degree(const PartiallyDirectedNetwork& net, NodeId i) {
  detail::check_node(net, i);
  std::int64_t d = 0;
  for (const Edge& e : net.directed) d += (e.first == i);
  for (const Edge& e : net.undirected) d += (e.first == i || e.second == i);
  return d;
}

// Incoming-plus-undirected connections of i that originate from status-k nodes.
inline std::int64_t partial_in_degree(const PartiallyDirectedNetwork& net,
                                      NodeId i, int k) {
  detail::check_node(net, i);
  detail::check_status_value(k);
  std::int64_t d = 0;
  for (const Edge& e : net.directed)
    if (e.second == i && net.status[e.first] == k) ++d;
  for (const Edge& e : net.undirected) {
    if (e.first == i && net.status[e.second] == k) ++d;
    if (e.second == i && net.status[e.first] == k) ++d;
  }
  return d;
}

inline EdgeBlockCounts block_edge_counts(const PartiallyDirectedNetwork& net) {
  EdgeBlockCounts c;
  auto add = [&](NodeId from, NodeId to) {
    const bool zi = net.status[from] != 0;
    const bool zj = net.status[to] != 0;
    if (zi && zj)
      ++c.e11;
    else if (zi && !zj)
      ++c.e10;
    else if (!zi && zj)
      ++c.e01;
    else
      ++c.e00;
  };
  for (const Edge& e : net.directed) add(e.first, e.second);
  for (const Edge& e : net.undirected) {
    add(e.first, e.second);
    add(e.second, e.first);
  }
  return c;
}

// R^in_{l,k}: share of the adjacency entries incoming to status l that
// originate from status k.
inline double edge_ratio_in(const EdgeBlockCounts& counts, int l, int k) {
  detail::check_status_value(l);
  detail::check_status_value(k);
  const std::int64_t denom = counts.get(0, l) + counts.get(1, l);
  if (denom == 0)
    throw DegenerateError("no incoming edges toward status " + std::to_string(l));
  return static_cast<double>(counts.get(k, l)) / static_cast<double>(denom);
}

inline NetworkStats network_stats(const PartiallyDirectedNetwork& net) {
  const std::int64_t n1 = net.infected_count();
  const std::int64_t n0 = net.n - n1;
  if (n1 == 0 || n0 == 0)
    throw DegenerateError("both status groups must be non-empty for h/m/w");

  const EdgeBlockCounts counts = block_edge_counts(net);
  NetworkStats s;
  s.mu = static_cast<double>(n1) / static_cast<double>(net.n);
  const std::int64_t entries = net.adjacency_entries();
  s.lambda = static_cast<double>(entries) / static_cast<double>(net.n);
  s.alpha = entries == 0 ? 0.0
                         : static_cast<double>(net.directed.size()) /
                               static_cast<double>(entries);

  const double cross_density = static_cast<double>(counts.e10 + counts.e01) /
                               (2.0 * static_cast<double>(n1) *
                                static_cast<double>(n0));
  if (cross_density == 0.0)
    throw DegenerateError("homophily undefined: zero cross-status density");
  const double within_density =
      n1 > 1 ? static_cast<double>(counts.e11) /
                   (static_cast<double>(n1) * static_cast<double>(n1 - 1))
             : 0.0;
  s.h = within_density / cross_density;

  std::int64_t in1 = 0, in0 = 0, out1 = 0, out0 = 0;
  for (const Edge& e : net.directed) {
    (net.status[e.second] ? in1 : in0) += 1;
    (net.status[e.first] ? out1 : out0) += 1;
  }
  for (const Edge& e : net.undirected) {
    (net.status[e.first] ? in1 : in0) += 1;
    (net.status[e.second] ? in1 : in0) += 1;
    (net.status[e.first] ? out1 : out0) += 1;
    (net.status[e.second] ? out1 : out0) += 1;
  }
  const double din1 = static_cast<double>(in1) / static_cast<double>(n1);
  const double din0 = static_cast<double>(in0) / static_cast<double>(n0);
  const double dout1 = static_cast<double>(out1) / static_cast<double>(n1);
  const double dout0 = static_cast<double>(out0) / static_cast<double>(n0);
  if (din0 == 0.0)
    throw DegenerateError("attractiveness undefined: uninfected in-degree is 0");
  if (dout0 == 0.0)
    throw DegenerateError("activity undefined: uninfected out-degree is 0");
  s.m = din1 / din0;
  s.w = dout1 / dout0;
  return s;
}

}  // namespace rdsnet

#endif  // RDSNET_NETWORK_HPP
