#ifndef RDSNET_ACM_HPP
#define RDSNET_ACM_HPP

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rdsnet/errors.hpp"
#include "rdsnet/network.hpp"
#include "rdsnet/rng.hpp"

namespace rdsnet {

// Six stub counts of one node: incoming from status k, outgoing to status k,
// undirected to status k.
struct DegreeVector {
  std::int32_t in1 = 0;
  std::int32_t in0 = 0;
  std::int32_t out1 = 0;
  std::int32_t out0 = 0;
  std::int32_t und1 = 0;
  std::int32_t und0 = 0;

  auto operator<=>(const DegreeVector&) const = default;
};

// Mean of each stub-count component for one status group.
struct StatusMeans {
  double in1 = 0, in0 = 0, out1 = 0, out0 = 0, und1 = 0, und0 = 0;

  std::array<double, 6> as_array() const { return {in1, in0, out1, out0, und1, und0}; }
};

// Joint degree law per status. The default family draws the six components
// independently Poisson with the given means; the tag leaves room for other
// parameterizations.
struct DegreeDistributionSpec {
  std::string family = "poisson";
  StatusMeans status1;
  StatusMeans status0;
};

struct CompatibilityResult {
  bool pass = true;
  std::vector<std::string> violations;
};

// Checks the five mean equalities under which the realized degree law
// converges to the target law, phi = N1/N0. Relative tolerance.
inline CompatibilityResult check_mean_compatibility(
    const DegreeDistributionSpec& spec, double phi, double tol) {
  if (!(phi > 0)) throw UsageError("phi must be > 0");
  for (double v : spec.status1.as_array())
    if (!std::isfinite(v) || v < 0) throw UsageError("status-1 means must be finite and >= 0");
  for (double v : spec.status0.as_array())
    if (!std::isfinite(v) || v < 0) throw UsageError("status-0 means must be finite and >= 0");

  CompatibilityResult res;
  auto check = [&](double a, double b, const std::string& name) {
    if (std::abs(a - b) > tol * std::max(std::abs(a), std::abs(b))) {
      res.pass = false;
      res.violations.push_back(name);
    }
  };
  const StatusMeans& m1 = spec.status1;
  const StatusMeans& m0 = spec.status0;
  check(m1.out1, m1.in1, "delta(1->1) = delta(1<-1)");
  check(m0.out0, m0.in0, "delta(0->0) = delta(0<-0)");
  check(m0.out1, phi * m1.in0, "delta(0->1) = phi * delta(1<-0)");
  check(m0.in1, phi * m1.out0, "delta(0<-1) = phi * delta(1->0)");
  check(m0.und1, phi * m1.und0, "delta(0<->1) = phi * delta(1<->0)");
  return res;
}

inline std::vector<DegreeVector> draw_degrees(const DegreeDistributionSpec& spec,
                                              const std::vector<Status>& statuses,
                                              Rng& rng) {
  if (spec.family != "poisson")
    throw UsageError("unsupported degree family: " + spec.family);
  std::vector<DegreeVector> out;
  out.reserve(statuses.size());
  for (Status z : statuses) {
    const StatusMeans& m = z ? spec.status1 : spec.status0;
    DegreeVector d;
    d.in1 = static_cast<std::int32_t>(rng.poisson(m.in1));
    d.in0 = static_cast<std::int32_t>(rng.poisson(m.in0));
    d.out1 = static_cast<std::int32_t>(rng.poisson(m.out1));
    d.out0 = static_cast<std::int32_t>(rng.poisson(m.out0));
    d.und1 = static_cast<std::int32_t>(rng.poisson(m.und1));
    d.und0 = static_cast<std::int32_t>(rng.poisson(m.und0));
    out.push_back(d);
  }
  return out;
}

// Unpaired stub counts, indexed [owner status][counterpart status].
struct PoolLeftovers {
  std::int64_t und[2][2] = {{0, 0}, {0, 0}};
  std::int64_t in[2][2] = {{0, 0}, {0, 0}};
  std::int64_t out[2][2] = {{0, 0}, {0, 0}};

  std::int64_t total() const {
    std::int64_t t = 0;
    for (int z = 0; z < 2; ++z)
      for (int k = 0; k < 2; ++k) t += und[z][k] + in[z][k] + out[z][k];
    return t;
  }
};

// Pre-simplification pairing result: loops and parallel edges allowed.
struct StubMultigraph {
  NodeId n = 0;
  std::vector<Status> status;
  std::vector<Edge> directed;    // (from, to), loops and duplicates possible
  std::vector<Edge> undirected;  // (lo, hi), loops stored as (i, i)
  PoolLeftovers leftovers;
};

namespace detail {

using StubPools = std::array<std::array<std::vector<NodeId>, 2>, 2>;

inline NodeId take_stub(std::vector<NodeId>& pool, std::size_t idx) {
  NodeId owner = pool[idx];
  pool[idx] = pool.back();
  pool.pop_back();
  return owner;
}

}  // namespace detail

// Random stub pairing. The first stub of each pair is selected uniformly
// among the undirected (resp. incoming) stubs that still have a non-empty
// counter-pool; the counter-stub is then uniform in that pool. Within-status
// undirected pools pair internally, cross pools pair with each other, and
// the in-pool (z<-k) pairs with the out-pool of status-k nodes targeting z.
// Self-pairings form loops that simplify() removes later.
inline StubMultigraph pair_stubs(const std::vector<DegreeVector>& degrees,
                                 const std::vector<Status>& statuses, Rng& rng) {
  if (degrees.size() != statuses.size())
    throw UsageError("degrees and statuses must be aligned");
  const NodeId n = static_cast<NodeId>(statuses.size());

  detail::StubPools und, in, out;
  for (NodeId i = 0; i < n; ++i) {
    const int z = statuses[i] ? 1 : 0;
    const DegreeVector& d = degrees[i];
    for (int c = 0; c < d.in1; ++c) in[z][1].push_back(i);
    for (int c = 0; c < d.in0; ++c) in[z][0].push_back(i);
    for (int c = 0; c < d.out1; ++c) out[z][1].push_back(i);
    for (int c = 0; c < d.out0; ++c) out[z][0].push_back(i);
    for (int c = 0; c < d.und1; ++c) und[z][1].push_back(i);
    for (int c = 0; c < d.und0; ++c) und[z][0].push_back(i);
  }

  StubMultigraph g;
  g.n = n;
  g.status = statuses;

  // Undirected phase. Pool order fixed: (1,1), (0,0), (1,0), (0,1).
  const std::pair<int, int> und_order[4] = {{1, 1}, {0, 0}, {1, 0}, {0, 1}};
  for (;;) {
    std::uint64_t eligible = 0;
    std::uint64_t pool_mass[4];
    for (int p = 0; p < 4; ++p) {
      auto [z, k] = und_order[p];
      const std::size_t own = und[z][k].size();
      const std::size_t cnt = und[k][z].size();
      const bool ok = (z == k) ? own >= 2 : (own >= 1 && cnt >= 1);
      pool_mass[p] = ok ? own : 0;
      eligible += pool_mass[p];
    }
    if (eligible == 0) break;

    std::uint64_t r = rng.uniform_below(eligible);
    int p = 0;
    while (r >= pool_mass[p]) r -= pool_mass[p++];
    auto [z, k] = und_order[p];

    NodeId a, b;
    if (z == k) {
      auto& pool = und[z][k];
      std::size_t i1 = static_cast<std::size_t>(r);
      std::size_t i2 = static_cast<std::size_t>(rng.uniform_below(pool.size() - 1));
      if (i2 >= i1) ++i2;
      a = pool[i1];
      b = pool[i2];
      detail::take_stub(pool, std::max(i1, i2));
      detail::take_stub(pool, std::min(i1, i2));
    } else {
      a = detail::take_stub(und[z][k], static_cast<std::size_t>(r));
      auto& counter = und[k][z];
      b = detail::take_stub(counter,
                            static_cast<std::size_t>(rng.uniform_below(counter.size())));
    }
    g.undirected.emplace_back(std::min(a, b), std::max(a, b));
  }

  // Directed phase: pick the incoming stub first. Order (1,1),(1,0),(0,1),(0,0).
  const std::pair<int, int> in_order[4] = {{1, 1}, {1, 0}, {0, 1}, {0, 0}};
  for (;;) {
    std::uint64_t eligible = 0;
    std::uint64_t pool_mass[4];
    for (int p = 0; p < 4; ++p) {
      auto [z, k] = in_order[p];
      pool_mass[p] = out[k][z].empty() ? 0 : in[z][k].size();
      eligible += pool_mass[p];
    }
    if (eligible == 0) break;

    std::uint64_t r = rng.uniform_below(eligible);
    int p = 0;
    while (r >= pool_mass[p]) r -= pool_mass[p++];
    auto [z, k] = in_order[p];

    NodeId to = detail::take_stub(in[z][k], static_cast<std::size_t>(r));
    auto& counter = out[k][z];
    NodeId from = detail::take_stub(
        counter, static_cast<std::size_t>(rng.uniform_below(counter.size())));
    g.directed.emplace_back(from, to);
  }

  for (int z = 0; z < 2; ++z)
    for (int k = 0; k < 2; ++k) {
      g.leftovers.und[z][k] = static_cast<std::int64_t>(und[z][k].size());
      g.leftovers.in[z][k] = static_cast<std::int64_t>(in[z][k].size());
      g.leftovers.out[z][k] = static_cast<std::int64_t>(out[z][k].size());
    }
  return g;
}

struct SimplificationReport {
  std::int64_t loops_removed = 0;
  std::int64_t parallel_removed = 0;        // excess same-edge copies dropped
  std::int64_t antiparallel_converted = 0;  // (i,j)+(j,i) pairs -> one undirected
  std::int64_t mixed_converted = 0;         // directed absorbed into undirected
  PoolLeftovers leftovers;

  std::int64_t conversions() const {
    return antiparallel_converted + mixed_converted;
  }
};

inline nlohmann::ordered_json simplification_report_to_json(
    const SimplificationReport& r) {
  nlohmann::ordered_json j;
  j["loops_removed"] = r.loops_removed;
  j["parallel_removed"] = r.parallel_removed;
  j["antiparallel_converted"] = r.antiparallel_converted;
  j["mixed_converted"] = r.mixed_converted;
  auto pool = [](const std::int64_t (&m)[2][2]) {
    nlohmann::ordered_json p;
    p["z1_k1"] = m[1][1];
    p["z1_k0"] = m[1][0];
    p["z0_k1"] = m[0][1];
    p["z0_k0"] = m[0][0];
    return p;
  };
  j["leftover_undirected"] = pool(r.leftovers.und);
  j["leftover_in"] = pool(r.leftovers.in);
  j["leftover_out"] = pool(r.leftovers.out);
  return j;
}

// Collapses the multigraph to a simple canonical network: loops dropped,
// duplicate copies collapsed, anti-parallel directed pairs and mixed
// directed+undirected pairs converted to a single undirected edge.
inline std::pair<PartiallyDirectedNetwork, SimplificationReport> simplify(
    const StubMultigraph& g) {
  SimplificationReport report;
  report.leftovers = g.leftovers;

  struct PairCounts {
    std::int64_t dir_lohi = 0;  // directed lo -> hi
    std::int64_t dir_hilo = 0;
    std::int64_t und = 0;
  };
  std::unordered_map<std::uint64_t, PairCounts> pairs;
  pairs.reserve(g.directed.size() + g.undirected.size());
  auto key = [&](NodeId lo, NodeId hi) {
    return static_cast<std::uint64_t>(lo) * static_cast<std::uint64_t>(g.n) +
           static_cast<std::uint64_t>(hi);
  };

  for (const Edge& e : g.directed) {
    if (e.first == e.second) {
      ++report.loops_removed;
      continue;
    }
    NodeId lo = std::min(e.first, e.second), hi = std::max(e.first, e.second);
    auto& c = pairs[key(lo, hi)];
    (e.first == lo ? c.dir_lohi : c.dir_hilo) += 1;
  }
  for (const Edge& e : g.undirected) {
    if (e.first == e.second) {
      ++report.loops_removed;
      continue;
    }
    pairs[key(std::min(e.first, e.second), std::max(e.first, e.second))].und += 1;
  }

  std::vector<Edge> directed, undirected;
  for (const auto& [k, c] : pairs) {
    const NodeId lo = static_cast<NodeId>(k / static_cast<std::uint64_t>(g.n));
    const NodeId hi = static_cast<NodeId>(k % static_cast<std::uint64_t>(g.n));
    report.parallel_removed += std::max<std::int64_t>(0, c.dir_lohi - 1) +
                               std::max<std::int64_t>(0, c.dir_hilo - 1) +
                               std::max<std::int64_t>(0, c.und - 1);
    if (c.und > 0) {
      if (c.dir_lohi + c.dir_hilo > 0) ++report.mixed_converted;
      undirected.emplace_back(lo, hi);
    } else if (c.dir_lohi > 0 && c.dir_hilo > 0) {
      ++report.antiparallel_converted;
      undirected.emplace_back(lo, hi);
    } else if (c.dir_lohi > 0) {
      directed.emplace_back(lo, hi);
    } else {
      directed.emplace_back(hi, lo);
    }
  }

  PartiallyDirectedNetwork net = make_network(g.n, g.status, std::move(directed),
                                              std::move(undirected));
  return {std::move(net), report};
}

// Full generative pipeline: first n1 nodes infected, degrees drawn from the
// status law, stubs paired, result simplified.
inline PartiallyDirectedNetwork generate_acm(const DegreeDistributionSpec& spec,
                                             NodeId n, NodeId n1, Rng& rng,
                                             SimplificationReport* report = nullptr) {
  if (n1 <= 0 || n1 >= n) throw UsageError("need 0 < n1 < n");
  std::vector<Status> statuses(static_cast<std::size_t>(n), 0);
  for (NodeId i = 0; i < n1; ++i) statuses[static_cast<std::size_t>(i)] = 1;
  auto degrees = draw_degrees(spec, statuses, rng);
  auto g = pair_stubs(degrees, statuses, rng);
  auto [net, rep] = simplify(g);
  if (report) *report = rep;
  return std::move(net);
}

// Per-node six-component degree read off the simple network.
inline std::vector<DegreeVector> realized_degree_vectors(
    const PartiallyDirectedNetwork& net) {
  std::vector<DegreeVector> d(static_cast<std::size_t>(net.n));
  for (const Edge& e : net.directed) {
    const bool from1 = net.status[static_cast<std::size_t>(e.first)] != 0;
    const bool to1 = net.status[static_cast<std::size_t>(e.second)] != 0;
    auto& to = d[static_cast<std::size_t>(e.second)];
    auto& from = d[static_cast<std::size_t>(e.first)];
    (from1 ? to.in1 : to.in0) += 1;
    (to1 ? from.out1 : from.out0) += 1;
  }
  for (const Edge& e : net.undirected) {
    const bool first1 = net.status[static_cast<std::size_t>(e.first)] != 0;
    const bool second1 = net.status[static_cast<std::size_t>(e.second)] != 0;
    auto& a = d[static_cast<std::size_t>(e.first)];
    auto& b = d[static_cast<std::size_t>(e.second)];
    (second1 ? a.und1 : a.und0) += 1;
    (first1 ? b.und1 : b.und0) += 1;
  }
  return d;
}

using DegreeFrequencies = std::map<DegreeVector, double>;

inline DegreeFrequencies empirical_degree_distribution(
    const PartiallyDirectedNetwork& net, int status) {
  detail::check_status_value(status);
  const auto degrees = realized_degree_vectors(net);
  DegreeFrequencies freq;
  std::int64_t group = 0;
  for (NodeId i = 0; i < net.n; ++i) {
    if ((net.status[static_cast<std::size_t>(i)] != 0) == (status != 0)) {
      freq[degrees[static_cast<std::size_t>(i)]] += 1.0;
      ++group;
    }
  }
  if (group == 0)
    throw DegenerateError("no nodes with status " + std::to_string(status));
  for (auto& [k, v] : freq) v /= static_cast<double>(group);
  return freq;
}

inline double total_variation(const DegreeFrequencies& a,
                              const DegreeFrequencies& b) {
  double tv = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      tv += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      tv += ib->second;
      ++ib;
    } else {
      tv += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return tv / 2.0;
}

inline nlohmann::ordered_json degree_spec_to_json(const DegreeDistributionSpec& s) {
  auto means = [](const StatusMeans& m) {
    nlohmann::ordered_json j;
    j["in1"] = m.in1;
    j["in0"] = m.in0;
    j["out1"] = m.out1;
    j["out0"] = m.out0;
    j["und1"] = m.und1;
    j["und0"] = m.und0;
    return j;
  };
  nlohmann::ordered_json j;
  j["family"] = s.family;
  j["status1"] = means(s.status1);
  j["status0"] = means(s.status0);
  return j;
}

inline DegreeDistributionSpec degree_spec_from_json(const nlohmann::json& j) {
  DegreeDistributionSpec s;
  try {
    s.family = j.value("family", std::string("poisson"));
    auto means = [](const nlohmann::json& mj) {
      StatusMeans m;
      m.in1 = mj.at("in1").get<double>();
      m.in0 = mj.at("in0").get<double>();
      m.out1 = mj.at("out1").get<double>();
      m.out0 = mj.at("out0").get<double>();
      m.und1 = mj.at("und1").get<double>();
      m.und0 = mj.at("und0").get<double>();
      return m;
    };
    s.status1 = means(j.at("status1"));
    s.status0 = means(j.at("status0"));
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed degree spec: ") + ex.what());
  }
  if (s.family != "poisson")
    throw DataError("unsupported degree family: " + s.family);
  return s;
}

}  // namespace rdsnet

#endif  // RDSNET_ACM_HPP
