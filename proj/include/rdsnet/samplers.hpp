#ifndef RDSNET_SAMPLERS_HPP
#define RDSNET_SAMPLERS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rdsnet/errors.hpp"
#include "rdsnet/network.hpp"
#include "rdsnet/rng.hpp"

namespace rdsnet {

enum class SamplerKind { RDS, WRPI, SS_IN, SS_PI, SS_PA };

inline const char* sampler_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::RDS: return "rds";
    case SamplerKind::WRPI: return "wrpi";
    case SamplerKind::SS_IN: return "ss-in";
    case SamplerKind::SS_PI: return "ss-pi";
    case SamplerKind::SS_PA: return "ss-pa";
  }
  throw UsageError("unknown sampler kind");
}

inline SamplerKind sampler_from_name(const std::string& s) {
  if (s == "rds") return SamplerKind::RDS;
  if (s == "wrpi") return SamplerKind::WRPI;
  if (s == "ss-in") return SamplerKind::SS_IN;
  if (s == "ss-pi") return SamplerKind::SS_PI;
  if (s == "ss-pa") return SamplerKind::SS_PA;
  throw UsageError("unknown sampler: " + s +
                   " (expected rds|wrpi|ss-in|ss-pi|ss-pa)");
}

// Recruiter entry marking a seed (RDS) rather than a recruited node.
inline constexpr NodeId kSeedMarker = -1;

struct SampleRecord {
  SamplerKind sampler = SamplerKind::RDS;
  std::vector<NodeId> nodes;      // in sampling order
  std::vector<NodeId> recruiter;  // RDS only; parallel to nodes, -1 = seed
  std::uint64_t seed = 0;
  NodeId target_n = 0;
  int reseeds = 0;   // RDS frontier deaths
  int restarts = 0;  // SS stuck-chain restarts
};

// Read-only per-network tables shared across replicates: recruitment
// contacts (out plus undirected neighbors), in-degrees, and in-degrees
// split by the status of the node on the other end.
struct NetworkIndex {
  NodeId n = 0;
  std::vector<Status> status;
  std::vector<std::vector<NodeId>> contacts;
  std::vector<std::int64_t> in_deg;
  std::vector<std::array<std::int64_t, 2>> partial_in;
  std::int64_t total_in = 0;

  explicit NetworkIndex(const PartiallyDirectedNetwork& net)
      : n(net.n),
        status(net.status),
        contacts(static_cast<std::size_t>(net.n)),
        in_deg(static_cast<std::size_t>(net.n), 0),
        partial_in(static_cast<std::size_t>(net.n), {0, 0}) {
    auto add_entry = [&](NodeId from, NodeId to) {
      contacts[static_cast<std::size_t>(from)].push_back(to);
      ++in_deg[static_cast<std::size_t>(to)];
      ++partial_in[static_cast<std::size_t>(to)][status[static_cast<std::size_t>(from)] ? 1 : 0];
    };
    for (const Edge& e : net.directed) add_entry(e.first, e.second);
    for (const Edge& e : net.undirected) {
      add_entry(e.first, e.second);
      add_entry(e.second, e.first);
    }
    for (auto& c : contacts) std::sort(c.begin(), c.end());
    for (std::int64_t d : in_deg) total_in += d;
  }
};

// In-edge origin shares: r[l][k] is the share of adjacency entries incoming
// to status-l nodes that originate from status-k nodes. Rows sum to 1.
struct InRatios {
  double r[2][2] = {{0, 0}, {0, 0}};
};

inline void validate_ratios(const InRatios& R) {
  for (int l = 0; l < 2; ++l) {
    double row = 0;
    for (int k = 0; k < 2; ++k) {
      if (!(R.r[l][k] >= 0)) throw UsageError("edge ratios must be >= 0");
      row += R.r[l][k];
    }
    if (std::abs(row - 1.0) > 1e-9)
      throw UsageError("edge-ratio row for status " + std::to_string(l) +
                       " must sum to 1");
  }
}

inline InRatios in_ratios_from_network(const PartiallyDirectedNetwork& net) {
  const EdgeBlockCounts c = block_edge_counts(net);
  InRatios R;
  for (int l = 0; l < 2; ++l)
    for (int k = 0; k < 2; ++k) R.r[l][k] = edge_ratio_in(c, l, k);
  return R;
}

// Fenwick tree over non-negative integer weights; supports removal and
// inverse-prefix lookup for exact probability-proportional-to-size draws.
class FenwickTree {
 public:
  explicit FenwickTree(const std::vector<std::int64_t>& weights)
      : size_(weights.size()), tree_(weights.size() + 1, 0), vals_(weights) {
    for (std::size_t i = 1; i <= size_; ++i) {
      tree_[i] += weights[i - 1];
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= size_) tree_[parent] += tree_[i];
    }
    for (std::int64_t w : weights) total_ += w;
  }

  std::int64_t total() const { return total_; }
  std::int64_t value(std::size_t i) const { return vals_[i]; }

  void add(std::size_t i, std::int64_t delta) {
    vals_[i] += delta;
    total_ += delta;
    for (std::size_t j = i + 1; j <= size_; j += j & (~j + 1)) tree_[j] += delta;
  }

  void remove(std::size_t i) { add(i, -vals_[i]); }

  // Index i such that the cumulative weight before i is <= r and the
  // cumulative weight through i exceeds r; r in [0, total).
  std::size_t find(std::int64_t r) const {
    std::size_t pos = 0;
    std::size_t step = 1;
    while (step * 2 <= size_) step *= 2;
    for (; step; step /= 2) {
      const std::size_t next = pos + step;
      if (next <= size_ && tree_[next] <= r) {
        pos = next;
        r -= tree_[next];
      }
    }
    return pos;
  }

 private:
  std::size_t size_ = 0;
  std::vector<std::int64_t> tree_;
  std::vector<std::int64_t> vals_;
  std::int64_t total_ = 0;
};

// ---------------------------------------------------------------------------
// RDS: seeds uniform without replacement, breadth-first recruitment of up to
// n_coupons unsampled contacts per participant, fresh uniform seed whenever
// the frontier dies before the target size is reached.
inline SampleRecord rds_sample(const NetworkIndex& idx, NodeId target_n,
                               int n_seeds, int n_coupons, std::uint64_t seed) {
  if (target_n < 0 || target_n > idx.n)
    throw UsageError("target_n must be in [0, n]");
  if (n_seeds < 1 || n_coupons < 1)
    throw UsageError("need n_seeds >= 1 and n_coupons >= 1");

  Rng rng(seed);
  SampleRecord rec;
  rec.sampler = SamplerKind::RDS;
  rec.seed = seed;
  rec.target_n = target_n;

  std::vector<char> sampled(static_cast<std::size_t>(idx.n), 0);
  std::vector<NodeId> queue;
  std::size_t head = 0;

  auto draw_unsampled = [&]() {
    for (;;) {
      NodeId v = static_cast<NodeId>(rng.uniform_below(static_cast<std::uint64_t>(idx.n)));
      if (!sampled[static_cast<std::size_t>(v)]) return v;
    }
  };
  auto admit = [&](NodeId v, NodeId recruiter) {
    sampled[static_cast<std::size_t>(v)] = 1;
    rec.nodes.push_back(v);
    rec.recruiter.push_back(recruiter);
    queue.push_back(v);
  };

  const NodeId initial = std::min<NodeId>(static_cast<NodeId>(n_seeds), target_n);
  for (NodeId s = 0; s < initial; ++s) admit(draw_unsampled(), kSeedMarker);

  while (static_cast<NodeId>(rec.nodes.size()) < target_n) {
    if (head == queue.size()) {
      admit(draw_unsampled(), kSeedMarker);
      ++rec.reseeds;
      continue;
    }
    const NodeId r = queue[head++];
    std::vector<NodeId> cand;
    for (NodeId c : idx.contacts[static_cast<std::size_t>(r)])
      if (!sampled[static_cast<std::size_t>(c)]) cand.push_back(c);
    const std::size_t picks =
        std::min<std::size_t>(static_cast<std::size_t>(n_coupons), cand.size());
    for (std::size_t i = 0; i < picks; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.uniform_below(cand.size() - i));
      std::swap(cand[i], cand[j]);
      admit(cand[i], r);
      if (static_cast<NodeId>(rec.nodes.size()) == target_n) return rec;
    }
  }
  return rec;
}

// WRPI: independent with-replacement draws proportional to in-degree.
inline SampleRecord wrpi_sample(const NetworkIndex& idx, NodeId target_n,
                                std::uint64_t seed) {
  if (target_n < 0) throw UsageError("target_n must be >= 0");
  if (idx.total_in == 0)
    throw DegenerateError("all in-degrees are zero; WRPI undefined");

  std::vector<std::int64_t> cum(idx.in_deg.size());
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < idx.in_deg.size(); ++i) {
    acc += idx.in_deg[i];
    cum[i] = acc;
  }

  Rng rng(seed);
  SampleRecord rec;
  rec.sampler = SamplerKind::WRPI;
  rec.seed = seed;
  rec.target_n = target_n;
  rec.nodes.reserve(static_cast<std::size_t>(target_n));
  for (NodeId t = 0; t < target_n; ++t) {
    const std::int64_t r =
        static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(acc)));
    const auto it = std::upper_bound(cum.begin(), cum.end(), r);
    rec.nodes.push_back(static_cast<NodeId>(it - cum.begin()));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Successive sampling. All three variants share the skeleton: the first node
// is drawn proportional to total in-degree; at every later step the policy
// supplies the eligible mass and the draw given the previous node's status.
// A stuck chain (zero eligible mass) restarts proportional to in-degree
// among the unsampled nodes and is counted; exhausted in-degree mass before
// the target size is an error.

namespace detail {

template <typename Policy>
SampleRecord ss_sample(const NetworkIndex& idx, NodeId target_n,
                       std::uint64_t seed, SamplerKind kind, Policy& policy) {
  if (target_n < 0 || target_n > idx.n)
    throw UsageError("target_n must be in [0, n]");

  Rng rng(seed);
  SampleRecord rec;
  rec.sampler = kind;
  rec.seed = seed;
  rec.target_n = target_n;
  rec.nodes.reserve(static_cast<std::size_t>(target_n));

  FenwickTree total_tree(idx.in_deg);
  auto draw_by_in_degree = [&]() {
    if (total_tree.total() == 0)
      throw DegenerateError("in-degree mass exhausted after " +
                            std::to_string(rec.nodes.size()) + " of " +
                            std::to_string(target_n) + " draws");
    return static_cast<NodeId>(total_tree.find(static_cast<std::int64_t>(
        rng.uniform_below(static_cast<std::uint64_t>(total_tree.total())))));
  };
  auto admit = [&](NodeId v) {
    rec.nodes.push_back(v);
    total_tree.remove(static_cast<std::size_t>(v));
    policy.remove(v);
  };

  if (target_n == 0) return rec;
  NodeId prev = draw_by_in_degree();
  admit(prev);
  while (static_cast<NodeId>(rec.nodes.size()) < target_n) {
    const int zp = idx.status[static_cast<std::size_t>(prev)] ? 1 : 0;
    NodeId next;
    if (policy.has_mass(zp)) {
      next = policy.draw(zp, rng);
    } else {
      next = draw_by_in_degree();
      ++rec.restarts;
    }
    admit(next);
    prev = next;
  }
  return rec;
}

}  // namespace detail

// SS_in: step weight = total in-degree (no dependence on recruiter status).
inline SampleRecord ss_in_sample(const NetworkIndex& idx, NodeId target_n,
                                 std::uint64_t seed) {
  struct Policy {
    FenwickTree tree;
    bool has_mass(int) const { return tree.total() > 0; }
    NodeId draw(int, Rng& rng) {
      return static_cast<NodeId>(tree.find(static_cast<std::int64_t>(
          rng.uniform_below(static_cast<std::uint64_t>(tree.total())))));
    }
    void remove(NodeId v) { tree.remove(static_cast<std::size_t>(v)); }
  } policy{FenwickTree(idx.in_deg)};
  return detail::ss_sample(idx, target_n, seed, SamplerKind::SS_IN, policy);
}

// SS_pi: step weight = partial in-degree from the recruiter's status.
inline SampleRecord ss_pi_sample(const NetworkIndex& idx, NodeId target_n,
                                 std::uint64_t seed) {
  struct Policy {
    FenwickTree by_origin[2];
    bool has_mass(int zp) const { return by_origin[zp].total() > 0; }
    NodeId draw(int zp, Rng& rng) {
      return static_cast<NodeId>(by_origin[zp].find(static_cast<std::int64_t>(
          rng.uniform_below(static_cast<std::uint64_t>(by_origin[zp].total())))));
    }
    void remove(NodeId v) {
      by_origin[0].remove(static_cast<std::size_t>(v));
      by_origin[1].remove(static_cast<std::size_t>(v));
    }
  };
  std::vector<std::int64_t> from0(idx.partial_in.size()), from1(idx.partial_in.size());
  for (std::size_t i = 0; i < idx.partial_in.size(); ++i) {
    from0[i] = idx.partial_in[i][0];
    from1[i] = idx.partial_in[i][1];
  }
  Policy policy{{FenwickTree(from0), FenwickTree(from1)}};
  return detail::ss_sample(idx, target_n, seed, SamplerKind::SS_PI, policy);
}

// SS_pa: step weight = R^in[z_j][z_prev] * d^in_j. Drawing factors through
// the node's own status: pick the status group proportional to
// R^in[g][z_prev] * (remaining in-degree mass of group g), then a node
// within the group proportional to in-degree. Group masses stay integral.
inline SampleRecord ss_pa_sample(const NetworkIndex& idx, NodeId target_n,
                                 const InRatios& ratios, std::uint64_t seed) {
  validate_ratios(ratios);
  struct Policy {
    const InRatios& R;
    FenwickTree by_status[2];
    double mass(int zp) const {
      return R.r[0][zp] * static_cast<double>(by_status[0].total()) +
             R.r[1][zp] * static_cast<double>(by_status[1].total());
    }
    bool has_mass(int zp) const { return mass(zp) > 0; }
    NodeId draw(int zp, Rng& rng) {
      const double m1 = R.r[1][zp] * static_cast<double>(by_status[1].total());
      const int g = rng.uniform01() * mass(zp) < m1 ? 1 : 0;
      return static_cast<NodeId>(by_status[g].find(static_cast<std::int64_t>(
          rng.uniform_below(static_cast<std::uint64_t>(by_status[g].total())))));
    }
    void remove(NodeId v) {
      by_status[0].remove(static_cast<std::size_t>(v));
      by_status[1].remove(static_cast<std::size_t>(v));
    }
  };
  std::vector<std::int64_t> g0(idx.in_deg.size(), 0), g1(idx.in_deg.size(), 0);
  for (std::size_t i = 0; i < idx.in_deg.size(); ++i)
    (idx.status[i] ? g1 : g0)[i] = idx.in_deg[i];
  Policy policy{ratios, {FenwickTree(g0), FenwickTree(g1)}};
  return detail::ss_sample(idx, target_n, seed, SamplerKind::SS_PA, policy);
}

// ---------------------------------------------------------------------------
// Step-weight views of the three SS kernels, for audits and exact checks:
// the weight of every unsampled node at one step, zeros for sampled nodes.

inline std::vector<std::int64_t> ss_in_step_weights(const NetworkIndex& idx,
                                                    const std::vector<char>& sampled) {
  std::vector<std::int64_t> w(idx.in_deg);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (sampled[i]) w[i] = 0;
  return w;
}

inline std::vector<std::int64_t> ss_pi_step_weights(const NetworkIndex& idx,
                                                    const std::vector<char>& sampled,
                                                    int z_prev) {
  detail::check_status_value(z_prev);
  std::vector<std::int64_t> w(idx.partial_in.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = sampled[i] ? 0 : idx.partial_in[i][z_prev];
  return w;
}

inline std::vector<double> ss_pa_step_weights(const NetworkIndex& idx,
                                              const InRatios& ratios,
                                              const std::vector<char>& sampled,
                                              int z_prev) {
  detail::check_status_value(z_prev);
  std::vector<double> w(idx.in_deg.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = sampled[i] ? 0.0
                      : ratios.r[idx.status[i] ? 1 : 0][z_prev] *
                            static_cast<double>(idx.in_deg[i]);
  return w;
}

// ---------------------------------------------------------------------------

struct RdsParams {
  int n_seeds = 10;
  int n_coupons = 2;
};

inline SampleRecord run_sampler(const NetworkIndex& idx, SamplerKind kind,
                                NodeId target_n, const RdsParams& rds,
                                const InRatios& ratios, std::uint64_t seed) {
  switch (kind) {
    case SamplerKind::RDS:
      return rds_sample(idx, target_n, rds.n_seeds, rds.n_coupons, seed);
    case SamplerKind::WRPI:
      return wrpi_sample(idx, target_n, seed);
    case SamplerKind::SS_IN:
      return ss_in_sample(idx, target_n, seed);
    case SamplerKind::SS_PI:
      return ss_pi_sample(idx, target_n, seed);
    case SamplerKind::SS_PA:
      return ss_pa_sample(idx, target_n, ratios, seed);
  }
  throw UsageError("unknown sampler kind");
}

inline nlohmann::ordered_json record_to_json(const SampleRecord& rec) {
  nlohmann::ordered_json j;
  j["sampler"] = sampler_name(rec.sampler);
  j["seed"] = rec.seed;
  j["target_n"] = rec.target_n;
  j["nodes"] = rec.nodes;
  if (!rec.recruiter.empty()) j["recruiter"] = rec.recruiter;
  if (rec.reseeds) j["reseeds"] = rec.reseeds;
  if (rec.restarts) j["restarts"] = rec.restarts;
  return j;
}

inline SampleRecord record_from_json(const nlohmann::json& j) {
  SampleRecord rec;
  try {
    rec.sampler = sampler_from_name(j.at("sampler").get<std::string>());
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.target_n = j.at("target_n").get<NodeId>();
    rec.nodes = j.at("nodes").get<std::vector<NodeId>>();
    if (j.contains("recruiter"))
      rec.recruiter = j.at("recruiter").get<std::vector<NodeId>>();
    rec.reseeds = j.value("reseeds", 0);
    rec.restarts = j.value("restarts", 0);
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed sample record: ") + ex.what());
  }
  return rec;
}

}  // namespace rdsnet

#endif  // RDSNET_SAMPLERS_HPP
