#ifndef RDSNET_BLOCKMODEL_HPP
#define RDSNET_BLOCKMODEL_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rdsnet/errors.hpp"
#include "rdsnet/network.hpp"
#include "rdsnet/rng.hpp"

namespace rdsnet {

// One simulation cell: population, prevalence, mean degree, homophily,
// attractiveness/activity ratios, directed share, seed.
struct ScenarioConfig {
  NodeId n = 0;
  NodeId n1 = 0;
  double lambda = 0;
  double h = 1;
  double m = 1;
  double w = 1;
  double alpha = 0;
  std::uint64_t seed = 0;

  double phi() const {
    return static_cast<double>(n1) / static_cast<double>(n - n1);
  }
  // Homophily reparameterization used by the budget formulas.
  double big_h() const {
    return h * static_cast<double>(n1 - 1) / (2.0 * static_cast<double>(n - n1));
  }
};

inline void validate_scenario(const ScenarioConfig& cfg) {
  if (!(cfg.n1 > 0 && cfg.n1 < cfg.n)) throw UsageError("need 0 < n1 < n");
  if (!(cfg.lambda > 0)) throw UsageError("lambda must be > 0");
  if (!(cfg.h > 0 && cfg.m > 0 && cfg.w > 0))
    throw UsageError("h, m, w must be > 0");
  if (!(cfg.alpha >= 0 && cfg.alpha <= 1))
    throw UsageError("alpha must be in [0, 1]");
}

// Real-valued block adjacency-entry targets plus the directed/undirected
// split. Entry granularity throughout: an undirected edge is two entries.
struct EdgeBudget {
  double e11s = 0, e10s = 0, e01s = 0, e00s = 0;
  double te = 0;
  std::int64_t de = 0, ue = 0;
  std::int64_t ue11 = 0, ue00 = 0, ue10 = 0;  // undirected entries per block
};

inline std::int64_t round_half_even(double x) {
  const double f = std::floor(x);
  const double frac = x - f;
  std::int64_t base = static_cast<std::int64_t>(f);
  if (frac > 0.5) return base + 1;
  if (frac < 0.5) return base;
  return (base % 2 == 0) ? base : base + 1;
}

inline std::int64_t floor_to_even(double x) {
  std::int64_t f = static_cast<std::int64_t>(std::floor(x));
  return f - (f % 2);
}

inline EdgeBudget target_block_edges(const ScenarioConfig& cfg) {
  validate_scenario(cfg);
  const double phi = cfg.phi();
  const double H = cfg.big_h();
  const double lam_n = cfg.lambda * static_cast<double>(cfg.n);

  EdgeBudget b;
  b.e00s = (1.0 / (1.0 + phi * cfg.m) + 1.0 / (1.0 + phi * cfg.w) +
            1.0 / (1.0 + 1.0 / H) - 1.0) *
           (lam_n * (H + 1.0) / (2.0 * H + 1.0));
  b.e11s = (lam_n - b.e00s) / (1.0 + 1.0 / H);
  b.e10s = lam_n / (1.0 + phi * cfg.m) - b.e00s;
  b.e01s = lam_n / (1.0 + phi * cfg.w) - b.e00s;
  b.te = b.e11s + b.e10s + b.e01s + b.e00s;

  auto require_nonneg = [](double v, const char* name) {
    if (v < 0)
      throw InfeasibleError(std::string("negative edge budget for block ") + name);
  };
  require_nonneg(b.e11s, "11");
  require_nonneg(b.e10s, "10");
  require_nonneg(b.e01s, "01");
  require_nonneg(b.e00s, "00");
  return b;
}

struct BlockProbabilities {
  double p11 = 0, p10 = 0, p01 = 0, p00 = 0;
};

inline BlockProbabilities edge_probabilities(const ScenarioConfig& cfg,
                                             const EdgeBudget& b) {
  const double n1 = static_cast<double>(cfg.n1);
  const double n0 = static_cast<double>(cfg.n - cfg.n1);
  BlockProbabilities p;
  p.p11 = n1 > 1 ? b.e11s / (n1 * (n1 - 1.0)) : 0.0;
  p.p00 = n0 > 1 ? b.e00s / (n0 * (n0 - 1.0)) : 0.0;
  p.p10 = b.e10s / (n1 * n0);
  p.p01 = b.e01s / (n1 * n0);
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw InfeasibleError(std::string("block probability p") + name +
                            " outside [0, 1]: " + std::to_string(v));
  };
  check(p.p11, "11");
  check(p.p10, "10");
  check(p.p01, "01");
  check(p.p00, "00");
  return p;
}

// Splits the total entry budget into directed and undirected parts and
// allocates the undirected entries per block, floored to even counts; the
// remainder of each block stays directed. PUE caps the undirected mass:
// cross blocks can contribute at most 2*min(E10, E01) reciprocated entries.
inline EdgeBudget split_directed_undirected(EdgeBudget b, double alpha) {
  if (!(alpha >= 0 && alpha <= 1)) throw UsageError("alpha must be in [0, 1]");
  const std::int64_t te = round_half_even(b.te);
  b.de = round_half_even(alpha * static_cast<double>(te));
  b.ue = te - b.de;

  const double cross = 2.0 * std::min(b.e10s, b.e01s);
  const double pue = b.e11s + b.e00s + cross;
  if (!(pue > static_cast<double>(b.ue))) {
    const double min_alpha =
        std::min(1.0, std::max(0.0, (static_cast<double>(te) - pue + 0.5) /
                                        static_cast<double>(te)));
    throw InfeasibleAlphaError(
        "undirected budget " + std::to_string(b.ue) +
            " exceeds the " + std::to_string(pue) +
            " reciprocable entries; smallest feasible alpha is about " +
            std::to_string(min_alpha),
        min_alpha);
  }
  const double share = static_cast<double>(b.ue) / pue;
  b.ue11 = floor_to_even(share * b.e11s);
  b.ue00 = floor_to_even(share * b.e00s);
  b.ue10 = floor_to_even(share * cross);
  return b;
}

namespace detail {

// Uniform placement of `count` edges on unused pairs, rejection first and a
// free-slot sweep when the block gets crowded.
class PairPlacer {
 public:
  PairPlacer(NodeId n, std::unordered_set<std::uint64_t>& used)
      : n_(n), used_(used) {}

  std::uint64_t key(NodeId a, NodeId b) const {
    NodeId lo = std::min(a, b), hi = std::max(a, b);
    return static_cast<std::uint64_t>(lo) * static_cast<std::uint64_t>(n_) +
           static_cast<std::uint64_t>(hi);
  }

  template <typename DrawPair, typename Emit>
  void place(std::int64_t count, Rng& rng, DrawPair draw, Emit emit) {
    std::int64_t placed = 0;
    int rejects = 0;
    while (placed < count) {
      auto [a, b] = draw(rng);
      if (a == b || used_.count(key(a, b))) {
        if (++rejects > kMaxRejects)
          throw InfeasibleError("edge budget exceeds distinct-pair capacity");
        continue;
      }
      rejects = 0;
      used_.insert(key(a, b));
      emit(a, b);
      ++placed;
    }
  }

 private:
  static constexpr int kMaxRejects = 100000;
  NodeId n_;
  std::unordered_set<std::uint64_t>& used_;
};

}  // namespace detail

// Places the rounded budgets exactly: per within block, ue_kk/2 undirected
// edges then round(e_kk) - ue_kk directed edges on distinct pairs; per cross
// block, ue10/2 undirected edges then the remaining entries directed in each
// direction. Never creates an anti-parallel pair, so the output is canonical
// and block_edge_counts(result) reproduces the rounded budgets.
inline PartiallyDirectedNetwork generate_block_network(const ScenarioConfig& cfg) {
  validate_scenario(cfg);
  EdgeBudget b = target_block_edges(cfg);
  edge_probabilities(cfg, b);  // feasibility of the Bernoulli rates
  b = split_directed_undirected(b, cfg.alpha);

  const NodeId n1 = cfg.n1;
  const NodeId n0 = cfg.n - cfg.n1;
  const std::int64_t r11 = round_half_even(b.e11s);
  const std::int64_t r00 = round_half_even(b.e00s);
  const std::int64_t r10 = round_half_even(b.e10s);
  const std::int64_t r01 = round_half_even(b.e01s);
  const std::int64_t und11 = b.ue11 / 2, und00 = b.ue00 / 2, und10 = b.ue10 / 2;
  const std::int64_t dir11 = r11 - b.ue11;
  const std::int64_t dir00 = r00 - b.ue00;
  const std::int64_t dir10 = r10 - und10;
  const std::int64_t dir01 = r01 - und10;
  if (dir11 < 0 || dir00 < 0 || dir10 < 0 || dir01 < 0)
    throw InfeasibleError("undirected allocation exceeds a block budget");

  auto cap2 = [](NodeId k) {
    return static_cast<std::int64_t>(k) * (static_cast<std::int64_t>(k) - 1) / 2;
  };
  if (und11 + dir11 > cap2(n1) || und00 + dir00 > cap2(n0) ||
      und10 + dir10 + dir01 >
          static_cast<std::int64_t>(n1) * static_cast<std::int64_t>(n0))
    throw InfeasibleError("edge budget exceeds distinct-pair capacity");

  Rng rng(cfg.seed);
  std::vector<Status> status(static_cast<std::size_t>(cfg.n), 0);
  for (NodeId i = 0; i < n1; ++i) status[static_cast<std::size_t>(i)] = 1;
  std::vector<Edge> directed, undirected;

  // Within blocks: infected nodes are 0..n1-1, uninfected n1..n-1.
  auto place_within = [&](NodeId base, NodeId size, std::int64_t n_und,
                          std::int64_t n_dir) {
    std::unordered_set<std::uint64_t> used;
    detail::PairPlacer placer(cfg.n, used);
    auto draw = [&](Rng& r) {
      NodeId a = base + static_cast<NodeId>(r.uniform_below(size));
      NodeId c = base + static_cast<NodeId>(r.uniform_below(size));
      return std::pair<NodeId, NodeId>(a, c);
    };
    placer.place(n_und, rng, draw, [&](NodeId a, NodeId c) {
      undirected.emplace_back(std::min(a, c), std::max(a, c));
    });
    placer.place(n_dir, rng, draw,
                 [&](NodeId a, NodeId c) { directed.emplace_back(a, c); });
  };
  place_within(0, n1, und11, dir11);
  place_within(n1, n0, und00, dir00);

  // Cross blocks share one pair universe; direction fixed per batch.
  {
    std::unordered_set<std::uint64_t> used;
    detail::PairPlacer placer(cfg.n, used);
    auto draw = [&](Rng& r) {
      NodeId i = static_cast<NodeId>(r.uniform_below(n1));
      NodeId j = n1 + static_cast<NodeId>(r.uniform_below(n0));
      return std::pair<NodeId, NodeId>(i, j);
    };
    placer.place(und10, rng, draw, [&](NodeId i, NodeId j) {
      undirected.emplace_back(std::min(i, j), std::max(i, j));
    });
    placer.place(dir10, rng, draw,
                 [&](NodeId i, NodeId j) { directed.emplace_back(i, j); });
    placer.place(dir01, rng, draw,
                 [&](NodeId i, NodeId j) { directed.emplace_back(j, i); });
  }

  return make_network(cfg.n, std::move(status), std::move(directed),
                      std::move(undirected));
}

inline nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["n"] = cfg.n;
  j["n1"] = cfg.n1;
  j["lambda"] = cfg.lambda;
  j["h"] = cfg.h;
  j["m"] = cfg.m;
  j["w"] = cfg.w;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  return j;
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  try {
    cfg.n = j.at("n").get<NodeId>();
    cfg.n1 = j.at("n1").get<NodeId>();
    cfg.lambda = j.at("lambda").get<double>();
    cfg.h = j.at("h").get<double>();
    cfg.m = j.at("m").get<double>();
    cfg.w = j.at("w").get<double>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed scenario config: ") + ex.what());
  }
  validate_scenario(cfg);
  return cfg;
}

}  // namespace rdsnet

#endif  // RDSNET_BLOCKMODEL_HPP
