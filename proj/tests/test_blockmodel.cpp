#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "rdsnet/blockmodel.hpp"
#include "rdsnet/errors.hpp"

using namespace rdsnet;
using testutil::Rat;

TEST_CASE("round_half_even") {
  CHECK(round_half_even(2.4) == 2);
  CHECK(round_half_even(2.6) == 3);
  CHECK(round_half_even(2.5) == 2);
  CHECK(round_half_even(3.5) == 4);
  CHECK(round_half_even(0.5) == 0);
  CHECK(round_half_even(1.5) == 2);
  CHECK(round_half_even(7.0) == 7);
  CHECK(round_half_even(0.0) == 0);
}

TEST_CASE("floor_to_even") {
  CHECK(floor_to_even(5.9) == 4);
  CHECK(floor_to_even(4.2) == 4);
  CHECK(floor_to_even(7.0) == 6);
  CHECK(floor_to_even(6.0) == 6);
  CHECK(floor_to_even(0.7) == 0);
}

TEST_CASE("validate_scenario rejects out-of-domain parameters") {
  ScenarioConfig cfg{100, 20, 5.0, 1, 1, 1, 0.5, 0};
  CHECK_NOTHROW(validate_scenario(cfg));
  auto bad = cfg;
  bad.n1 = 0;
  CHECK_THROWS_AS(validate_scenario(bad), UsageError);
  bad = cfg;
  bad.n1 = 100;
  CHECK_THROWS_AS(validate_scenario(bad), UsageError);
  bad = cfg;
  bad.lambda = 0;
  CHECK_THROWS_AS(validate_scenario(bad), UsageError);
  bad = cfg;
  bad.h = 0;
  CHECK_THROWS_AS(validate_scenario(bad), UsageError);
  bad = cfg;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(validate_scenario(bad), UsageError);
}

TEST_CASE("block budgets match the exact rational oracle on the full grid") {
  const long long n = 1500, n1 = 300;
  const Rat lambda(10);
  const std::vector<Rat> hs{Rat(1), Rat(5)};
  const std::vector<Rat> ms{Rat(4, 5), Rat(1), Rat(2)};
  for (const Rat& h : hs)
    for (const Rat& m : ms)
      for (const Rat& w : ms) {
        const auto rb = testutil::rational_budget(n, n1, lambda, h, m, w);
        // identity: the four block budgets sum exactly to lambda * N
        CHECK(rb.e11 + rb.e10 + rb.e01 + rb.e00 == lambda * Rat(n));

        ScenarioConfig cfg;
        cfg.n = static_cast<NodeId>(n);
        cfg.n1 = static_cast<NodeId>(n1);
        cfg.lambda = lambda.value();
        cfg.h = h.value();
        cfg.m = m.value();
        cfg.w = w.value();
        cfg.alpha = 0.5;
        const auto b = target_block_edges(cfg);
        CHECK(b.e11s == doctest::Approx(rb.e11.value()).epsilon(1e-9));
        CHECK(b.e10s == doctest::Approx(rb.e10.value()).epsilon(1e-9));
        CHECK(b.e01s == doctest::Approx(rb.e01.value()).epsilon(1e-9));
        CHECK(b.e00s == doctest::Approx(rb.e00.value()).epsilon(1e-9));
        CHECK(b.te == doctest::Approx(15000.0).epsilon(1e-12));
      }
}

TEST_CASE("budget symmetry: swapping m and w swaps the cross blocks") {
  ScenarioConfig a{1500, 300, 10, 5, 2, 0.8, 0.5, 0};
  ScenarioConfig b{1500, 300, 10, 5, 0.8, 2, 0.5, 0};
  const auto ba = target_block_edges(a);
  const auto bb = target_block_edges(b);
  CHECK(ba.e11s == doctest::Approx(bb.e11s));
  CHECK(ba.e00s == doctest::Approx(bb.e00s));
  CHECK(ba.e10s == doctest::Approx(bb.e01s));
  CHECK(ba.e01s == doctest::Approx(bb.e10s));
}

TEST_CASE("homophily raises the within-block budgets") {
  ScenarioConfig lo{1500, 300, 10, 1, 1, 1, 0.5, 0};
  ScenarioConfig hi{1500, 300, 10, 5, 1, 1, 0.5, 0};
  const auto bl = target_block_edges(lo);
  const auto bh = target_block_edges(hi);
  CHECK(bh.e11s > bl.e11s);
  CHECK(bh.e00s > bl.e00s);
  CHECK(bh.e10s < bl.e10s);
}

TEST_CASE("edge probabilities stay in range on the grid and overflow throws") {
  ScenarioConfig cfg{1500, 300, 10, 5, 2, 0.8, 0.2, 0};
  const auto b = target_block_edges(cfg);
  const auto p = edge_probabilities(cfg, b);
  for (double v : {p.p11, p.p10, p.p01, p.p00}) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  // tiny population with a large mean degree pushes p11 past 1
  ScenarioConfig heavy{10, 5, 10, 1, 1, 1, 1.0, 0};
  const auto bh = target_block_edges(heavy);
  CHECK_THROWS_AS(edge_probabilities(heavy, bh), InfeasibleError);
}

TEST_CASE("directed/undirected split accounting") {
  ScenarioConfig cfg{1500, 300, 10, 5, 2, 0.8, 0.2, 0};
  auto b = target_block_edges(cfg);
  b = split_directed_undirected(b, cfg.alpha);
  const std::int64_t te = round_half_even(b.te);
  CHECK(b.de == round_half_even(0.2 * static_cast<double>(te)));
  CHECK(b.ue == te - b.de);
  CHECK(b.ue11 % 2 == 0);
  CHECK(b.ue00 % 2 == 0);
  CHECK(b.ue10 % 2 == 0);
  CHECK(b.ue11 + b.ue00 + b.ue10 <= b.ue);
  CHECK(b.ue11 <= round_half_even(b.e11s));
  CHECK(b.ue00 <= round_half_even(b.e00s));
  CHECK(b.ue10 / 2 <= std::min(round_half_even(b.e10s), round_half_even(b.e01s)));
}

TEST_CASE("infeasible alpha names the smallest feasible value") {
  // asymmetric cross budgets cap the reciprocable mass well below TE
  ScenarioConfig cfg{1500, 300, 10, 5, 2, 0.8, 0.0, 0};
  auto b = target_block_edges(cfg);
  double min_alpha = -1;
  try {
    split_directed_undirected(b, 0.0);
    FAIL("expected InfeasibleAlphaError");
  } catch (const InfeasibleAlphaError& e) {
    min_alpha = e.min_feasible_alpha;
    CHECK(std::string(e.what()).find("smallest feasible alpha") !=
          std::string::npos);
  }
  CHECK(min_alpha > 0.0);
  CHECK(min_alpha < 1.0);
  // just above the reported bound the split succeeds
  CHECK_NOTHROW(split_directed_undirected(b, std::min(1.0, min_alpha + 0.01)));
  // just below it still fails
  CHECK_THROWS_AS(split_directed_undirected(b, std::max(0.0, min_alpha - 0.01)),
                  InfeasibleAlphaError);
}

TEST_CASE("realized block entries equal the rounded budgets exactly") {
  for (double h : {1.0, 5.0})
    for (double m : {0.8, 2.0}) {
      ScenarioConfig cfg{1500, 300, 10, h, m, 0.8, 0.3, 42};
      auto b = target_block_edges(cfg);
      b = split_directed_undirected(b, cfg.alpha);
      const auto net = generate_block_network(cfg);
      const auto counts = block_edge_counts(net);
      CHECK(counts.e11 == round_half_even(b.e11s));
      CHECK(counts.e10 == round_half_even(b.e10s));
      CHECK(counts.e01 == round_half_even(b.e01s));
      CHECK(counts.e00 == round_half_even(b.e00s));
      CHECK_NOTHROW(validate_network(net));
    }
}

TEST_CASE("realized summary statistics track the configuration") {
  ScenarioConfig cfg{1500, 300, 10, 5, 2, 0.8, 0.2, 7};
  const auto net = generate_block_network(cfg);
  const auto s = network_stats(net);
  CHECK(s.h == doctest::Approx(5.0).epsilon(0.02));
  CHECK(s.m == doctest::Approx(2.0).epsilon(0.01));
  CHECK(s.w == doctest::Approx(0.8).epsilon(0.01));
  CHECK(std::abs(s.alpha - 0.2) < 0.02);
  CHECK(s.lambda == doctest::Approx(10.0).epsilon(0.005));
  CHECK(s.mu == doctest::Approx(0.2));
}

TEST_CASE("generation is deterministic in the seed") {
  ScenarioConfig cfg{800, 160, 8, 2, 1.5, 0.9, 0.4, 11};
  const auto a = generate_block_network(cfg);
  const auto b = generate_block_network(cfg);
  cfg.seed = 12;
  const auto c = generate_block_network(cfg);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("pair capacity preflight throws on oversubscribed blocks") {
  // n1 = 5 gives cap2 = 10 within-block pairs; the budget wants far more.
  ScenarioConfig cfg{10, 5, 9, 1, 1, 1, 1.0, 0};
  CHECK_THROWS_AS(generate_block_network(cfg), InfeasibleError);
}

TEST_CASE("scenario json round trip") {
  ScenarioConfig cfg{1500, 300, 10, 5, 2, 0.8, 0.2, 99};
  const auto j = scenario_to_json(cfg);
  const auto back = scenario_from_json(j);
  CHECK(back.n == cfg.n);
  CHECK(back.n1 == cfg.n1);
  CHECK(back.lambda == cfg.lambda);
  CHECK(back.h == cfg.h);
  CHECK(back.m == cfg.m);
  CHECK(back.w == cfg.w);
  CHECK(back.alpha == cfg.alpha);
  CHECK(back.seed == cfg.seed);
}
