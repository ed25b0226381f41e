#ifndef RDSNET_TESTS_HELPERS_HPP
#define RDSNET_TESTS_HELPERS_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "rdsnet/acm.hpp"
#include "rdsnet/network.hpp"
#include "rdsnet/samplers.hpp"

namespace testutil {

// Five-node network realizing the partial-in-degree walk example: statuses
// [1,1,1,0,0]; from infected recruiters the partial in-degrees are
// [1,2,0,0,3].
inline rdsnet::PartiallyDirectedNetwork toy_walk_network() {
  return rdsnet::make_network(
      5, {1, 1, 1, 0, 0}, {{2, 1}, {0, 4}, {2, 4}}, {{0, 1}, {1, 4}});
}

// Exact rational arithmetic over long long with overflow-safe products.
struct Rat {
  long long num = 0;
  long long den = 1;

  Rat() = default;
  Rat(long long n) : num(n), den(1) {}
  Rat(long long n, long long d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den < 0) {
      den = -den;
      num = -num;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  static Rat make(__int128 n, __int128 d) {
    if (d < 0) {
      d = -d;
      n = -n;
    }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    Rat r;
    r.num = static_cast<long long>(n);
    r.den = static_cast<long long>(d);
    return r;
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make(static_cast<__int128>(a.num) * b.den +
                    static_cast<__int128>(b.num) * a.den,
                static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make(static_cast<__int128>(a.num) * b.den -
                    static_cast<__int128>(b.num) * a.den,
                static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(static_cast<__int128>(a.num) * b.num,
                static_cast<__int128>(a.den) * b.den);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    return make(static_cast<__int128>(a.num) * b.den,
                static_cast<__int128>(a.den) * b.num);
  }
  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num == b.num && a.den == b.den;
  }

  double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

// Exact-rational block-edge budgets, independently coded from the closed
// forms: H = h(n1-1)/(2(n-n1)), phi = n1/(n-n1),
//   E00 = (1/(1+phi m) + 1/(1+phi w) + 1/(1+1/H) - 1) * lambda N (H+1)/(2H+1)
//   E11 = (lambda N - E00)/(1+1/H)
//   E10 = lambda N/(1+phi m) - E00,  E01 = lambda N/(1+phi w) - E00.
struct RatBudget {
  Rat e11, e10, e01, e00;
};

inline RatBudget rational_budget(long long n, long long n1, const Rat& lambda,
                                 const Rat& h, const Rat& m, const Rat& w) {
  const Rat phi(n1, n - n1);
  const Rat H = h * Rat(n1 - 1, 2 * (n - n1));
  const Rat lam_n = lambda * Rat(n);
  const Rat one(1);
  RatBudget b;
  b.e00 = (one / (one + phi * m) + one / (one + phi * w) + one / (one + one / H) -
           one) *
          (lam_n * (H + one) / (H + H + one));
  b.e11 = (lam_n - b.e00) / (one + one / H);
  b.e10 = lam_n / (one + phi * m) - b.e00;
  b.e01 = lam_n / (one + phi * w) - b.e00;
  return b;
}

// Exhaustive enumeration of the successive-sampling laws on small networks:
// walks every ordered sequence of length target and accumulates its exact
// probability onto each included node. First draw and restarts are
// proportional to total in-degree, matching the samplers' contract.
enum class SsKind { IN, PI, PA };

inline void ss_enum_recurse(const rdsnet::NetworkIndex& idx,
                            const rdsnet::InRatios* R, SsKind kind, int target,
                            std::vector<char>& mask, int prev, double prob,
                            int depth, std::vector<double>& pi) {
  if (depth == target) {
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) pi[i] += prob;
    return;
  }
  const auto n = static_cast<int>(idx.n);
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  double total = 0;
  auto fill = [&](auto&& weight_of) {
    total = 0;
    for (int i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(i)] =
          mask[static_cast<std::size_t>(i)] ? 0.0 : weight_of(i);
      total += w[static_cast<std::size_t>(i)];
    }
  };
  auto by_in_degree = [&](int i) {
    return static_cast<double>(idx.in_deg[static_cast<std::size_t>(i)]);
  };
  if (depth == 0) {
    fill(by_in_degree);
  } else {
    const int zp = idx.status[static_cast<std::size_t>(prev)] ? 1 : 0;
    switch (kind) {
      case SsKind::IN:
        fill(by_in_degree);
        break;
      case SsKind::PI:
        fill([&](int i) {
          return static_cast<double>(
              idx.partial_in[static_cast<std::size_t>(i)][zp]);
        });
        break;
      case SsKind::PA:
        fill([&](int i) {
          return R->r[idx.status[static_cast<std::size_t>(i)] ? 1 : 0][zp] *
                 static_cast<double>(idx.in_deg[static_cast<std::size_t>(i)]);
        });
        break;
    }
    if (total == 0) fill(by_in_degree);  // stuck-chain restart
  }
  if (total == 0) return;  // exhausted: the sampler would throw
  for (int j = 0; j < n; ++j) {
    const double wj = w[static_cast<std::size_t>(j)];
    if (wj == 0) continue;
    mask[static_cast<std::size_t>(j)] = 1;
    ss_enum_recurse(idx, R, kind, target, mask, j, prob * wj / total, depth + 1,
                    pi);
    mask[static_cast<std::size_t>(j)] = 0;
  }
}

inline std::vector<double> ss_enum_inclusion(const rdsnet::NetworkIndex& idx,
                                             SsKind kind, int target,
                                             const rdsnet::InRatios* R = nullptr) {
  std::vector<double> pi(static_cast<std::size_t>(idx.n), 0.0);
  std::vector<char> mask(static_cast<std::size_t>(idx.n), 0);
  ss_enum_recurse(idx, R, kind, target, mask, -1, 1.0, 0, pi);
  return pi;
}

// A degree spec satisfying the mean-compatibility conditions at phi = 1/4
// (e.g. n1 = n/5): status-0 cross means are phi times the status-1 partners.
inline rdsnet::DegreeDistributionSpec compatible_spec_phi025() {
  rdsnet::DegreeDistributionSpec spec;
  spec.status1.in1 = 1.2;
  spec.status1.out1 = 1.2;
  spec.status1.in0 = 0.8;
  spec.status1.out0 = 0.6;
  spec.status1.und1 = 1.0;
  spec.status1.und0 = 1.0;
  spec.status0.out1 = 0.25 * 0.8;
  spec.status0.in1 = 0.25 * 0.6;
  spec.status0.und1 = 0.25 * 1.0;
  spec.status0.in0 = 1.5;
  spec.status0.out0 = 1.5;
  spec.status0.und0 = 1.2;
  return spec;
}

inline double poisson_pmf(int k, double mean) {
  if (mean <= 0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(mean) - mean -
                  std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace testutil

#endif  // RDSNET_TESTS_HELPERS_HPP
