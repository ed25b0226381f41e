#ifndef RDSNET_ESTIMATORS_HPP
#define RDSNET_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rdsnet/errors.hpp"
#include "rdsnet/network.hpp"
#include "rdsnet/samplers.hpp"

namespace rdsnet {

// Monte Carlo pseudo-inclusion probabilities: per-node relative frequency of
// sample-set membership across replicates.
struct InclusionEstimate {
  SamplerKind sampler = SamplerKind::RDS;
  std::vector<double> pi;
  std::int64_t n_samp = 0;
};

inline InclusionEstimate estimate_inclusion(const std::vector<SampleRecord>& records,
                                            NodeId n) {
  if (records.empty()) throw UsageError("no sample records");
  if (n <= 0) throw UsageError("population size must be positive");

  InclusionEstimate est;
  est.sampler = records.front().sampler;
  est.n_samp = static_cast<std::int64_t>(records.size());
  std::vector<std::int64_t> count(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> last_seen(static_cast<std::size_t>(n), -1);
  for (std::int64_t r = 0; r < est.n_samp; ++r) {
    const SampleRecord& rec = records[static_cast<std::size_t>(r)];
    if (rec.sampler != est.sampler)
      throw UsageError("mixed samplers in one inclusion estimate");
    for (NodeId v : rec.nodes) {
      if (v < 0 || v >= n) throw UsageError("node id out of range in record");
      auto& seen = last_seen[static_cast<std::size_t>(v)];
      if (seen != r) {  // repeats within one record count once
        seen = r;
        ++count[static_cast<std::size_t>(v)];
      }
    }
  }
  est.pi.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < est.pi.size(); ++i)
    est.pi[i] = static_cast<double>(count[i]) / static_cast<double>(est.n_samp);
  return est;
}

// Hajek prevalence estimate over the distinct nodes of one record.
inline double hajek(const SampleRecord& rec, const InclusionEstimate& inc,
                    const std::vector<Status>& z) {
  if (inc.pi.size() != z.size())
    throw UsageError("inclusion vector and status vector lengths differ");
  if (rec.nodes.empty()) throw UsageError("empty sample record");

  std::vector<char> seen(z.size(), 0);
  double num = 0, den = 0;
  for (NodeId v : rec.nodes) {
    if (v < 0 || static_cast<std::size_t>(v) >= z.size())
      throw UsageError("node id out of range in record");
    auto i = static_cast<std::size_t>(v);
    if (seen[i]) continue;
    seen[i] = 1;
    const double p = inc.pi[i];
    if (!(p > 0))
      throw DegenerateError("sampled node " + std::to_string(v) +
                            " has zero estimated inclusion probability");
    num += static_cast<double>(z[i]) / p;
    den += 1.0 / p;
  }
  return num / den;
}

struct MareResult {
  double mare = 0;
  std::int64_t n_prime = 0;  // nodes with a positive reference probability
};

// Mean absolute relative error of pi_app against pi_rds, averaged over the
// nodes where the reference is positive (zeros are not computable and are
// excluded; n_prime reports how many nodes remain).
inline MareResult mare(const InclusionEstimate& pi_app,
                       const InclusionEstimate& pi_rds) {
  if (pi_app.pi.size() != pi_rds.pi.size())
    throw UsageError("inclusion vectors have different lengths");
  MareResult res;
  double sum = 0;
  for (std::size_t i = 0; i < pi_rds.pi.size(); ++i) {
    const double ref = pi_rds.pi[i];
    if (ref <= 0) continue;
    sum += std::abs(pi_app.pi[i] - ref) / ref;
    ++res.n_prime;
  }
  if (res.n_prime == 0)
    throw DegenerateError("reference inclusion probabilities are all zero");
  res.mare = sum / static_cast<double>(res.n_prime);
  return res;
}

inline double rmse(const std::vector<double>& estimates, double mu_true) {
  if (estimates.empty()) throw UsageError("no estimates");
  double acc = 0;
  for (double e : estimates) {
    const double d = e - mu_true;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

// Linear-interpolation quantile of a sorted copy (the common "type 7" rule).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw UsageError("no values");
  if (!(q >= 0 && q <= 1)) throw UsageError("quantile must be in [0, 1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1 - frac) + v[lo + 1] * frac;
}

struct EstimatorSummary {
  double mean = 0, bias = 0, rmse = 0;
  double q05 = 0, q25 = 0, q50 = 0, q75 = 0, q95 = 0;
};

inline EstimatorSummary summarize(const std::vector<double>& estimates,
                                  double mu_true) {
  if (estimates.empty()) throw UsageError("no estimates");
  EstimatorSummary s;
  for (double e : estimates) s.mean += e;
  s.mean /= static_cast<double>(estimates.size());
  s.bias = s.mean - mu_true;
  s.rmse = rmse(estimates, mu_true);
  s.q05 = quantile(estimates, 0.05);
  s.q25 = quantile(estimates, 0.25);
  s.q50 = quantile(estimates, 0.50);
  s.q75 = quantile(estimates, 0.75);
  s.q95 = quantile(estimates, 0.95);
  return s;
}

}  // namespace rdsnet

#endif  // RDSNET_ESTIMATORS_HPP
