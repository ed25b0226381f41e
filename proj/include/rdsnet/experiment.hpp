#ifndef RDSNET_EXPERIMENT_HPP
#define RDSNET_EXPERIMENT_HPP

#include <atomic>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rdsnet/blockmodel.hpp"
#include "rdsnet/errors.hpp"
#include "rdsnet/estimators.hpp"
#include "rdsnet/network.hpp"
#include "rdsnet/network_io.hpp"
#include "rdsnet/rng.hpp"
#include "rdsnet/samplers.hpp"

namespace rdsnet {

// Shortest round-trip decimal form; keeps CSV output byte-stable.
inline std::string fmt_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct PlanScenario {
  std::string id;
  ScenarioConfig cfg;
};

struct ExperimentPlan {
  std::vector<PlanScenario> scenarios;
  std::vector<NodeId> sizes;
  std::int64_t reps_approx = 500;  // replicates per approximating sampler
  std::int64_t reps_rds = 1000;    // RDS replicates
  RdsParams rds;
  std::uint64_t base_seed = 1;
};

inline std::string scenario_id(const ScenarioConfig& cfg) {
  return "h" + fmt_double(cfg.h) + "_m" + fmt_double(cfg.m) + "_w" +
         fmt_double(cfg.w) + "_a" + fmt_double(cfg.alpha);
}

// Sampler order fixes the seed streams and the output row order.
inline constexpr SamplerKind kSamplerOrder[5] = {
    SamplerKind::RDS, SamplerKind::WRPI, SamplerKind::SS_IN,
    SamplerKind::SS_PI, SamplerKind::SS_PA};

// Seed streams per scenario: replicate seeds use stream = sampler_idx*16 +
// size_idx (so at most 16 sizes per plan); network generation uses 255.
inline constexpr std::uint64_t kNetworkStream = 255;

inline std::uint64_t cell_stream(std::size_t sampler_idx, std::size_t size_idx) {
  return sampler_idx * 16 + size_idx;
}

inline std::string cell_key(const std::string& sid, SamplerKind kind, NodeId size) {
  return sid + "." + sampler_name(kind) + ".n" + std::to_string(size);
}

inline void validate_plan(const ExperimentPlan& plan) {
  if (plan.scenarios.empty()) throw UsageError("plan has no scenarios");
  if (plan.sizes.empty()) throw UsageError("plan has no sample sizes");
  if (plan.sizes.size() > 16)
    throw UsageError("at most 16 sample sizes per plan");
  for (NodeId s : plan.sizes)
    if (s <= 0) throw UsageError("sample sizes must be positive");
  if (plan.reps_approx < 1 || plan.reps_rds < 1)
    throw UsageError("replicate counts must be >= 1");
  if (plan.rds.n_seeds < 1 || plan.rds.n_coupons < 1)
    throw UsageError("need rds seeds >= 1 and coupons >= 1");
  std::set<std::string> ids;
  for (const PlanScenario& s : plan.scenarios) {
    validate_scenario(s.cfg);
    if (s.id.empty()) throw UsageError("scenario id must be non-empty");
    if (!ids.insert(s.id).second)
      throw UsageError("duplicate scenario id: " + s.id);
  }
}

// The full study grid: m, w in {0.8, 1, 2}, h in {1, 5}, alpha in
// {0.2, 0.8}; N = 1500, N1 = 300, lambda = 10; sizes 200/500/750/1125;
// 500 approximation and 1000 RDS replicates, scaled down by `scale`.
inline ExperimentPlan build_default_plan(double scale = 1.0) {
  if (!(scale > 0 && scale <= 1)) throw UsageError("scale must be in (0, 1]");
  ExperimentPlan plan;
  plan.sizes = {200, 500, 750, 1125};
  plan.reps_approx = std::max<std::int64_t>(
      10, static_cast<std::int64_t>(500.0 * scale));
  plan.reps_rds = std::max<std::int64_t>(
      10, static_cast<std::int64_t>(1000.0 * scale));
  for (double h : {1.0, 5.0})
    for (double alpha : {0.2, 0.8})
      for (double m : {0.8, 1.0, 2.0})
        for (double w : {0.8, 1.0, 2.0}) {
          ScenarioConfig cfg;
          cfg.n = 1500;
          cfg.n1 = 300;
          cfg.lambda = 10;
          cfg.h = h;
          cfg.m = m;
          cfg.w = w;
          cfg.alpha = alpha;
          plan.scenarios.push_back({scenario_id(cfg), cfg});
        }
  validate_plan(plan);
  return plan;
}

inline nlohmann::ordered_json plan_to_json(const ExperimentPlan& plan) {
  nlohmann::ordered_json j;
  j["base_seed"] = plan.base_seed;
  j["sizes"] = plan.sizes;
  j["reps_approx"] = plan.reps_approx;
  j["reps_rds"] = plan.reps_rds;
  j["rds_seeds"] = plan.rds.n_seeds;
  j["rds_coupons"] = plan.rds.n_coupons;
  j["scenarios"] = nlohmann::ordered_json::array();
  for (const PlanScenario& s : plan.scenarios) {
    nlohmann::ordered_json sj = scenario_to_json(s.cfg);
    sj["id"] = s.id;
    j["scenarios"].push_back(sj);
  }
  return j;
}

inline ExperimentPlan plan_from_json(const nlohmann::json& j) {
  ExperimentPlan plan;
  try {
    plan.base_seed = j.value("base_seed", std::uint64_t{1});
    plan.sizes = j.at("sizes").get<std::vector<NodeId>>();
    plan.reps_approx = j.value("reps_approx", std::int64_t{500});
    plan.reps_rds = j.value("reps_rds", std::int64_t{1000});
    plan.rds.n_seeds = j.value("rds_seeds", 10);
    plan.rds.n_coupons = j.value("rds_coupons", 2);
    for (const auto& sj : j.at("scenarios")) {
      PlanScenario s;
      s.cfg = scenario_from_json(sj);
      s.id = sj.contains("id") ? sj.at("id").get<std::string>()
                               : scenario_id(s.cfg);
      plan.scenarios.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed plan: ") + ex.what());
  }
  validate_plan(plan);
  return plan;
}

struct RunSummary {
  int done = 0;
  int skipped = 0;
  int failed = 0;
  std::vector<std::string> failures;
};

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError("cannot parse " + path.string() + ": " + ex.what());
  }
  return j;
}

inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    out << text;
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

template <typename F>
void parallel_for(std::size_t count, int jobs, F f) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, jobs)), count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t)
    threads.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        f(i);
      }
    });
  for (auto& th : threads) th.join();
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

// Runs every (scenario, sampler, size) cell of the plan: network generated
// once per scenario, RDS first within each (scenario, size) group so the
// approximations can be scored against its inclusion probabilities; per-cell
// JSON files plus mare.csv / rmse.csv / estimates.csv / manifest.json under
// out_dir. Cells recorded done in the manifest are skipped on rerun; failed
// cells are recorded and retried.
inline RunSummary run_plan(const ExperimentPlan& plan, const std::string& out_dir,
                           int jobs) {
  namespace fs = std::filesystem;
  validate_plan(plan);
  if (jobs < 1) throw UsageError("jobs must be >= 1");

  const fs::path out(out_dir);
  fs::create_directories(out / "networks");
  fs::create_directories(out / "cells");

  // Key order canonicalized through plain json so the stored manifest
  // compares equal on rerun.
  const std::string plan_dump =
      nlohmann::json::parse(plan_to_json(plan).dump()).dump();
  nlohmann::json manifest;
  const fs::path manifest_path = out / "manifest.json";
  if (fs::exists(manifest_path)) {
    manifest = detail::read_json_file(manifest_path);
    if (manifest.value("plan", nlohmann::json{}).dump() != plan_dump)
      throw UsageError("output directory holds results for a different plan; "
                       "use a fresh --out-dir");
  }
  manifest["plan"] = nlohmann::json::parse(plan_dump);
  if (!manifest.contains("networks")) manifest["networks"] = nlohmann::json::object();
  if (!manifest.contains("cells")) manifest["cells"] = nlohmann::json::object();

  std::mutex mtx;  // guards manifest and summary
  RunSummary summary;
  auto flush_manifest = [&] {
    detail::write_text_atomic(manifest_path, manifest.dump(2) + "\n");
  };
  auto record = [&](const std::string& section, const std::string& key,
                    const char* status, const std::string& error = {}) {
    std::lock_guard<std::mutex> lock(mtx);
    nlohmann::json entry;
    entry["status"] = status;
    if (!error.empty()) entry["error"] = error;
    manifest[section][key] = entry;
    if (std::string(status) == "failed") {
      ++summary.failed;
      summary.failures.push_back(key + ": " + error);
    }
    flush_manifest();
  };
  auto is_done = [&](const std::string& section, const std::string& key) {
    std::lock_guard<std::mutex> lock(mtx);
    return manifest[section].contains(key) &&
           manifest[section][key].value("status", "") == "done";
  };

  // Phase A: one network per scenario.
  detail::parallel_for(plan.scenarios.size(), jobs, [&](std::size_t si) {
    const PlanScenario& sc = plan.scenarios[si];
    const fs::path net_path = out / "networks" / (sc.id + ".json");
    if (is_done("networks", sc.id) && fs::exists(net_path)) {
      std::lock_guard<std::mutex> lock(mtx);
      ++summary.skipped;
      return;
    }
    try {
      ScenarioConfig cfg = sc.cfg;
      if (cfg.seed == 0)
        cfg.seed = derive_seed(plan.base_seed, si, kNetworkStream, 0);
      const PartiallyDirectedNetwork net = generate_block_network(cfg);
      write_network(net_path.string(), net);
      record("networks", sc.id, "done");
      std::lock_guard<std::mutex> lock(mtx);
      ++summary.done;
    } catch (const std::exception& ex) {
      record("networks", sc.id, "failed", ex.what());
    }
  });

  // Phase B: (scenario, size) groups; skip groups whose five cells are done.
  struct Group {
    std::size_t si;
    std::size_t size_idx;
  };
  std::vector<Group> groups;
  for (std::size_t si = 0; si < plan.scenarios.size(); ++si) {
    if (!is_done("networks", plan.scenarios[si].id)) continue;
    for (std::size_t zi = 0; zi < plan.sizes.size(); ++zi) {
      bool complete = true;
      for (std::size_t k = 0; k < 5 && complete; ++k) {
        const std::string key = cell_key(plan.scenarios[si].id, kSamplerOrder[k],
                                         plan.sizes[zi]);
        complete = is_done("cells", key) && fs::exists(out / "cells" / (key + ".json"));
      }
      if (complete) {
        std::lock_guard<std::mutex> lock(mtx);
        summary.skipped += 5;
      } else {
        groups.push_back({si, zi});
      }
    }
  }

  detail::parallel_for(groups.size(), jobs, [&](std::size_t gi) {
    const auto [si, size_idx] = groups[gi];
    const PlanScenario& sc = plan.scenarios[si];
    const NodeId size = plan.sizes[size_idx];

    PartiallyDirectedNetwork net;
    try {
      net = read_network((out / "networks" / (sc.id + ".json")).string());
    } catch (const std::exception& ex) {
      for (std::size_t k = 0; k < 5; ++k)
        record("cells", cell_key(sc.id, kSamplerOrder[k], size), "failed",
               ex.what());
      return;
    }
    const NetworkIndex idx(net);
    const double mu_true = static_cast<double>(net.infected_count()) /
                           static_cast<double>(net.n);

    InRatios ratios;
    bool have_ratios = true;
    std::string ratios_error;
    try {
      ratios = in_ratios_from_network(net);
    } catch (const std::exception& ex) {
      have_ratios = false;
      ratios_error = ex.what();
    }

    // RDS records are pure functions of the derived seeds, so a group that
    // must fill in approximation cells can rebuild them without cost to
    // determinism even when the RDS cell itself was done in an earlier run.
    std::vector<SampleRecord> rds_recs;
    rds_recs.reserve(static_cast<std::size_t>(plan.reps_rds));
    try {
      for (std::int64_t rep = 0; rep < plan.reps_rds; ++rep)
        rds_recs.push_back(rds_sample(
            idx, size, plan.rds.n_seeds, plan.rds.n_coupons,
            derive_seed(plan.base_seed, si, cell_stream(0, size_idx),
                        static_cast<std::uint64_t>(rep))));
    } catch (const std::exception& ex) {
      for (std::size_t k = 0; k < 5; ++k)
        record("cells", cell_key(sc.id, kSamplerOrder[k], size), "failed",
               ex.what());
      return;
    }

    InclusionEstimate pi_rds;
    bool have_pi_rds = false;

    for (std::size_t k = 0; k < 5; ++k) {
      const SamplerKind kind = kSamplerOrder[k];
      const std::string key = cell_key(sc.id, kind, size);
      const fs::path cell_path = out / "cells" / (key + ".json");

      if (is_done("cells", key) && fs::exists(cell_path)) {
        if (kind == SamplerKind::RDS) {
          const nlohmann::json cj = detail::read_json_file(cell_path);
          pi_rds.sampler = SamplerKind::RDS;
          pi_rds.pi = cj.at("pi").get<std::vector<double>>();
          pi_rds.n_samp = cj.at("reps").get<std::int64_t>();
          have_pi_rds = true;
        }
        std::lock_guard<std::mutex> lock(mtx);
        ++summary.skipped;
        continue;
      }

      try {
        const bool is_rds = kind == SamplerKind::RDS;
        const std::int64_t reps = is_rds ? plan.reps_rds : plan.reps_approx;
        std::vector<SampleRecord> recs;
        if (is_rds) {
          recs = rds_recs;
        } else {
          if (kind == SamplerKind::SS_PA && !have_ratios)
            throw DegenerateError(ratios_error);
          recs.reserve(static_cast<std::size_t>(reps));
          for (std::int64_t rep = 0; rep < reps; ++rep)
            recs.push_back(run_sampler(
                idx, kind, size, plan.rds, ratios,
                derive_seed(plan.base_seed, si, cell_stream(k, size_idx),
                            static_cast<std::uint64_t>(rep))));
        }
        const InclusionEstimate inc = estimate_inclusion(recs, net.n);

        nlohmann::ordered_json cj;
        cj["scenario"] = sc.id;
        cj["sampler"] = sampler_name(kind);
        cj["n"] = size;
        cj["reps"] = reps;
        cj["mu_true"] = mu_true;
        double sum_pi = 0;
        for (double p : inc.pi) sum_pi += p;
        cj["sum_pi"] = sum_pi;
        std::int64_t reseeds = 0, restarts = 0;
        for (const SampleRecord& r : recs) {
          reseeds += r.reseeds;
          restarts += r.restarts;
        }
        cj["reseeds"] = reseeds;
        cj["restarts"] = restarts;
        cj["pi"] = inc.pi;

        // Pipeline "own": each sampler's replicates weighted by its own
        // inclusion probabilities (never zero on the sampled nodes).
        nlohmann::ordered_json mu_own = nlohmann::ordered_json::array();
        for (const SampleRecord& r : recs)
          mu_own.push_back(hajek(r, inc, net.status));
        cj["mu_own"] = std::move(mu_own);

        if (!is_rds) {
          if (have_pi_rds) {
            const MareResult mr = mare(inc, pi_rds);
            cj["mare"] = mr.mare;
            cj["n_prime"] = mr.n_prime;
          } else {
            cj["mare"] = nullptr;
            cj["n_prime"] = nullptr;
          }
          // Pipeline "rds": RDS replicates weighted by this approximation's
          // inclusion probabilities; a replicate containing a node the
          // approximation never reached has no defined estimate (null).
          nlohmann::ordered_json mu_rds = nlohmann::ordered_json::array();
          for (const SampleRecord& r : rds_recs) {
            try {
              mu_rds.push_back(hajek(r, inc, net.status));
            } catch (const DegenerateError&) {
              mu_rds.push_back(nullptr);
            }
          }
          cj["mu_rds"] = std::move(mu_rds);
        } else {
          pi_rds = inc;
          have_pi_rds = true;
        }

        detail::write_text_atomic(cell_path, cj.dump() + "\n");
        record("cells", key, "done");
        std::lock_guard<std::mutex> lock(mtx);
        ++summary.done;
      } catch (const std::exception& ex) {
        record("cells", key, "failed", ex.what());
      }
    }
  });

  // Phase C: deterministic CSV assembly from the cell files, plan order.
  std::ofstream mare_f(out / "mare.csv.tmp", std::ios::binary);
  std::ofstream rmse_f(out / "rmse.csv.tmp", std::ios::binary);
  std::ofstream est_f(out / "estimates.csv.tmp", std::ios::binary);
  if (!mare_f || !rmse_f || !est_f)
    throw DataError("cannot open CSV outputs under " + out.string());
  mare_f << "scenario,h,m,w,alpha,lambda,n_pop,n1,base_seed,sampler,n,mare,n_prime\n";
  rmse_f << "scenario,h,m,w,alpha,lambda,n_pop,n1,base_seed,sampler,n,pipeline,"
            "reps,undefined,rmse,mean,bias\n";
  est_f << "scenario,sampler,n,pipeline,replicate,seed,mu_hat\n";

  for (std::size_t si = 0; si < plan.scenarios.size(); ++si) {
    const PlanScenario& sc = plan.scenarios[si];
    const std::string meta = sc.id + "," + fmt_double(sc.cfg.h) + "," +
                             fmt_double(sc.cfg.m) + "," + fmt_double(sc.cfg.w) +
                             "," + fmt_double(sc.cfg.alpha) + "," +
                             fmt_double(sc.cfg.lambda) + "," +
                             std::to_string(sc.cfg.n) + "," +
                             std::to_string(sc.cfg.n1) + "," +
                             std::to_string(plan.base_seed);
    for (std::size_t zi = 0; zi < plan.sizes.size(); ++zi) {
      const NodeId size = plan.sizes[zi];
      for (std::size_t k = 0; k < 5; ++k) {
        const SamplerKind kind = kSamplerOrder[k];
        const std::string key = cell_key(sc.id, kind, size);
        const fs::path cell_path = out / "cells" / (key + ".json");
        if (!is_done("cells", key) || !fs::exists(cell_path)) continue;
        const nlohmann::json cj = detail::read_json_file(cell_path);
        const double mu_true = cj.at("mu_true").get<double>();
        const std::string tag = std::string(sampler_name(kind)) + "," +
                                std::to_string(size);

        std::vector<double> own = cj.at("mu_own").get<std::vector<double>>();
        rmse_f << meta << "," << tag << ",own," << own.size() << ",0,"
               << fmt_double(rmse(own, mu_true)) << ","
               << fmt_double(detail::mean_of(own)) << ","
               << fmt_double(detail::mean_of(own) - mu_true) << "\n";
        for (std::size_t r = 0; r < own.size(); ++r)
          est_f << sc.id << "," << tag << ",own," << r << ","
                << derive_seed(plan.base_seed, si, cell_stream(k, zi), r) << ","
                << fmt_double(own[r]) << "\n";

        if (kind == SamplerKind::RDS) continue;

        if (!cj.at("mare").is_null())
          mare_f << meta << "," << tag << ","
                 << fmt_double(cj.at("mare").get<double>()) << ","
                 << cj.at("n_prime").get<std::int64_t>() << "\n";

        std::vector<double> rds_vals;
        std::int64_t undefined = 0;
        const auto& mu_rds = cj.at("mu_rds");
        for (std::size_t r = 0; r < mu_rds.size(); ++r) {
          if (mu_rds[r].is_null()) {
            ++undefined;
            continue;
          }
          const double v = mu_rds[r].get<double>();
          rds_vals.push_back(v);
          est_f << sc.id << "," << tag << ",rds," << r << ","
                << derive_seed(plan.base_seed, si, cell_stream(0, zi), r) << ","
                << fmt_double(v) << "\n";
        }
        rmse_f << meta << "," << tag << ",rds," << mu_rds.size() << ","
               << undefined << ",";
        if (!rds_vals.empty())
          rmse_f << fmt_double(rmse(rds_vals, mu_true)) << ","
                 << fmt_double(detail::mean_of(rds_vals)) << ","
                 << fmt_double(detail::mean_of(rds_vals) - mu_true);
        else
          rmse_f << ",,";
        rmse_f << "\n";
      }
    }
  }
  mare_f.close();
  rmse_f.close();
  est_f.close();
  std::filesystem::rename(out / "mare.csv.tmp", out / "mare.csv");
  std::filesystem::rename(out / "rmse.csv.tmp", out / "rmse.csv");
  std::filesystem::rename(out / "estimates.csv.tmp", out / "estimates.csv");

  std::lock_guard<std::mutex> lock(mtx);
  flush_manifest();
  return summary;
}

}  // namespace rdsnet

#endif  // RDSNET_EXPERIMENT_HPP
