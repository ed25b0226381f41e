#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdsnet/acm.hpp"
#include "rdsnet/blockmodel.hpp"
#include "rdsnet/errors.hpp"
#include "rdsnet/estimators.hpp"
#include "rdsnet/experiment.hpp"
#include "rdsnet/ingest.hpp"
#include "rdsnet/network.hpp"
#include "rdsnet/network_io.hpp"
#include "rdsnet/rng.hpp"
#include "rdsnet/samplers.hpp"

namespace {

int g_log_level = 1;  // 0 quiet, 1 info, 2 debug

void set_log_level(const std::string& level) {
  g_log_level = level == "quiet" ? 0 : level == "debug" ? 2 : 1;
}

void log_info(const std::string& msg) {
  if (g_log_level >= 1) std::cerr << "[info] " << msg << "\n";
}

// JSON config files: top-level keys are global flags, one nested object per
// subcommand, values scalars or arrays of scalars.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& ex) {
      throw CLI::ConfigError(std::string("JSON config parse error: ") + ex.what());
    }
    if (!j.is_object()) throw CLI::ConfigError("JSON config must be an object");
    std::vector<CLI::ConfigItem> items;
    walk(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  static void walk(const nlohmann::json& j, std::vector<std::string> parents,
                   std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, val] : j.items()) {
      if (val.is_object()) {
        auto p = parents;
        p.push_back(key);
        walk(val, std::move(p), items);
      } else {
        CLI::ConfigItem item;
        item.parents = parents;
        item.name = key;
        if (val.is_array())
          for (const auto& e : val) item.inputs.push_back(scalar(e));
        else
          item.inputs.push_back(scalar(val));
        items.push_back(std::move(item));
      }
    }
  }
};

std::size_t sampler_index(rdsnet::SamplerKind k) {
  for (std::size_t i = 0; i < 5; ++i)
    if (rdsnet::kSamplerOrder[i] == k) return i;
  return 0;
}

int emit_error(bool json_errors, const char* kind, const std::string& msg,
               int code, const nlohmann::json& extra = nlohmann::json::object()) {
  if (json_errors) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = msg;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    std::cerr << j.dump() << "\n";
  } else {
    std::cerr << "error: " << msg << "\n";
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  bool json_errors = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--json-errors") json_errors = true;

  CLI::App app{"rdsnet: sampling laboratory for partially directed networks"};
  app.require_subcommand(1);
  // --help only: the short -h would collide with gen-block's --h flag.
  app.set_help_flag("--help", "print help");
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file mirroring flag names");
  bool json_errors_flag = false;
  app.add_flag("--json-errors", json_errors_flag,
               "machine-readable error JSON on stderr");
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "quiet|info|debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}))
      ->envname("RDSNET_LOG_LEVEL");

  // gen-acm ------------------------------------------------------------
  struct {
    std::string spec, out, report;
    rdsnet::NodeId n = 0, n1 = 0;
    std::uint64_t seed = 1;
    double tol = 1e-6;
  } acm;
  auto* acm_cmd = app.add_subcommand(
      "gen-acm", "generate a network from the attributed configuration model");
  acm_cmd->add_option("--spec", acm.spec, "degree distribution spec (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  acm_cmd->add_option("--n", acm.n, "population size")->required();
  acm_cmd->add_option("--n1", acm.n1, "infected count")->required();
  acm_cmd->add_option("--seed", acm.seed, "random seed")->capture_default_str();
  acm_cmd->add_option("--out", acm.out, "output network JSON")->required();
  acm_cmd->add_option("--report", acm.report,
                      "simplification report path (default <out>.report.json)");
  acm_cmd->add_option("--tol", acm.tol, "mean-compatibility check tolerance")->capture_default_str();
  acm_cmd->callback([&] {
    set_log_level(log_level);
    if (acm.n1 <= 0 || acm.n1 >= acm.n)
      throw rdsnet::UsageError("need 0 < n1 < n");
    const auto spec =
        rdsnet::degree_spec_from_json(rdsnet::detail::read_json_file(acm.spec));
    const double phi = static_cast<double>(acm.n1) /
                       static_cast<double>(acm.n - acm.n1);
    const auto compat = rdsnet::check_mean_compatibility(spec, phi, acm.tol);
    if (!compat.pass)
      for (const std::string& v : compat.violations)
        std::cerr << "[warn] mean-compatibility violated: " << v << "\n";
    rdsnet::Rng rng(acm.seed);
    rdsnet::SimplificationReport report;
    const auto net = rdsnet::generate_acm(spec, acm.n, acm.n1, rng, &report);
    rdsnet::write_network(acm.out, net);
    const std::string rpath =
        acm.report.empty() ? acm.out + ".report.json" : acm.report;
    rdsnet::detail::write_text_atomic(
        rpath, rdsnet::simplification_report_to_json(report).dump() + "\n");
    log_info("wrote " + acm.out + " and " + rpath);
  });

  // gen-block ----------------------------------------------------------
  rdsnet::ScenarioConfig blk;
  auto* blk_cmd = app.add_subcommand(
      "gen-block", "generate a network with target block-edge budgets");
  blk_cmd->set_help_flag("--help", "print help");
  blk_cmd->add_option("--n", blk.n, "population size")->required();
  blk_cmd->add_option("--n1", blk.n1, "infected count")->required();
  blk_cmd->add_option("--lambda", blk.lambda, "mean adjacency entries per node")
      ->required();
  blk_cmd->add_option("--h", blk.h, "homophily")->required();
  blk_cmd->add_option("--m", blk.m, "attractiveness ratio")->required();
  blk_cmd->add_option("--w", blk.w, "activity ratio")->required();
  blk_cmd->add_option("--alpha", blk.alpha, "directed share of entries")
      ->required();
  blk_cmd->add_option("--seed", blk.seed, "random seed")->capture_default_str();
  std::string blk_out;
  blk_cmd->add_option("--out", blk_out, "output network JSON")->required();
  blk_cmd->callback([&] {
    set_log_level(log_level);
    const auto net = rdsnet::generate_block_network(blk);
    rdsnet::write_network(blk_out, net);
    try {
      const auto s = rdsnet::network_stats(net);
      log_info("wrote " + blk_out + " (h=" + rdsnet::fmt_double(s.h) +
               " m=" + rdsnet::fmt_double(s.m) + " w=" + rdsnet::fmt_double(s.w) +
               " alpha=" + rdsnet::fmt_double(s.alpha) +
               " lambda=" + rdsnet::fmt_double(s.lambda) + ")");
    } catch (const rdsnet::DegenerateError&) {
      log_info("wrote " + blk_out);
    }
  });

  // sample ---------------------------------------------------------------
  struct {
    std::string net, sampler = "ss-pi", out = "-";
    rdsnet::NodeId n = 0;
    int seeds = 10, coupons = 2;
    std::uint64_t seed = 1;
    std::int64_t reps = 1;
  } smp;
  auto* smp_cmd = app.add_subcommand("sample", "draw samples from a network");
  smp_cmd->add_option("--net", smp.net, "network JSON")
      ->required()
      ->check(CLI::ExistingFile);
  smp_cmd->add_option("--sampler", smp.sampler, "rds|wrpi|ss-in|ss-pi|ss-pa")->capture_default_str();
  smp_cmd->add_option("--n", smp.n, "sample size")->required();
  smp_cmd->add_option("--seeds", smp.seeds, "RDS seed count")->capture_default_str();
  smp_cmd->add_option("--coupons", smp.coupons, "RDS coupons per participant")->capture_default_str();
  smp_cmd->add_option("--seed", smp.seed, "base random seed")->capture_default_str();
  smp_cmd->add_option("--reps", smp.reps, "replicate count")->capture_default_str();
  smp_cmd->add_option("--out", smp.out, "output JSONL path, '-' for stdout")->capture_default_str();
  smp_cmd->callback([&] {
    set_log_level(log_level);
    if (smp.reps < 1) throw rdsnet::UsageError("reps must be >= 1");
    const auto kind = rdsnet::sampler_from_name(smp.sampler);
    const auto net = rdsnet::read_network(smp.net);
    const rdsnet::NetworkIndex idx(net);
    rdsnet::InRatios ratios;
    if (kind == rdsnet::SamplerKind::SS_PA)
      ratios = rdsnet::in_ratios_from_network(net);
    std::ofstream file;
    if (smp.out != "-") {
      file.open(smp.out, std::ios::binary);
      if (!file) throw rdsnet::DataError("cannot open for writing: " + smp.out);
    }
    std::ostream& os = smp.out == "-" ? std::cout : file;
    for (std::int64_t rep = 0; rep < smp.reps; ++rep) {
      const auto rec = rdsnet::run_sampler(
          idx, kind, smp.n, {smp.seeds, smp.coupons}, ratios,
          rdsnet::derive_seed(smp.seed, 0, sampler_index(kind),
                              static_cast<std::uint64_t>(rep)));
      os << rdsnet::record_to_json(rec).dump() << "\n";
    }
    if (!os) throw rdsnet::DataError("write failed: " + smp.out);
  });

  // estimate ---------------------------------------------------------------
  struct {
    std::string records, out;
    rdsnet::NodeId n = 0;
  } est;
  auto* est_cmd = app.add_subcommand(
      "estimate", "Monte Carlo inclusion probabilities from sample records");
  est_cmd->add_option("--records", est.records, "sample records (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  est_cmd->add_option("--n", est.n, "population size")->required();
  est_cmd->add_option("--out", est.out, "output CSV (node_id, pi_hat)")
      ->required();
  est_cmd->callback([&] {
    set_log_level(log_level);
    std::ifstream in(est.records);
    if (!in) throw rdsnet::DataError("cannot open: " + est.records);
    std::vector<rdsnet::SampleRecord> recs;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& ex) {
        throw rdsnet::DataError("cannot parse record at line " +
                                std::to_string(lineno) + ": " + ex.what());
      }
      recs.push_back(rdsnet::record_from_json(j));
    }
    const auto inc = rdsnet::estimate_inclusion(recs, est.n);
    std::string csv = "node_id,pi_hat\n";
    double sum_pi = 0;
    std::int64_t nonzero = 0;
    for (std::size_t i = 0; i < inc.pi.size(); ++i) {
      csv += std::to_string(i) + "," + rdsnet::fmt_double(inc.pi[i]) + "\n";
      sum_pi += inc.pi[i];
      nonzero += inc.pi[i] > 0;
    }
    rdsnet::detail::write_text_atomic(est.out, csv);
    nlohmann::ordered_json summary;
    summary["sampler"] = rdsnet::sampler_name(inc.sampler);
    summary["n_samp"] = inc.n_samp;
    summary["sum_pi"] = sum_pi;
    summary["nodes_nonzero"] = nonzero;
    std::cout << summary.dump() << "\n";
  });

  // experiment ---------------------------------------------------------------
  struct {
    std::string plan, out_dir;
    double scale = 1.0;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::uint64_t base_seed = 0;
    bool use_default = false;
  } exp;
  auto* exp_cmd = app.add_subcommand(
      "experiment", "run a full scenario x sampler x size study grid");
  auto* plan_opt = exp_cmd->add_option("--plan", exp.plan, "plan JSON")
                       ->check(CLI::ExistingFile);
  auto* default_flag =
      exp_cmd->add_flag("--default", exp.use_default, "use the built-in grid");
  plan_opt->excludes(default_flag);
  default_flag->excludes(plan_opt);
  exp_cmd->add_option("--scale", exp.scale,
                      "replicate scale for the default plan (0, 1]")->capture_default_str()
      ->needs(default_flag);
  exp_cmd->add_option("--jobs", exp.jobs, "worker threads")->capture_default_str()
      ->envname("RDSNET_JOBS")
      ->check(CLI::PositiveNumber);
  auto* seed_opt =
      exp_cmd->add_option("--base-seed", exp.base_seed, "override plan base seed");
  exp_cmd->add_option("--out-dir", exp.out_dir, "output directory")->required();
  exp_cmd->callback([&] {
    set_log_level(log_level);
    if (!exp.use_default && exp.plan.empty())
      throw rdsnet::UsageError("provide --plan <file> or --default");
    rdsnet::ExperimentPlan plan =
        exp.use_default
            ? rdsnet::build_default_plan(exp.scale)
            : rdsnet::plan_from_json(rdsnet::detail::read_json_file(exp.plan));
    if (seed_opt->count()) plan.base_seed = exp.base_seed;
    log_info("running " + std::to_string(plan.scenarios.size()) + " scenarios x " +
             std::to_string(plan.sizes.size()) + " sizes x 5 samplers with " +
             std::to_string(exp.jobs) + " jobs");
    const auto summary = rdsnet::run_plan(plan, exp.out_dir, exp.jobs);
    nlohmann::ordered_json j;
    j["done"] = summary.done;
    j["skipped"] = summary.skipped;
    j["failed"] = summary.failed;
    j["failures"] = summary.failures;
    std::cout << j.dump() << "\n";
  });

  // ingest ---------------------------------------------------------------
  struct {
    std::string in, out;
    rdsnet::NodeId infect = 0;
    std::vector<std::string> thin;
    std::uint64_t seed = 1;
  } ing;
  auto* ing_cmd = app.add_subcommand(
      "ingest", "load a directed edge list, canonicalize, infect, thin");
  ing_cmd->add_option("--in", ing.in, "edge list (SNAP format)")
      ->required()
      ->check(CLI::ExistingFile);
  ing_cmd->add_option("--infect-first", ing.infect,
                      "infect the k nodes with the smallest external ids");
  ing_cmd->add_option("--thin", ing.thin,
                      "entry thinning: k,l,upper|lower,fraction (repeatable)");
  ing_cmd->add_option("--seed", ing.seed, "random seed for thinning")->capture_default_str();
  ing_cmd->add_option("--out", ing.out, "output network JSON")->required();
  ing_cmd->callback([&] {
    set_log_level(log_level);
    const auto raw = rdsnet::read_snap_edgelist(ing.in);
    auto res = rdsnet::canonicalize(raw);
    auto net = std::move(res.net);
    if (ing.infect > 0)
      net = rdsnet::with_status(net,
                                rdsnet::assign_status_prefix(net, ing.infect));
    rdsnet::Rng rng(ing.seed);
    nlohmann::ordered_json thins = nlohmann::ordered_json::array();
    for (const std::string& s : ing.thin) {
      const auto spec = rdsnet::parse_thin_spec(s);
      const std::int64_t before = net.adjacency_entries();
      net = rdsnet::thin_block_triangle(net, spec, rng);
      nlohmann::ordered_json tj;
      tj["spec"] = s;
      tj["entries_removed"] = before - net.adjacency_entries();
      thins.push_back(tj);
    }
    rdsnet::write_network(ing.out, net);
    nlohmann::ordered_json j;
    j["nodes"] = res.report.nodes;
    j["comment_lines"] = raw.comment_lines;
    j["self_loops_dropped"] = res.report.self_loops_dropped;
    j["duplicates_dropped"] = res.report.duplicates_dropped;
    j["reciprocal_converted"] = res.report.reciprocal_converted;
    j["directed"] = net.directed.size();
    j["undirected"] = net.undirected.size();
    j["infected"] = net.infected_count();
    j["thins"] = thins;
    std::cout << j.dump() << "\n";
  });

  // stats ---------------------------------------------------------------
  std::string stats_net;
  auto* stats_cmd =
      app.add_subcommand("stats", "print summary statistics of a network");
  stats_cmd->add_option("--net", stats_net, "network JSON")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->callback([&] {
    set_log_level(log_level);
    const auto net = rdsnet::read_network(stats_net);
    const auto s = rdsnet::network_stats(net);
    nlohmann::ordered_json j;
    j["n"] = net.n;
    j["n1"] = net.infected_count();
    j["directed"] = net.directed.size();
    j["undirected"] = net.undirected.size();
    j["h"] = s.h;
    j["m"] = s.m;
    j["w"] = s.w;
    j["alpha"] = s.alpha;
    j["lambda"] = s.lambda;
    j["mu"] = s.mu;
    std::cout << j.dump() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const rdsnet::InfeasibleAlphaError& e) {
    nlohmann::json extra;
    extra["min_feasible_alpha"] = e.min_feasible_alpha;
    return emit_error(json_errors, "infeasible", e.what(), 2, extra);
  } catch (const rdsnet::InfeasibleError& e) {
    return emit_error(json_errors, "infeasible", e.what(), 2);
  } catch (const rdsnet::DataError& e) {
    return emit_error(json_errors, "data", e.what(), 3);
  } catch (const rdsnet::DegenerateError& e) {
    return emit_error(json_errors, "degenerate", e.what(), 3);
  } catch (const std::invalid_argument& e) {
    return emit_error(json_errors, "usage", e.what(), 1);
  } catch (const std::exception& e) {
    return emit_error(json_errors, "internal", e.what(), 3);
  }
  return 0;
}
