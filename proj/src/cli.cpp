// SPDX-License-Identifier: Apache-2.0
#include "parashard/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "parashard/compare.hpp"
#include "parashard/config.hpp"
#include "parashard/oracles.hpp"
#include "parashard/planner.hpp"
#include "parashard/report.hpp"

namespace parashard {
namespace {

bool log_enabled() {
  const char* v = std::getenv("PARASHARD_LOG");
  return v != nullptr && *v != '\0';
}

ParallelConfig parse_parallel(const std::string& s) {
  std::vector<std::uint64_t> vals;
  std::stringstream ss(s);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(piece, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != piece.size() || v == 0) {
      throw ConfigError("--parallel expects four positive integers "
                        "dp,pp,tp,cp (got '" + s + "')");
    }
    vals.push_back(v);
  }
  if (vals.size() != 4) {
    throw ConfigError("--parallel expects four positive integers "
                      "dp,pp,tp,cp (got '" + s + "')");
  }
  ParallelConfig cfg;
  cfg.dp = vals[0];
  cfg.pp = vals[1];
  cfg.tp = vals[2];
  cfg.cp = vals[3];
  return cfg;
}

TpFlavor resolve_flavor(const std::string& s, BlockKind kind) {
  if (s == "auto") {
    return kind == BlockKind::mamba2 ? TpFlavor::tpsp : TpFlavor::plain;
  }
  return tp_flavor_from_string(s);
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"parashard: analytical parallelization planner for "
               "transformer and Mamba-2 models"};
  app.name("parashard");
  app.require_subcommand(1);

  std::string config_path;
  std::string parallel_str;
  std::string mode_str;
  std::string format_str = "table";
  std::string flavor_str = "auto";
  std::string rank_by_str = "mfu";
  std::string reference_id;
  double overlap_eff = 0.0;
  double slo_throughput = -1.0;
  double slo_ttft = -1.0;
  std::uint64_t top = 0;
  bool include_embeddings = false;
  bool strict_tp_intra_node = false;
  bool naive_scan = false;

  auto add_common = [&](CLI::App* cmd, bool needs_parallel) {
    cmd->add_option("--config", config_path,
                    "JSON file with model/workload/cluster/slo sections")
        ->required();
    auto* par = cmd->add_option("--parallel", parallel_str,
                                "parallel degrees as dp,pp,tp,cp");
    if (needs_parallel) par->required();
    cmd->add_option("--mode", mode_str,
                    "override workload mode (training|prefill)");
    cmd->add_option("--format", format_str, "output format (table|csv|json)");
    cmd->add_option("--tp-flavor", flavor_str,
                    "tensor-parallel flavor (auto|plain|tpsp|tpup)");
    cmd->add_option("--overlap-eff", overlap_eff,
                    "fraction of communication hidden by compute, 0..1");
    cmd->add_flag("--include-embeddings", include_embeddings,
                  "count vocabulary embedding weights in device memory");
    cmd->add_flag("--naive-scan", naive_scan,
                  "cost the quadratic inter-chunk state combine instead of "
                  "the parallel scan");
  };

  CLI::App* analyze =
      app.add_subcommand("analyze", "explain one strategy's costs in depth");
  add_common(analyze, /*needs_parallel=*/true);

  CLI::App* plan = app.add_subcommand(
      "plan", "enumerate, cost, and rank every strategy for the cluster");
  add_common(plan, /*needs_parallel=*/false);
  plan->add_option("--rank-by", rank_by_str,
                   "ranking key (mfu|throughput|step_time|memory)");
  plan->add_option("--top", top, "show only the best N feasible strategies");
  plan->add_option("--slo-throughput", slo_throughput,
                   "minimum tokens/s; slower strategies become infeasible");
  plan->add_option("--slo-ttft", slo_ttft,
                   "maximum seconds per step/prefill; slower strategies "
                   "become infeasible");
  plan->add_flag("--strict-tp-intra-node", strict_tp_intra_node,
                 "only consider tp degrees that fit inside one node");

  CLI::App* compare = app.add_subcommand(
      "compare", "score planner rankings against an embedded measured table");
  add_common(compare, /*needs_parallel=*/false);
  compare->add_option("--reference", reference_id,
                      "measured table id (see error message for the list)")
      ->required();

  CLI::App* verify = app.add_subcommand(
      "verify", "run the built-in brute-force oracle battery");
  (void)verify;

  // CLI11 consumes a reversed argument stack.
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand(verify)) {
      const bool ok = verify_all(out);
      out << (ok ? "verification passed\n" : "verification FAILED\n");
      return ok ? 0 : 4;
    }

    ConfigSet cs = load_config(config_path);
    if (!mode_str.empty()) cs.workload.mode = mode_from_string(mode_str);
    validate(cs);
    if (log_enabled()) {
      err << "parashard: loaded " << config_path << " (model "
          << cs.model.name << ", world " << cs.cluster.world << ")\n";
    }

    const OutputFormat fmt = output_format_from_string(format_str);
    PlanOptions opt;
    opt.overlap_eff = overlap_eff;
    opt.include_embeddings = include_embeddings;
    opt.tp_flavor = resolve_flavor(flavor_str, cs.model.block_kind);
    opt.scan_mode = naive_scan ? ScanMode::naive : ScanMode::parallel_scan;

    if (app.got_subcommand(analyze)) {
      ParallelConfig cfg = parse_parallel(parallel_str);
      cfg.tp_flavor = opt.tp_flavor;
      const CostReport r =
          model_cost(cs.model, cs.workload, cs.cluster, cfg, opt);
      out << render_analysis(cs.model, cs.workload, cs.cluster, r, opt, fmt);
      if (!r.feasible && log_enabled()) {
        err << "parashard: infeasible: " << r.reason << "\n";
      }
      return r.feasible ? 0 : 2;
    }

    if (app.got_subcommand(plan)) {
      SLOSpec slo = cs.slo;
      if (slo_throughput >= 0.0) slo.min_throughput = slo_throughput;
      if (slo_ttft >= 0.0) slo.max_ttft = slo_ttft;
      EnumConstraints ec;
      if (strict_tp_intra_node) ec.max_tp = cs.cluster.devices_per_node;
      if (!parallel_str.empty()) {
        err << "error: plan enumerates strategies; --parallel only applies "
               "to analyze\n";
        return 1;
      }
      const RankedPlan ranked =
          plan_sweep(cs.model, cs.workload, cs.cluster, slo,
                     rank_key_from_string(rank_by_str), opt, ec);
      if (log_enabled()) {
        err << "parashard: " << ranked.feasible.size() << " feasible / "
            << ranked.feasible.size() + ranked.infeasible.size()
            << " strategies\n";
      }
      out << render_plan(ranked, fmt,
                         top > 0 ? std::optional<std::size_t>(top)
                                 : std::nullopt);
      return ranked.feasible.empty() ? 3 : 0;
    }

    if (app.got_subcommand(compare)) {
      const ReferenceTable* table = find_reference_table(reference_id);
      if (table == nullptr) {
        err << "error: unknown reference table '" << reference_id
            << "'; available:";
        for (const ReferenceTable& t : reference_tables()) {
          err << " " << t.id;
        }
        err << "\n";
        return 1;
      }
      const ComparisonResult cmp =
          compare_to_reference(*table, cs.model, cs.workload, cs.cluster, opt);
      out << render_comparison(cmp, fmt);
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand selected\n";
  return 1;
}

}  // namespace parashard
