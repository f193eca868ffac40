// SPDX-License-Identifier: Apache-2.0
//
// Strategy enumeration and whole-model cost estimation: walks every
// (dp, pp, tp, cp) factorization of the world size, assembles per-device
// step costs from the per-layer block models, prunes by device memory, and
// ranks the survivors.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parashard/config.hpp"
#include "parashard/mamba_costs.hpp"
#include "parashard/transformer_costs.hpp"

namespace parashard {

// Optional pruning applied during enumeration.  Unset bounds admit every
// factorization.
struct EnumConstraints {
  std::optional<std::uint64_t> max_pp;  // e.g. layer count
  std::optional<std::uint64_t> max_tp;  // e.g. devices_per_node
};

std::vector<ParallelConfig> enumerate_configs(std::uint64_t world,
                                              const EnumConstraints& c = {});

// Knobs for the step-time model that are choices rather than cluster facts.
struct PlanOptions {
  double overlap_eff = 0.0;          // fraction of comm hidden by compute
  bool include_embeddings = false;   // add v*d weights on first/last stage
  TpFlavor tp_flavor = TpFlavor::plain;  // transformer TP flavor in sweeps
  ScanMode scan_mode = ScanMode::parallel_scan;
};

// Everything the planner knows about one strategy on one model/cluster.
// Byte and FLOP quantities are per device per optimizer step (or per
// prefill pass); times are seconds.
struct CostReport {
  ParallelConfig cfg;
  bool feasible = false;
  std::string reason;  // non-empty iff infeasible

  double flops_cube = 0.0;
  double flops_vector = 0.0;
  double weight_bytes = 0.0;
  double act_bytes = 0.0;
  double train_state_bytes = 0.0;
  double comm_bytes_intra = 0.0;  // volume routed over in-node links
  double comm_bytes_inter = 0.0;  // volume routed over cross-node links

  double compute_time_s = 0.0;
  double comm_time_s = 0.0;
  double bubble_fraction = 0.0;
  double step_time_s = 0.0;
  double throughput_tok_s = 0.0;
  double mfu_pct = 0.0;

  std::uint64_t microbatches = 0;
  std::uint64_t layers_per_stage = 0;

  double comm_bytes() const { return comm_bytes_intra + comm_bytes_inter; }
  double mem_bytes() const {
    return weight_bytes + act_bytes + train_state_bytes;
  }
};

// Which link a process group's traffic rides on, given the canonical rank
// layout (tp innermost, then cp, then pp, then dp).  A group whose span
// stride*size tiles evenly into a node stays on the fast fabric; anything
// that crosses a node boundary is billed at the inter-node rate.
bool group_is_intra_node(std::uint64_t stride, std::uint64_t size,
                         const ClusterSpec& cluster);

// Full-model per-device cost of one strategy.  Never throws for merely
// infeasible configs (those come back with feasible=false and a reason);
// throws ConfigError for specs that are invalid outright.
CostReport model_cost(const ModelSpec& m, const WorkloadSpec& w,
                      const ClusterSpec& cluster, const ParallelConfig& cfg,
                      const PlanOptions& opt = {});

enum class RankKey { mfu, throughput, step_time, memory };

const char* to_string(RankKey k);
RankKey rank_key_from_string(const std::string& s);

// Value a report is sorted by under the given key (mfu/throughput rank
// descending, step_time/memory ascending).
double rank_score(const CostReport& r, RankKey key);

struct RankedPlan {
  RankKey key = RankKey::mfu;
  std::vector<CostReport> feasible;    // sorted best-first
  std::vector<CostReport> infeasible;  // enumeration order, reasons set
};

// Applies SLO thresholds (violators become infeasible with reason "slo"),
// then sorts.  Ties break lexicographically on (dp, pp, tp, cp), larger dp
// first, so output order never depends on evaluation order.
RankedPlan rank(std::vector<CostReport> reports, const SLOSpec& slo,
                RankKey key);

// Sweep + rank over every factorization of cluster.world.
RankedPlan plan_sweep(const ModelSpec& m, const WorkloadSpec& w,
                      const ClusterSpec& cluster, const SLOSpec& slo,
                      RankKey key, const PlanOptions& opt = {},
                      const EnumConstraints& ec = {});

// Spearman rank correlation with midranks for ties; NaN-free for n >= 2
// inputs of equal length.  Used to score planner orderings against
// measured tables.
double spearman_rank_correlation(const std::vector<double>& xs,
                                 const std::vector<double>& ys);

}  // namespace parashard
