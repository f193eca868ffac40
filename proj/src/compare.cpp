// SPDX-License-Identifier: Apache-2.0
#include "parashard/compare.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace parashard {
namespace {

// Orders row indices best-first by planner MFU; equal scores fall back to
// the same descending-degree tuple order the planner uses so ranks stay
// deterministic.
std::vector<std::size_t> order_by(const std::vector<ComparisonRow>& rows,
                                  bool planner_side) {
  std::vector<std::size_t> idx(rows.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto key = [&](std::size_t i) {
    const auto& r = rows[i];
    double score = planner_side ? r.planner.mfu_pct : r.measured_mfu_pct;
    return std::make_tuple(score, r.cfg.dp, r.cfg.pp, r.cfg.tp, r.cfg.cp);
  };
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  return idx;
}

}  // namespace

ComparisonResult compare_to_reference(const ReferenceTable& table,
                                      const ModelSpec& m,
                                      const WorkloadSpec& w,
                                      const ClusterSpec& cluster,
                                      const PlanOptions& opt) {
  PlanOptions eff = opt;
  if (m.block_kind == BlockKind::mamba2) eff.tp_flavor = TpFlavor::tpsp;

  ComparisonResult out;
  out.id = table.id;
  out.rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    ComparisonRow c;
    c.cfg = row.config();
    c.cfg.tp_flavor = eff.tp_flavor;
    c.measured_step_s = row.step_time_s;
    c.measured_ktok_s = row.throughput_ktok_s;
    c.measured_mem_gb = row.mem_gb;
    c.measured_mfu_pct = row.mfu_pct;
    c.planner = model_cost(m, w, cluster, c.cfg, eff);
    out.rows.push_back(std::move(c));
  }

  auto planner_order = order_by(out.rows, /*planner_side=*/true);
  auto measured_order = order_by(out.rows, /*planner_side=*/false);
  for (std::size_t pos = 0; pos < planner_order.size(); ++pos) {
    out.rows[planner_order[pos]].planner_rank = pos + 1;
    out.rows[measured_order[pos]].measured_rank = pos + 1;
  }
  if (!out.rows.empty()) {
    out.planner_best = out.rows[planner_order.front()].cfg;
    out.measured_best = out.rows[measured_order.front()].cfg;
    out.top1_agrees = out.planner_best.dp == out.measured_best.dp &&
                      out.planner_best.pp == out.measured_best.pp &&
                      out.planner_best.tp == out.measured_best.tp &&
                      out.planner_best.cp == out.measured_best.cp;
  }

  std::vector<double> plan_mfu, meas_mfu, plan_mem, meas_mem, plan_step,
      meas_step;
  for (const auto& r : out.rows) {
    plan_mfu.push_back(r.planner.mfu_pct);
    meas_mfu.push_back(r.measured_mfu_pct);
    plan_mem.push_back(r.planner.mem_bytes());
    meas_mem.push_back(r.measured_mem_gb);
    plan_step.push_back(r.planner.step_time_s);
    meas_step.push_back(r.measured_step_s);
  }
  if (out.rows.size() >= 2) {
    out.mfu_spearman = spearman_rank_correlation(plan_mfu, meas_mfu);
    out.memory_spearman = spearman_rank_correlation(plan_mem, meas_mem);
    out.step_time_spearman = spearman_rank_correlation(plan_step, meas_step);
  }
  return out;
}

std::size_t planner_rank_of(const ComparisonResult& r,
                            const ParallelConfig& cfg) {
  for (const auto& row : r.rows) {
    if (row.cfg.dp == cfg.dp && row.cfg.pp == cfg.pp &&
        row.cfg.tp == cfg.tp && row.cfg.cp == cfg.cp)
      return row.planner_rank;
  }
  return 0;
}

}  // namespace parashard
