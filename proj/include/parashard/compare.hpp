// SPDX-License-Identifier: Apache-2.0
//
// Rank-agreement scoring between the planner's estimates and an embedded
// measured table: Spearman correlations plus best/worst membership, the
// validation contract for a model whose absolute numbers are hardware
// measurements we do not try to reproduce.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "parashard/planner.hpp"
#include "parashard/reference_tables.hpp"

namespace parashard {

struct ComparisonRow {
  ParallelConfig cfg;
  double measured_step_s = 0.0;
  double measured_ktok_s = 0.0;
  double measured_mem_gb = 0.0;
  double measured_mfu_pct = 0.0;
  CostReport planner;
  std::size_t measured_rank = 0;  // 1-based, measured MFU descending
  std::size_t planner_rank = 0;   // 1-based, planner MFU descending
};

struct ComparisonResult {
  std::string id;
  std::vector<ComparisonRow> rows;  // reference-table order
  double mfu_spearman = 0.0;
  double memory_spearman = 0.0;  // planner bytes vs measured GB (advisory)
  double step_time_spearman = 0.0;
  ParallelConfig measured_best;
  ParallelConfig planner_best;
  bool top1_agrees = false;
};

// Evaluates the planner on exactly the configs the reference table
// contains (absent configs are never imputed) and scores the orderings.
ComparisonResult compare_to_reference(const ReferenceTable& table,
                                      const ModelSpec& m,
                                      const WorkloadSpec& w,
                                      const ClusterSpec& cluster,
                                      const PlanOptions& opt = {});

// 1-based position of cfg among the rows when ordered by planner MFU,
// best first; 0 if cfg is not in the table.
std::size_t planner_rank_of(const ComparisonResult& r,
                            const ParallelConfig& cfg);

}  // namespace parashard
