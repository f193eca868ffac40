// SPDX-License-Identifier: Apache-2.0
//
// Rendering of planner results: deep-dive analysis of one strategy, the
// ranked sweep table, and reference-table comparisons, each in
// human/CSV/JSON form.  All renderers are pure string builders with
// deterministic output (same inputs, byte-identical text).
#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "parashard/compare.hpp"
#include "parashard/planner.hpp"

namespace parashard {

enum class OutputFormat { table, csv, json };

const char* to_string(OutputFormat f);
OutputFormat output_format_from_string(const std::string& s);

// Column schema shared by every CSV emitter of per-strategy rows.
extern const char* const kPlanCsvHeader;

// One strategy, explained: per-layer FLOPs by engine, memory terms,
// communication legs with their collective kind and link routing, the
// roofline verdict for the layer, and the assembled step time.
std::string render_analysis(const ModelSpec& m, const WorkloadSpec& w,
                            const ClusterSpec& cluster, const CostReport& r,
                            const PlanOptions& opt, OutputFormat fmt);

// Ranked sweep.  `top` limits output to the best `top` feasible strategies
// (and suppresses the infeasible listing); unset renders everything.
// CSV keeps full double precision; the human table rounds for reading.
std::string render_plan(const RankedPlan& plan, OutputFormat fmt,
                        std::optional<std::size_t> top = std::nullopt);

// Side-by-side measured-vs-planner table with rank-agreement summary.
std::string render_comparison(const ComparisonResult& cmp, OutputFormat fmt);

}  // namespace parashard
