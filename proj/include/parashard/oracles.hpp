// SPDX-License-Identifier: Apache-2.0
//
// Independent cross-checks for the closed-form cost model.  Every oracle
// here derives its answer by brute force -- walking loop nests and
// incrementing counters, enumerating tuples, or simulating a schedule --
// sharing no algebra with the formulas it validates.  Tests and the
// `verify` subcommand treat disagreement as a model bug.
#pragma once

#include <cstdint>
#include <ostream>

#include "parashard/config.hpp"
#include "parashard/mamba_costs.hpp"
#include "parashard/transformer_costs.hpp"

namespace parashard {

// Operation tally from a literal walk of a block's compute loops: one
// cube_macs increment per multiply-accumulate of a dense contraction, one
// vec_ops increment per elementwise operation.  FLOPs = 2*macs for
// contractions, vec_ops as-is.
struct OpTally {
  std::uint64_t cube_macs = 0;
  std::uint64_t vec_ops = 0;

  Rat cube_flops() const { return Rat(cube_macs) * Rat(2); }
  Rat vec_flops() const { return Rat(vec_ops); }
  bool operator==(const OpTally&) const = default;
};

// Grouped-query attention: QKV/output projections, QK^T scores over the
// full s x s square, five softmax passes per score, scores x V.
OpTally count_gqa_ops(const ModelSpec& m, const WorkloadSpec& w);

// Gated MLP: up/gate/down projections plus five gating ops per
// intermediate element.
OpTally count_mlp_ops(const ModelSpec& m, const WorkloadSpec& w);

// Mamba input/output projections (cube only).
OpTally count_mamba_proj_ops(const ModelSpec& m, const WorkloadSpec& w);

// Chunked SSD kernel; step 4 state propagation tallies as vec_ops (2 per
// combine multiply-accumulate), everything else as cube_macs.
OpTally count_ssd_ops(const ModelSpec& m, const WorkloadSpec& w,
                      ScanMode mode);

// Number of (dp, pp, tp, cp) tuples with product == world, by exhaustive
// scan of the full 4-cube (optionally bounded like the enumerator).
std::uint64_t count_factorizations(std::uint64_t world,
                                   std::uint64_t max_pp = 0,
                                   std::uint64_t max_tp = 0);

// Pipeline bubble from an explicit 1F1B slot grid: stage i runs micro-batch
// j in slot i+j; the idle share of the schedule's makespan is the bubble.
double bubble_fraction_from_grid(std::uint64_t pp,
                                 std::uint64_t microbatches);

// Runs the full oracle battery (random tiny transformer and Mamba specs
// against the closed forms, recurrence kernel agreement, collective
// identities, enumeration counts, bubble grid), printing one
// [PASS]/[FAIL] line per family.  Returns true iff everything passed.
bool verify_all(std::ostream& out);

}  // namespace parashard
