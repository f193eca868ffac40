// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "parashard/collectives.hpp"
#include "parashard/config.hpp"
#include "parashard/rational.hpp"

namespace parashard {

// FLOPs split by execution engine.  Dense matmul work (counted as 2 FLOPs
// per multiply-accumulate) runs on the matrix ("cube") engine; softmax and
// activation-gating elementwise work runs on the vector engine.  The two
// have very different peaks, so they are never summed into one number until
// a report needs a total.
struct FlopSplit {
  Rat cube;
  Rat vec;

  Rat total() const { return cube + vec; }
  bool operator==(const FlopSplit&) const = default;
};

// Per-layer cost summary used by the planner: one block's FLOPs, activation
// and weight footprint, and its parallelism-induced communication.
struct BlockCost {
  FlopSplit flops;      // per device
  Rat act_bytes;        // per device, one micro-batch in flight
  Rat weight_bytes;     // per device
  Rat comm_elements;    // per device per micro-batch, 0 if no comm
  CollectiveKind comm_kind = CollectiveKind::all_reduce;
};

// ---- GQA attention ----
//
// Whole-layer FLOPs (all devices combined) for grouped-query attention with
// a query heads, k key/value heads of dimension d_h, hidden size d = a*d_h:
//   cube   = 4*b*s*d^2 + 4*b*s*k*d_h*d + 4*b*s^2*d
//            (QKV + output projections, QK^T, scores*V; full s^2 scores)
//   vector = 5*b*s^2*a  (softmax: max, subtract, exp, sum, divide)
FlopSplit gqa_flops_total(const ModelSpec& m, const WorkloadSpec& w);

// Per-device share.  Every supported strategy divides attention FLOPs
// evenly, so this is total / (dp*tp*cp); pp shards layers, not the layer.
FlopSplit gqa_flops_per_device(const ModelSpec& m, const WorkloadSpec& w,
                               const ParallelConfig& cfg);

// Per-device activation bytes for one attention layer:
//   (b*s*d  +  (2*b*s*d + 2*b*s*d*(k/a)) / tp) / (dp*cp) * a_byte
// The residual input b*s*d is replicated across tp; Q and the attention
// output shard by heads; K/V carry the k/a grouping factor.
Rat gqa_activation_bytes(const ModelSpec& m, const WorkloadSpec& w,
                         const ParallelConfig& cfg);

// Per-device weight bytes: 2*d^2*(1 + k/a) / tp * w_byte.  Replicated
// across dp and cp.
Rat gqa_weight_bytes(const ModelSpec& m, const ParallelConfig& cfg);

// ---- Gated (SwiGLU-style) MLP ----
//
//   cube   = 6*b*s*d*I   (up, gate, down projections)
//   vector = 5*b*s*I     (sigmoid 4 ops + 1 multiply per gated element)
FlopSplit mlp_flops_total(const ModelSpec& m, const WorkloadSpec& w);
FlopSplit mlp_flops_per_device(const ModelSpec& m, const WorkloadSpec& w,
                               const ParallelConfig& cfg);

// (2*b*s*d + 4*b*s*I/tp) / (dp*cp) * a_byte
Rat mlp_activation_bytes(const ModelSpec& m, const WorkloadSpec& w,
                         const ParallelConfig& cfg);

// 3*d*I / tp * w_byte
Rat mlp_weight_bytes(const ModelSpec& m, const ParallelConfig& cfg);

// Parameter count of one transformer layer (attention + MLP weights).
Rat transformer_layer_params(const ModelSpec& m);

struct CommVolume {
  Rat elements;  // activation elements moved per device, forward+backward
  CollectiveKind kind = CollectiveKind::all_reduce;
};

// Forward+backward communication elements per attention layer per device
// for a single strategy applied in isolation (exactly one of tp/cp > 1, or
// neither).  Degrees come from cfg; exactly one strategy must be selected.
//
//   DP               0 (no per-layer traffic; gradients are synced per step)
//   plain TP         4*(tp-1)/tp * b*s*d          ring all-reduce
//   TPSP             4*(tp-1)/tp * b*s*d          all-gather + reduce-scatter
//   TPUP             4*(tp-1)/tp^2 * b*s*d_h*(a+k)   all-to-all, 4 per layer
//   CP               4*(cp-1)/cp * b*s*k*d_h      ring KV point-to-point
CommVolume attn_comm_elements(const ModelSpec& m, const WorkloadSpec& w,
                              const ParallelConfig& cfg);

// Gradient synchronization bytes per device per optimizer step for data
// parallelism: one ring all-reduce over the local parameters,
// 2*(dp-1)/dp * params * w_byte.
Rat dp_gradient_sync_bytes(const Rat& params_per_device, const ModelSpec& m,
                           const ParallelConfig& cfg);

// One transformer layer (attention + MLP) under cfg, single-strategy comm.
BlockCost transformer_block_cost(const ModelSpec& m, const WorkloadSpec& w,
                                 const ParallelConfig& cfg);

}  // namespace parashard
