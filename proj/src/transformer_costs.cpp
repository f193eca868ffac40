// SPDX-License-Identifier: Apache-2.0
#include "parashard/transformer_costs.hpp"

#include <stdexcept>

namespace parashard {
namespace {

void require_transformer(const ModelSpec& m, const char* who) {
  if (m.block_kind != BlockKind::transformer) {
    throw ConfigError(std::string(who) + ": model is not a transformer block");
  }
}

// Exactly one of {tp, cp} may exceed 1 in the single-strategy comm API;
// combined configs are assembled by the planner, which scales each
// strategy's tensor by the dimensions the other strategies shard.
void require_single_strategy(const ParallelConfig& cfg, const char* who) {
  if (cfg.tp > 1 && cfg.cp > 1) {
    throw ConfigError(std::string(who) +
                      ": select one strategy per call (tp and cp both > 1)");
  }
}

}  // namespace

FlopSplit gqa_flops_total(const ModelSpec& m, const WorkloadSpec& w) {
  require_transformer(m, "gqa_flops_total");
  const Rat b = w.b, s = w.s, d = m.d, a = m.a, k = m.k, dh = m.d_h;
  FlopSplit f;
  f.cube = Rat(4) * b * s * d * d      // Q and output projections
           + Rat(4) * b * s * k * dh * d  // K and V projections
           + Rat(4) * b * s * s * d;      // QK^T and scores*V
  f.vec = Rat(5) * b * s * s * a;         // softmax passes
  return f;
}

FlopSplit gqa_flops_per_device(const ModelSpec& m, const WorkloadSpec& w,
                               const ParallelConfig& cfg) {
  const FlopSplit t = gqa_flops_total(m, w);
  const Rat deg = Rat(cfg.dp) * Rat(cfg.tp) * Rat(cfg.cp);
  return {t.cube / deg, t.vec / deg};
}

Rat gqa_activation_bytes(const ModelSpec& m, const WorkloadSpec& w,
                         const ParallelConfig& cfg) {
  require_transformer(m, "gqa_activation_bytes");
  const Rat b = w.b, s = w.s, d = m.d;
  const Rat kv_frac = Rat(m.k) / Rat(m.a);
  const Rat bsd = b * s * d;
  const Rat elems =
      bsd + (Rat(2) * bsd + Rat(2) * bsd * kv_frac) / Rat(cfg.tp);
  return elems / (Rat(cfg.dp) * Rat(cfg.cp)) * Rat(m.a_byte);
}

Rat gqa_weight_bytes(const ModelSpec& m, const ParallelConfig& cfg) {
  require_transformer(m, "gqa_weight_bytes");
  const Rat d = m.d;
  const Rat params = Rat(2) * d * d * (Rat(1) + Rat(m.k) / Rat(m.a));
  return params / Rat(cfg.tp) * Rat(m.w_byte);
}

FlopSplit mlp_flops_total(const ModelSpec& m, const WorkloadSpec& w) {
  require_transformer(m, "mlp_flops_total");
  const Rat b = w.b, s = w.s, d = m.d, I = m.I;
  return {Rat(6) * b * s * d * I, Rat(5) * b * s * I};
}

FlopSplit mlp_flops_per_device(const ModelSpec& m, const WorkloadSpec& w,
                               const ParallelConfig& cfg) {
  const FlopSplit t = mlp_flops_total(m, w);
  const Rat deg = Rat(cfg.dp) * Rat(cfg.tp) * Rat(cfg.cp);
  return {t.cube / deg, t.vec / deg};
}

Rat mlp_activation_bytes(const ModelSpec& m, const WorkloadSpec& w,
                         const ParallelConfig& cfg) {
  require_transformer(m, "mlp_activation_bytes");
  const Rat b = w.b, s = w.s, d = m.d, I = m.I;
  const Rat elems = Rat(2) * b * s * d + Rat(4) * b * s * I / Rat(cfg.tp);
  return elems / (Rat(cfg.dp) * Rat(cfg.cp)) * Rat(m.a_byte);
}

Rat mlp_weight_bytes(const ModelSpec& m, const ParallelConfig& cfg) {
  require_transformer(m, "mlp_weight_bytes");
  return Rat(3) * Rat(m.d) * Rat(m.I) / Rat(cfg.tp) * Rat(m.w_byte);
}

Rat transformer_layer_params(const ModelSpec& m) {
  require_transformer(m, "transformer_layer_params");
  const Rat d = m.d;
  return Rat(2) * d * d * (Rat(1) + Rat(m.k) / Rat(m.a)) +
         Rat(3) * d * Rat(m.I);
}

CommVolume attn_comm_elements(const ModelSpec& m, const WorkloadSpec& w,
                              const ParallelConfig& cfg) {
  require_transformer(m, "attn_comm_elements");
  require_single_strategy(cfg, "attn_comm_elements");
  const Rat b = w.b, s = w.s, d = m.d;
  if (cfg.tp > 1) {
    const std::int64_t t = static_cast<std::int64_t>(cfg.tp);
    switch (cfg.tp_flavor) {
      case TpFlavor::plain:
        return {Rat(4) * Rat(t - 1, t) * b * s * d,
                CollectiveKind::all_reduce};
      case TpFlavor::tpsp:
        // Same volume as plain: the all-reduce is split into an all-gather
        // and a reduce-scatter around the sequence-sharded residual.
        return {Rat(4) * Rat(t - 1, t) * b * s * d,
                CollectiveKind::ring_all_gather};
      case TpFlavor::tpup:
        // Four head<->sequence all-to-all redistributions of Q/K/V/out.
        return {Rat(4) * Rat(t - 1, t * t) * b * s * Rat(m.d_h) *
                    (Rat(m.a) + Rat(m.k)),
                CollectiveKind::all_to_all};
    }
  }
  if (cfg.cp > 1) {
    const std::int64_t c = static_cast<std::int64_t>(cfg.cp);
    // Ring attention: each device forwards its K and V shards around the
    // ring, send+recv, forward and backward.
    return {Rat(4) * Rat(c - 1, c) * b * s * Rat(m.k) * Rat(m.d_h),
            CollectiveKind::p2p_send_recv};
  }
  return {Rat(0), CollectiveKind::all_reduce};
}

Rat dp_gradient_sync_bytes(const Rat& params_per_device, const ModelSpec& m,
                           const ParallelConfig& cfg) {
  if (cfg.dp <= 1) return Rat(0);
  const std::int64_t dp = static_cast<std::int64_t>(cfg.dp);
  return Rat(2) * Rat(dp - 1, dp) * params_per_device * Rat(m.w_byte);
}

BlockCost transformer_block_cost(const ModelSpec& m, const WorkloadSpec& w,
                                 const ParallelConfig& cfg) {
  BlockCost c;
  const FlopSplit attn = gqa_flops_per_device(m, w, cfg);
  const FlopSplit mlp = mlp_flops_per_device(m, w, cfg);
  c.flops = {attn.cube + mlp.cube, attn.vec + mlp.vec};
  c.act_bytes = gqa_activation_bytes(m, w, cfg) + mlp_activation_bytes(m, w, cfg);
  c.weight_bytes = gqa_weight_bytes(m, cfg) + mlp_weight_bytes(m, cfg);
  const CommVolume comm = attn_comm_elements(m, w, cfg);
  c.comm_elements = comm.elements;
  c.comm_kind = comm.kind;
  return c;
}

}  // namespace parashard
