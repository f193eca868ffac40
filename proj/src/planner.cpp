// SPDX-License-Identifier: Apache-2.0
#include "parashard/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "parashard/collectives.hpp"
#include "parashard/metrics.hpp"

namespace parashard {
namespace {

std::string format_gb(const Rat& bytes) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", bytes.to_double() / 1e9);
  return buf;
}

// Ring rounds a strategy's per-layer exchange serializes into.  Ring
// attention and the Mamba state all-gather both circulate shards n-1 times;
// collective kinds carry their own step counts.
std::uint64_t strategy_steps(CollectiveKind kind, std::uint64_t n) {
  if (kind == CollectiveKind::p2p_send_recv) return n - 1;
  return ring_steps(kind, n);
}

bool tuple_greater(const ParallelConfig& a, const ParallelConfig& b) {
  if (a.dp != b.dp) return a.dp > b.dp;
  if (a.pp != b.pp) return a.pp > b.pp;
  if (a.tp != b.tp) return a.tp > b.tp;
  return a.cp > b.cp;
}

std::vector<double> midranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = mid;
    i = j + 1;
  }
  return rank;
}

}  // namespace

std::vector<ParallelConfig> enumerate_configs(std::uint64_t world,
                                              const EnumConstraints& c) {
  if (world == 0) {
    throw std::invalid_argument("enumerate_configs: world == 0");
  }
  std::vector<ParallelConfig> out;
  for (std::uint64_t dp = 1; dp <= world; ++dp) {
    if (world % dp != 0) continue;
    const std::uint64_t rest1 = world / dp;
    for (std::uint64_t pp = 1; pp <= rest1; ++pp) {
      if (rest1 % pp != 0) continue;
      if (c.max_pp && pp > *c.max_pp) continue;
      const std::uint64_t rest2 = rest1 / pp;
      for (std::uint64_t tp = 1; tp <= rest2; ++tp) {
        if (rest2 % tp != 0) continue;
        if (c.max_tp && tp > *c.max_tp) continue;
        ParallelConfig cfg;
        cfg.dp = dp;
        cfg.pp = pp;
        cfg.tp = tp;
        cfg.cp = rest2 / tp;
        out.push_back(cfg);
      }
    }
  }
  return out;
}

bool group_is_intra_node(std::uint64_t stride, std::uint64_t size,
                         const ClusterSpec& cluster) {
  if (size <= 1) return true;
  const std::uint64_t span = stride * size;
  // The group's ranks are {base + i*stride}; with node boundaries every
  // devices_per_node ranks, the group stays inside one node exactly when
  // its span tiles the node.  Partial overlaps are billed conservatively at
  // the inter-node rate.
  return span <= cluster.devices_per_node &&
         cluster.devices_per_node % span == 0;
}

const char* to_string(RankKey k) {
  switch (k) {
    case RankKey::mfu: return "mfu";
    case RankKey::throughput: return "throughput";
    case RankKey::step_time: return "step_time";
    case RankKey::memory: return "memory";
  }
  return "?";
}

RankKey rank_key_from_string(const std::string& s) {
  if (s == "mfu") return RankKey::mfu;
  if (s == "throughput") return RankKey::throughput;
  if (s == "step_time") return RankKey::step_time;
  if (s == "memory") return RankKey::memory;
  throw ConfigError("unknown rank key: " + s +
                    " (expected mfu|throughput|step_time|memory)");
}

double rank_score(const CostReport& r, RankKey key) {
  switch (key) {
    case RankKey::mfu: return r.mfu_pct;
    case RankKey::throughput: return r.throughput_tok_s;
    case RankKey::step_time: return r.step_time_s;
    case RankKey::memory: return r.mem_bytes();
  }
  return 0.0;
}

CostReport model_cost(const ModelSpec& m, const WorkloadSpec& w,
                      const ClusterSpec& cluster, const ParallelConfig& cfg,
                      const PlanOptions& opt) {
  validate(m);
  validate(w, m);
  validate(cluster);
  validate_binding(cfg, cluster);

  CostReport r;
  r.cfg = cfg;
  const bool training = w.mode == Mode::training;

  // Data parallelism enters as the number of micro-batch waves each
  // replica runs, not as a divisor inside the layer formulas: every dp rank
  // holds its own micro-batch of b sequences.
  if (w.global_batch % (w.b * cfg.dp) != 0) {
    r.feasible = false;
    r.reason = "microbatch: global_batch " + std::to_string(w.global_batch) +
               " not divisible by b*dp = " + std::to_string(w.b * cfg.dp);
    return r;
  }
  const std::uint64_t M = w.global_batch / (w.b * cfg.dp);
  r.microbatches = M;
  r.layers_per_stage = (m.layers + cfg.pp - 1) / cfg.pp;  // max-loaded stage

  ParallelConfig local = cfg;  // per-micro-batch view of one dp replica
  local.dp = 1;

  FlopSplit layer_flops;             // per device, one micro-batch
  Rat layer_act, layer_weight, layer_params;
  if (m.block_kind == BlockKind::transformer) {
    const FlopSplit attn = gqa_flops_per_device(m, w, local);
    const FlopSplit mlp = mlp_flops_per_device(m, w, local);
    layer_flops = {attn.cube + mlp.cube, attn.vec + mlp.vec};
    layer_act = gqa_activation_bytes(m, w, local) +
                mlp_activation_bytes(m, w, local);
    layer_weight = gqa_weight_bytes(m, local) + mlp_weight_bytes(m, local);
    layer_params = transformer_layer_params(m);
  } else {
    layer_flops = mamba_flops_per_device(m, w, local, opt.scan_mode);
    layer_act = mamba_activation_bytes(m, w, local);
    layer_weight = mamba_weight_bytes(m, local);
    layer_params = mamba_layer_params(m);
  }

  const Rat stages = Rat(r.layers_per_stage);
  const Rat waves = Rat(M);
  const Rat pass_mult = Rat(training ? 3 : 1);  // 1 fwd + ~2x bwd

  const Rat cube_step = layer_flops.cube * stages * waves * pass_mult;
  const Rat vec_step = layer_flops.vec * stages * waves * pass_mult;
  r.flops_cube = cube_step.to_double();
  r.flops_vector = vec_step.to_double();

  // Memory: weights for this stage, activations for every micro-batch a
  // 1F1B schedule keeps in flight, and optimizer/gradient state.
  const std::uint64_t in_flight = std::min<std::uint64_t>(cfg.pp, M);
  Rat weight_total = layer_weight * stages;
  if (opt.include_embeddings) {
    weight_total += Rat(m.v) * Rat(m.d) * Rat(m.w_byte);
  }
  const Rat act_total = layer_act * stages * Rat(in_flight);
  const Rat params_pd = layer_params / Rat(cfg.tp) * stages;
  const Rat state_total =
      training ? params_pd * Rat(cluster.training_state_bytes_per_param)
               : Rat(0);
  r.weight_bytes = weight_total.to_double();
  r.act_bytes = act_total.to_double();
  r.train_state_bytes = state_total.to_double();

  // Communication.  Per-layer volumes come from the single-strategy block
  // models; under a combined config each strategy's tensors are already
  // sharded by the other strategies, so TP traffic shrinks by cp (sequence
  // shards) and CP traffic by tp (head/state shards).
  double comm_time = 0.0;
  auto add_comm = [&](Rat bytes, std::uint64_t steps, std::uint64_t stride,
                      std::uint64_t size, double invocations) {
    if (bytes.is_zero() || size <= 1 || invocations <= 0.0) return;
    const bool intra = group_is_intra_node(stride, size, cluster);
    const double bw = intra ? cluster.intra_bw : cluster.inter_bw;
    const double vol = bytes.to_double();
    const double once = collective_time(vol, bw, opt.overlap_eff) +
                        cluster.link_latency * static_cast<double>(steps);
    comm_time += once * invocations;
    (intra ? r.comm_bytes_intra : r.comm_bytes_inter) += vol * invocations;
  };

  const double layer_invocations =
      static_cast<double>(r.layers_per_stage) * static_cast<double>(M);
  if (cfg.tp > 1) {
    ParallelConfig only_tp;
    only_tp.tp = cfg.tp;
    only_tp.tp_flavor = cfg.tp_flavor;
    const CommVolume v = m.block_kind == BlockKind::transformer
                             ? attn_comm_elements(m, w, only_tp)
                             : mamba_comm_elements(m, w, only_tp);
    const Rat bytes = v.elements / Rat(cfg.cp) * Rat(m.a_byte);
    add_comm(bytes, strategy_steps(v.kind, cfg.tp), 1, cfg.tp,
             layer_invocations);
  }
  if (cfg.cp > 1) {
    ParallelConfig only_cp;
    only_cp.cp = cfg.cp;
    const CommVolume v = m.block_kind == BlockKind::transformer
                             ? attn_comm_elements(m, w, only_cp)
                             : mamba_comm_elements(m, w, only_cp);
    const Rat bytes = v.elements / Rat(cfg.tp) * Rat(m.a_byte);
    add_comm(bytes, strategy_steps(v.kind, cfg.cp), cfg.tp, cfg.cp,
             layer_invocations);
  }
  if (cfg.pp > 1) {
    // Stage boundary: each device hands its sequence shard of the residual
    // stream to the next stage, once forward (plus once backward when
    // training) per micro-batch.
    const Rat bytes =
        Rat(w.b) * Rat(w.s) / Rat(cfg.cp) * Rat(m.d) * Rat(m.a_byte);
    const double sends =
        static_cast<double>(M) * (training ? 2.0 : 1.0);
    add_comm(bytes, 1, cfg.tp * cfg.cp, cfg.pp, sends);
  }
  if (training && cfg.dp > 1) {
    const Rat bytes = dp_gradient_sync_bytes(params_pd, m, cfg);
    add_comm(bytes, ring_steps(CollectiveKind::all_reduce, cfg.dp),
             cfg.tp * cfg.cp * cfg.pp, cfg.dp, 1.0);
  }

  r.compute_time_s = cube_step.to_double() / cluster.cube_peak +
                     vec_step.to_double() / cluster.vector_peak;
  r.comm_time_s = comm_time;
  r.bubble_fraction =
      cfg.pp > 1 ? static_cast<double>(cfg.pp - 1) /
                       static_cast<double>(M + cfg.pp - 1)
                 : 0.0;
  r.step_time_s = (r.compute_time_s + r.comm_time_s) / (1.0 - r.bubble_fraction);

  const double tokens_per_step =
      static_cast<double>(w.global_batch) * static_cast<double>(w.s);
  r.throughput_tok_s = tokens_per_step / r.step_time_s;

  // MFU uses the true model FLOPs (actual layer count, every device), not
  // the ceiling-padded per-stage figure.
  const Rat total_model_flops = layer_flops.total() *
                                Rat(cfg.tp) * Rat(cfg.cp) *  // undo sharding
                                Rat(m.layers) * waves * Rat(cfg.dp) * pass_mult;
  r.mfu_pct = mfu_percent(
      total_model_flops.to_double() / r.step_time_s,
      static_cast<double>(cluster.world) * cluster.cube_peak);

  const Rat mem_need = weight_total + act_total + state_total;
  if (mem_need > Rat(cluster.mem_capacity)) {
    r.feasible = false;
    r.reason = "memory: " + format_gb(mem_need) + " GB needed > " +
               format_gb(Rat(cluster.mem_capacity)) + " GB capacity";
  } else {
    r.feasible = true;
  }
  return r;
}

RankedPlan rank(std::vector<CostReport> reports, const SLOSpec& slo,
                RankKey key) {
  validate(slo);
  RankedPlan plan;
  plan.key = key;
  for (CostReport& r : reports) {
    if (r.feasible && slo.min_throughput &&
        r.throughput_tok_s < *slo.min_throughput) {
      r.feasible = false;
      r.reason = "slo: throughput below floor";
    }
    if (r.feasible && slo.max_ttft && r.step_time_s > *slo.max_ttft) {
      r.feasible = false;
      r.reason = "slo: first-token latency above cap";
    }
    (r.feasible ? plan.feasible : plan.infeasible).push_back(std::move(r));
  }
  const bool descending = key == RankKey::mfu || key == RankKey::throughput;
  std::stable_sort(plan.feasible.begin(), plan.feasible.end(),
                   [&](const CostReport& a, const CostReport& b) {
                     const double sa = rank_score(a, key);
                     const double sb = rank_score(b, key);
                     if (sa != sb) return descending ? sa > sb : sa < sb;
                     return tuple_greater(a.cfg, b.cfg);
                   });
  return plan;
}

RankedPlan plan_sweep(const ModelSpec& m, const WorkloadSpec& w,
                      const ClusterSpec& cluster, const SLOSpec& slo,
                      RankKey key, const PlanOptions& opt,
                      const EnumConstraints& ec) {
  std::vector<CostReport> reports;
  for (ParallelConfig cfg : enumerate_configs(cluster.world, ec)) {
    // SSD layers only define the sequence-parallel tensor flavor.
    cfg.tp_flavor = m.block_kind == BlockKind::mamba2 ? TpFlavor::tpsp
                                                      : opt.tp_flavor;
    reports.push_back(model_cost(m, w, cluster, cfg, opt));
  }
  return rank(std::move(reports), slo, key);
}

double spearman_rank_correlation(const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("spearman: length mismatch");
  }
  const std::size_t n = xs.size();
  if (n < 2) {
    throw std::invalid_argument("spearman: need at least two samples");
  }
  const std::vector<double> rx = midranks(xs);
  const std::vector<double> ry = midranks(ys);
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  if (vx == 0.0 || vy == 0.0) return 0.0;  // a constant input has no order
  return cov / std::sqrt(vx * vy);
}

}  // namespace parashard
