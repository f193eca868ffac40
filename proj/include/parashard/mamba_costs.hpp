// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "parashard/collectives.hpp"
#include "parashard/config.hpp"
#include "parashard/rational.hpp"
#include "parashard/transformer_costs.hpp"

namespace parashard {

// How the inter-chunk state propagation of the chunked SSD kernel is
// costed: naive materializes every chunk-to-chunk decay product (quadratic
// in the number of chunks), parallel_scan keeps it linear.
enum class ScanMode { parallel_scan, naive };

// FLOPs of the chunked state-space (SSD) kernel, split by computation step.
// With c = s/l chunks, h heads of dimension p, state size n per head:
//   step1  2*b*c*h*l^2*n   intra-chunk C.B^T score tensor
//   step2  2*b*c*h*l^2*p   scores x inputs (with decay applied)
//   step3  2*b*c*h*l*p*n   per-chunk boundary states from B and X
//   step4  2*b*h*c*p*n         (parallel_scan)  inter-chunk state combine
//          2*b*h*c*(c+1)*p*n   (naive)          all decay products
//   step5  2*b*c*h*p*n*l   contribution of carried state to outputs
// Steps 1,2,3,5 are dense contractions (cube engine); step 4 and the
// elementwise decay applications run on the vector engine.
struct SsdBreakdown {
  Rat step1, step2, step3, step4, step5;

  Rat cube() const { return step1 + step2 + step3 + step5; }
  Rat vec() const { return step4; }
  Rat total() const { return cube() + vec(); }
};

// Memory footprint (operands + outputs, per the per-GEMM accounting used
// throughout) of one SSD layer, in bytes.  in_proj/out_proj include their
// weight matrices; step1..step5 are pure activations.
//
// The step1 operand sum carries a bare "+h" addend with no batch or
// sequence factor.  It is dimensionally odd but kept as written (it is the
// per-head decay-rate channel); `odd_h_term` records its byte count so
// reports can flag it.
struct SsdMemory {
  Rat in_proj, step1, step2, step3, step4, step5, out_proj;
  Rat odd_h_term;

  Rat total() const {
    return in_proj + step1 + step2 + step3 + step4 + step5 + out_proj;
  }
};

// Input/output projection FLOPs (whole layer, all devices).
struct MambaProjFlops {
  Rat in_proj;   // 2*b*s*d*d_inproj
  Rat out_proj;  // 2*b*s*d_inner*d

  Rat total() const { return in_proj + out_proj; }
};

MambaProjFlops mamba_proj_flops_total(const ModelSpec& m,
                                      const WorkloadSpec& w);

SsdBreakdown ssd_flops_total(const ModelSpec& m, const WorkloadSpec& w,
                             ScanMode mode);

// Per-device FLOPs: total / (dp*tp*cp).  TP shards heads, CP shards the
// sequence, DP shards the batch; each divides every step evenly (step 4's
// naive variant is costed on global chunk count, then divided).
FlopSplit mamba_flops_per_device(const ModelSpec& m, const WorkloadSpec& w,
                                 const ParallelConfig& cfg, ScanMode mode);

SsdMemory ssd_memory_total(const ModelSpec& m, const WorkloadSpec& w);

// Per-device activation bytes for one layer (weights excluded).  TP shards
// the head dimension and projection widths; CP shards the sequence/chunk
// count.  Terms quadratic in chunk count (the naive-decay buffer) and the
// bare +h addend do not divide exactly under CP; *exact is cleared when
// such terms are present and cp > 1.
Rat mamba_activation_bytes(const ModelSpec& m, const WorkloadSpec& w,
                           const ParallelConfig& cfg, bool* exact = nullptr);

// Per-device weight bytes: (d*d_inproj + d*d_inner) / tp * w_byte.
Rat mamba_weight_bytes(const ModelSpec& m, const ParallelConfig& cfg);

Rat mamba_layer_params(const ModelSpec& m);

// Communication for one SSD layer per device, single strategy, forward.
// These are scaling estimates with the constant fixed at 1: callers should
// label them as such in reports.
//   TPSP   d*n*s elements, all-reduce (partial-state reduction)
//   CP     d*n*cp elements, all-gather (boundary states; no sequence term)
//   DP     0
// Plain TP and TPUP are not defined for SSD layers and raise ConfigError.
CommVolume mamba_comm_elements(const ModelSpec& m, const WorkloadSpec& w,
                               const ParallelConfig& cfg);

// One SSD layer under cfg (single-strategy comm), per device.
BlockCost mamba_block_cost(const ModelSpec& m, const WorkloadSpec& w,
                           const ParallelConfig& cfg, ScanMode mode);

// ---- Reference recurrence kernels ----
//
// Scalar linear recurrence h_t = a_t*h_{t-1} + b_t*x_t, t = 1..T.  The
// direct form is the ground truth; the chunked form mirrors the SSD
// execution strategy (per-chunk closed forms combined through an
// associative scan over chunk summaries) and must agree to ~1e-9 relative.

struct RecurrenceTrace {
  std::vector<double> a, b, x;
  std::uint64_t chunk = 1;
};

std::vector<double> run_recurrence_direct(const std::vector<double>& a,
                                          const std::vector<double>& b,
                                          const std::vector<double>& x,
                                          double h0 = 0.0);

std::vector<double> run_recurrence_chunked(const std::vector<double>& a,
                                           const std::vector<double>& b,
                                           const std::vector<double>& x,
                                           std::uint64_t chunk,
                                           double h0 = 0.0);

}  // namespace parashard
