// SPDX-License-Identifier: Apache-2.0
#include "parashard/mamba_costs.hpp"

#include <stdexcept>

namespace parashard {
namespace {

void require_mamba(const ModelSpec& m, const char* who) {
  if (m.block_kind != BlockKind::mamba2) {
    throw ConfigError(std::string(who) + ": model is not a mamba2 block");
  }
}

void require_chunking(const ModelSpec& m, const WorkloadSpec& w,
                      const char* who) {
  if (m.l == 0 || w.s % m.l != 0) {
    throw ConfigError(std::string(who) + ": chunk length l=" +
                      std::to_string(m.l) + " must divide s=" +
                      std::to_string(w.s));
  }
}

void require_single_strategy(const ParallelConfig& cfg, const char* who) {
  if (cfg.tp > 1 && cfg.cp > 1) {
    throw ConfigError(std::string(who) +
                      ": select one strategy per call (tp and cp both > 1)");
  }
}

}  // namespace

MambaProjFlops mamba_proj_flops_total(const ModelSpec& m,
                                      const WorkloadSpec& w) {
  require_mamba(m, "mamba_proj_flops_total");
  const DerivedDims dd = derive_dims(m);
  const Rat b = w.b, s = w.s, d = m.d;
  MambaProjFlops f;
  f.in_proj = Rat(2) * b * s * d * Rat(dd.d_inproj);
  f.out_proj = Rat(2) * b * s * Rat(dd.d_inner) * d;
  return f;
}

SsdBreakdown ssd_flops_total(const ModelSpec& m, const WorkloadSpec& w,
                             ScanMode mode) {
  require_mamba(m, "ssd_flops_total");
  require_chunking(m, w, "ssd_flops_total");
  const Rat b = w.b, l = m.l, h = m.h, n = m.n, p = m.p;
  const Rat c = Rat(w.s) / l;  // chunk count
  SsdBreakdown f;
  f.step1 = Rat(2) * b * c * h * l * l * n;
  f.step2 = Rat(2) * b * c * h * l * l * p;
  f.step3 = Rat(2) * b * c * h * l * p * n;
  f.step4 = mode == ScanMode::naive
                ? Rat(2) * b * h * c * (c + Rat(1)) * p * n
                : Rat(2) * b * h * c * p * n;
  f.step5 = Rat(2) * b * c * h * p * n * l;
  return f;
}

FlopSplit mamba_flops_per_device(const ModelSpec& m, const WorkloadSpec& w,
                                 const ParallelConfig& cfg, ScanMode mode) {
  const MambaProjFlops proj = mamba_proj_flops_total(m, w);
  const SsdBreakdown ssd = ssd_flops_total(m, w, mode);
  const Rat deg = Rat(cfg.dp) * Rat(cfg.tp) * Rat(cfg.cp);
  return {(proj.total() + ssd.cube()) / deg, ssd.vec() / deg};
}

SsdMemory ssd_memory_total(const ModelSpec& m, const WorkloadSpec& w) {
  require_mamba(m, "ssd_memory_total");
  require_chunking(m, w, "ssd_memory_total");
  const DerivedDims dd = derive_dims(m);
  const Rat b = w.b, s = w.s, d = m.d, l = m.l, h = m.h, n = m.n, p = m.p;
  const Rat c = Rat(w.s) / l;
  const Rat z = c + Rat(1);  // decay products include the incoming state
  const Rat ab = Rat(m.a_byte), wb = Rat(m.w_byte);

  SsdMemory mem;
  mem.in_proj = b * s * d * ab                  // block input
                + d * Rat(dd.d_inproj) * wb     // fused projection weight
                + b * s * Rat(dd.d_inproj) * ab;  // projected activations
  mem.odd_h_term = h * ab;
  mem.step1 = (b * l * c * n * h + b * h * c * n) * ab + mem.odd_h_term  //
              + b * c * h * l * l * ab;
  mem.step2 = (b * c * h * l * l + b * c * l * h * p) * ab  //
              + b * c * l * h * p * ab;
  mem.step3 = (b * c * l * h * p + b * c * l * h * n) * ab  //
              + b * c * h * p * n * ab;
  mem.step4 = b * h * z * c * ab          // chunk-to-chunk decay table
              + b * c * h * p * n * ab    // per-chunk boundary states
              + b * z * h * p * n * ab;   // carried states
  mem.step5 = (b * c * h * p * n + b * c * l * h * n) * ab  //
              + b * c * h * p * l * ab;
  mem.out_proj = b * s * Rat(dd.d_inner) * ab  //
                 + d * Rat(dd.d_inner) * wb    //
                 + b * s * d * ab;
  return mem;
}

Rat mamba_activation_bytes(const ModelSpec& m, const WorkloadSpec& w,
                           const ParallelConfig& cfg, bool* exact) {
  require_mamba(m, "mamba_activation_bytes");
  require_chunking(m, w, "mamba_activation_bytes");
  const DerivedDims dd = derive_dims(m);
  const Rat tp = cfg.tp, cp = cfg.cp, dp = cfg.dp;
  const Rat b = Rat(w.b) / dp;
  const Rat s = Rat(w.s) / cp;           // local sequence
  const Rat c = Rat(w.s) / Rat(m.l) / cp;  // local chunk count
  const Rat z = c + Rat(1);
  const Rat d = m.d, l = m.l, n = m.n, p = m.p;
  const Rat h = Rat(m.h) / tp;  // heads shard across tensor ranks
  const Rat ab = Rat(m.a_byte);

  if (exact) {
    // z-carrying and bare-h terms shrink sublinearly when the chunk count
    // is split, so degree * per-device != total under CP.
    *exact = cfg.cp == 1;
  }

  Rat bytes = Rat(0);
  // in_proj / out_proj activations; projection widths shard across tp.
  bytes += b * s * d * ab + b * s * Rat(dd.d_inproj) / tp * ab;
  bytes += b * s * Rat(dd.d_inner) / tp * ab + b * s * d * ab;
  // SSD intermediates, local shapes.
  bytes += (b * l * c * n * h + b * h * c * n + h) * ab + b * c * h * l * l * ab;
  bytes += (b * c * h * l * l + b * c * l * h * p) * ab + b * c * l * h * p * ab;
  bytes += (b * c * l * h * p + b * c * l * h * n) * ab + b * c * h * p * n * ab;
  bytes += b * h * z * c * ab + b * c * h * p * n * ab + b * z * h * p * n * ab;
  bytes += (b * c * h * p * n + b * c * l * h * n) * ab + b * c * h * p * l * ab;
  return bytes;
}

Rat mamba_weight_bytes(const ModelSpec& m, const ParallelConfig& cfg) {
  require_mamba(m, "mamba_weight_bytes");
  return mamba_layer_params(m) / Rat(cfg.tp) * Rat(m.w_byte);
}

Rat mamba_layer_params(const ModelSpec& m) {
  require_mamba(m, "mamba_layer_params");
  const DerivedDims dd = derive_dims(m);
  return Rat(m.d) * Rat(dd.d_inproj) + Rat(m.d) * Rat(dd.d_inner);
}

CommVolume mamba_comm_elements(const ModelSpec& m, const WorkloadSpec& w,
                               const ParallelConfig& cfg) {
  require_mamba(m, "mamba_comm_elements");
  require_single_strategy(cfg, "mamba_comm_elements");
  if (cfg.tp > 1) {
    if (cfg.tp_flavor != TpFlavor::tpsp) {
      throw ConfigError(
          "mamba_comm_elements: SSD layers support only the tpsp tensor "
          "flavor (got " +
          std::string(to_string(cfg.tp_flavor)) + ")");
    }
    return {Rat(m.d) * Rat(m.n) * Rat(w.s), CollectiveKind::all_reduce};
  }
  if (cfg.cp > 1) {
    // Only the recurrent boundary state crosses ranks; its size is
    // independent of the sequence length.
    return {Rat(m.d) * Rat(m.n) * Rat(cfg.cp), CollectiveKind::ring_all_gather};
  }
  return {Rat(0), CollectiveKind::all_reduce};
}

BlockCost mamba_block_cost(const ModelSpec& m, const WorkloadSpec& w,
                           const ParallelConfig& cfg, ScanMode mode) {
  BlockCost c;
  c.flops = mamba_flops_per_device(m, w, cfg, mode);
  c.act_bytes = mamba_activation_bytes(m, w, cfg);
  c.weight_bytes = mamba_weight_bytes(m, cfg);
  const CommVolume comm = mamba_comm_elements(m, w, cfg);
  c.comm_elements = comm.elements;
  c.comm_kind = comm.kind;
  return c;
}

std::vector<double> run_recurrence_direct(const std::vector<double>& a,
                                          const std::vector<double>& b,
                                          const std::vector<double>& x,
                                          double h0) {
  if (a.size() != b.size() || a.size() != x.size()) {
    throw std::invalid_argument("run_recurrence_direct: length mismatch");
  }
  std::vector<double> h(a.size());
  double state = h0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    state = a[t] * state + b[t] * x[t];
    h[t] = state;
  }
  return h;
}

std::vector<double> run_recurrence_chunked(const std::vector<double>& a,
                                           const std::vector<double>& b,
                                           const std::vector<double>& x,
                                           std::uint64_t chunk,
                                           double h0) {
  if (a.size() != b.size() || a.size() != x.size()) {
    throw std::invalid_argument("run_recurrence_chunked: length mismatch");
  }
  const std::size_t T = a.size();
  if (chunk == 0 || T % chunk != 0) {
    throw std::invalid_argument(
        "run_recurrence_chunked: chunk must divide the trace length");
  }
  const std::size_t L = chunk;
  const std::size_t C = T / L;

  // Step 1: per-chunk summaries.  Each chunk is an affine map of its start
  // state: h_end = A_c * h_start + U_c.
  std::vector<double> A(C), U(C);
  for (std::size_t ci = 0; ci < C; ++ci) {
    double prod = 1.0, acc = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      const std::size_t t = ci * L + j;
      acc = a[t] * acc + b[t] * x[t];
      prod *= a[t];
    }
    A[ci] = prod;
    U[ci] = acc;
  }

  // Step 2: associative scan over the affine maps yields every chunk's
  // start state.  (f2 . f1)(h) = A2*(A1*h + U1) + U2.
  std::vector<double> start(C);
  double carryA = 1.0, carryU = 0.0;
  for (std::size_t ci = 0; ci < C; ++ci) {
    start[ci] = carryA * h0 + carryU;
    carryU = A[ci] * carryU + U[ci];
    carryA = A[ci] * carryA;
  }

  // Step 3: intra-chunk reconstruction from the start state using the
  // unrolled closed form h_j = (prod a) * h_start + sum_i (prod a) b_i x_i.
  std::vector<double> h(T);
  for (std::size_t ci = 0; ci < C; ++ci) {
    for (std::size_t j = 0; j < L; ++j) {
      double sum = 0.0, w = 1.0;
      for (std::size_t i = j + 1; i-- > 0;) {
        const std::size_t t = ci * L + i;
        sum += w * b[t] * x[t];
        w *= a[t];
      }
      h[ci * L + j] = w * start[ci] + sum;
    }
  }
  return h;
}

}  // namespace parashard
