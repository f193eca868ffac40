// SPDX-License-Identifier: Apache-2.0
#include "parashard/oracles.hpp"

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "parashard/collectives.hpp"
#include "parashard/planner.hpp"

namespace parashard {
namespace {

// The counting loops mirror the execution shape of each block, not its
// formula: each nest walks the index space of one contraction and ticks the
// tally once per multiply-accumulate.  Loops are over uint64 bounds small
// enough that the whole battery stays in the low millions of iterations.

void tally_matmul(OpTally& t, std::uint64_t rows, std::uint64_t cols,
                  std::uint64_t inner) {
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::uint64_t c = 0; c < cols; ++c)
      for (std::uint64_t i = 0; i < inner; ++i) ++t.cube_macs;
}

}  // namespace

OpTally count_gqa_ops(const ModelSpec& m, const WorkloadSpec& w) {
  validate(m);
  OpTally t;
  const std::uint64_t bs = w.b * w.s;
  tally_matmul(t, bs, m.d, m.d);                // Q projection
  tally_matmul(t, bs, m.k * m.d_h, m.d);        // K projection
  tally_matmul(t, bs, m.k * m.d_h, m.d);        // V projection
  for (std::uint64_t b = 0; b < w.b; ++b)
    for (std::uint64_t head = 0; head < m.a; ++head)
      for (std::uint64_t i = 0; i < w.s; ++i)
        for (std::uint64_t j = 0; j < w.s; ++j) {
          for (std::uint64_t e = 0; e < m.d_h; ++e) ++t.cube_macs;  // QK^T
          t.vec_ops += 5;  // softmax: max, sub, exp, sum, div
          for (std::uint64_t e = 0; e < m.d_h; ++e) ++t.cube_macs;  // A V
        }
  tally_matmul(t, bs, m.d, m.d);                // output projection
  return t;
}

OpTally count_mlp_ops(const ModelSpec& m, const WorkloadSpec& w) {
  validate(m);
  OpTally t;
  const std::uint64_t bs = w.b * w.s;
  tally_matmul(t, bs, m.I, m.d);  // up
  tally_matmul(t, bs, m.I, m.d);  // gate
  for (std::uint64_t r = 0; r < bs; ++r)
    for (std::uint64_t c = 0; c < m.I; ++c) t.vec_ops += 5;  // swish + gate
  tally_matmul(t, bs, m.d, m.I);  // down
  return t;
}

OpTally count_mamba_proj_ops(const ModelSpec& m, const WorkloadSpec& w) {
  validate(m);
  const DerivedDims dd = derive_dims(m);
  OpTally t;
  const std::uint64_t bs = w.b * w.s;
  tally_matmul(t, bs, dd.d_inproj, m.d);
  tally_matmul(t, bs, m.d, dd.d_inner);
  return t;
}

OpTally count_ssd_ops(const ModelSpec& m, const WorkloadSpec& w,
                      ScanMode mode) {
  validate(m);
  validate(w, m);
  OpTally t;
  const std::uint64_t c = w.s / m.l;
  for (std::uint64_t b = 0; b < w.b; ++b)
    for (std::uint64_t ch = 0; ch < c; ++ch)
      for (std::uint64_t head = 0; head < m.h; ++head) {
        // step 1: intra-chunk attention-like scores  C_i . B_j
        for (std::uint64_t i = 0; i < m.l; ++i)
          for (std::uint64_t j = 0; j < m.l; ++j)
            for (std::uint64_t e = 0; e < m.n; ++e) ++t.cube_macs;
        // step 2: scores x chunk inputs
        for (std::uint64_t i = 0; i < m.l; ++i)
          for (std::uint64_t j = 0; j < m.l; ++j)
            for (std::uint64_t e = 0; e < m.p; ++e) ++t.cube_macs;
        // step 3: per-chunk boundary state  B^T . X
        for (std::uint64_t i = 0; i < m.l; ++i)
          for (std::uint64_t e = 0; e < m.p; ++e)
            for (std::uint64_t f = 0; f < m.n; ++f) ++t.cube_macs;
        // step 5: carried state's contribution to outputs  C . H
        for (std::uint64_t i = 0; i < m.l; ++i)
          for (std::uint64_t e = 0; e < m.p; ++e)
            for (std::uint64_t f = 0; f < m.n; ++f) ++t.cube_macs;
      }
  // step 4: inter-chunk state propagation (vector engine)
  for (std::uint64_t b = 0; b < w.b; ++b)
    for (std::uint64_t head = 0; head < m.h; ++head)
      for (std::uint64_t e = 0; e < m.p; ++e)
        for (std::uint64_t f = 0; f < m.n; ++f) {
          if (mode == ScanMode::parallel_scan) {
            for (std::uint64_t ch = 0; ch < c; ++ch) t.vec_ops += 2;
          } else {
            // naive: every (target state, source chunk) decay product
            for (std::uint64_t z = 0; z <= c; ++z)
              for (std::uint64_t j = 0; j < c; ++j) t.vec_ops += 2;
          }
        }
  return t;
}

std::uint64_t count_factorizations(std::uint64_t world, std::uint64_t max_pp,
                                   std::uint64_t max_tp) {
  std::uint64_t count = 0;
  for (std::uint64_t dp = 1; dp <= world; ++dp)
    for (std::uint64_t pp = 1; pp <= world; ++pp)
      for (std::uint64_t tp = 1; tp <= world; ++tp)
        for (std::uint64_t cp = 1; cp <= world; ++cp) {
          if (dp * pp * tp * cp != world) continue;
          if (max_pp && pp > max_pp) continue;
          if (max_tp && tp > max_tp) continue;
          ++count;
        }
  return count;
}

double bubble_fraction_from_grid(std::uint64_t pp,
                                 std::uint64_t microbatches) {
  if (pp == 0 || microbatches == 0)
    throw std::invalid_argument("bubble grid: pp and microbatches must be > 0");
  // Slot grid of the steady pipeline: stage i computes micro-batch j in
  // slot i+j; the makespan is the last stage's finish.
  const std::uint64_t makespan = microbatches + pp - 1;
  std::vector<std::vector<bool>> busy(pp, std::vector<bool>(makespan, false));
  for (std::uint64_t stage = 0; stage < pp; ++stage)
    for (std::uint64_t mb = 0; mb < microbatches; ++mb)
      busy[stage][stage + mb] = true;
  std::uint64_t idle = 0, total = 0;
  for (const auto& row : busy)
    for (bool slot : row) {
      ++total;
      if (!slot) ++idle;
    }
  return static_cast<double>(idle) / static_cast<double>(total);
}

namespace {

ModelSpec random_transformer(std::mt19937& rng) {
  auto pick = [&](std::initializer_list<std::uint64_t> xs) {
    std::vector<std::uint64_t> v(xs);
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  ModelSpec m;
  m.name = "tiny-transformer";
  m.block_kind = BlockKind::transformer;
  m.layers = pick({1, 2, 4});
  m.d_h = pick({2, 4, 8});
  m.a = pick({1, 2, 4, 8});
  std::vector<std::uint64_t> ks;
  for (std::uint64_t k = 1; k <= m.a; ++k)
    if (m.a % k == 0) ks.push_back(k);
  m.k = ks[std::uniform_int_distribution<std::size_t>(0, ks.size() - 1)(rng)];
  m.d = m.a * m.d_h;
  m.I = pick({4, 8, 16, 32});
  m.v = 32;
  m.a_byte = pick({1, 2, 4});
  m.w_byte = pick({1, 2, 4});
  return m;
}

ModelSpec random_mamba(std::mt19937& rng) {
  auto pick = [&](std::initializer_list<std::uint64_t> xs) {
    std::vector<std::uint64_t> v(xs);
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  ModelSpec m;
  m.name = "tiny-mamba";
  m.block_kind = BlockKind::mamba2;
  m.layers = pick({1, 2, 4});
  m.d = pick({4, 8, 16});
  m.expand_mamba = pick({1, 2});
  m.d_inner = m.expand_mamba * m.d;
  m.h = pick({1, 2, 4});
  m.p = pick({2, 4, 8});
  m.n = pick({2, 4, 8});
  m.ngroups_ssm = pick({1, 2});
  m.l = pick({2, 4, 8});
  m.v = 32;
  m.a_byte = pick({1, 2, 4});
  m.w_byte = pick({1, 2, 4});
  return m;
}

WorkloadSpec random_workload(std::mt19937& rng, const ModelSpec& m) {
  auto pick = [&](std::initializer_list<std::uint64_t> xs) {
    std::vector<std::uint64_t> v(xs);
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  WorkloadSpec w;
  w.b = pick({1, 2, 3});
  w.s = m.block_kind == BlockKind::mamba2
            ? m.l * pick({1, 2, 3, 4})
            : pick({2, 4, 8, 16});
  w.global_batch = w.b;
  w.mode = Mode::training;
  return w;
}

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& d) {
    if (ok) detail = d;
    ok = false;
  }
};

void report_line(std::ostream& out, const std::string& name,
                 const Outcome& o, bool& all_ok) {
  out << (o.ok ? "[PASS] " : "[FAIL] ") << name;
  if (!o.ok) out << ": " << o.detail;
  out << "\n";
  all_ok = all_ok && o.ok;
}

std::string cfg_desc(const ModelSpec& m, const WorkloadSpec& w) {
  return "b=" + std::to_string(w.b) + " s=" + std::to_string(w.s) +
         " d=" + std::to_string(m.d);
}

}  // namespace

bool verify_all(std::ostream& out) {
  bool all_ok = true;
  std::mt19937 rng(0xC0FFEE);

  {
    Outcome o;
    for (int i = 0; i < 60; ++i) {
      const ModelSpec m = random_transformer(rng);
      const WorkloadSpec w = random_workload(rng, m);
      const OpTally gqa = count_gqa_ops(m, w);
      const OpTally mlp = count_mlp_ops(m, w);
      const FlopSplit gf = gqa_flops_total(m, w);
      const FlopSplit mf = mlp_flops_total(m, w);
      if (gf.cube != gqa.cube_flops() || gf.vec != gqa.vec_flops())
        o.fail("gqa mismatch at " + cfg_desc(m, w));
      if (mf.cube != mlp.cube_flops() || mf.vec != mlp.vec_flops())
        o.fail("mlp mismatch at " + cfg_desc(m, w));
    }
    report_line(out, "transformer flops formulas == op-count walk (60 specs)",
                o, all_ok);
  }

  {
    Outcome o;
    for (int i = 0; i < 60; ++i) {
      const ModelSpec m = random_mamba(rng);
      const WorkloadSpec w = random_workload(rng, m);
      const OpTally proj = count_mamba_proj_ops(m, w);
      if (mamba_proj_flops_total(m, w).total() != proj.cube_flops())
        o.fail("projection mismatch at " + cfg_desc(m, w));
      for (ScanMode mode : {ScanMode::parallel_scan, ScanMode::naive}) {
        const OpTally ssd = count_ssd_ops(m, w, mode);
        const SsdBreakdown f = ssd_flops_total(m, w, mode);
        if (f.cube() != ssd.cube_flops() || f.vec() != ssd.vec_flops())
          o.fail("ssd mismatch at " + cfg_desc(m, w));
      }
      // The naive-minus-scan gap has a closed form in the chunk count.
      const std::uint64_t c = w.s / m.l;
      const Rat gap = ssd_flops_total(m, w, ScanMode::naive).step4 -
                      ssd_flops_total(m, w, ScanMode::parallel_scan).step4;
      if (gap != Rat(2) * Rat(w.b) * Rat(m.h) * Rat(c) * Rat(c) * Rat(m.p) *
                     Rat(m.n))
        o.fail("scan-vs-naive gap mismatch at " + cfg_desc(m, w));
    }
    report_line(out, "mamba flops formulas == op-count walk (60 specs)", o,
                all_ok);
  }

  {
    Outcome o;
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const std::uint64_t chunk =
          std::vector<std::uint64_t>{2, 4, 8}[i % 3];
      const std::uint64_t len =
          chunk * (1 + std::uniform_int_distribution<std::uint64_t>(
                           0, 256 / chunk - 1)(rng));
      std::vector<double> a(len), b(len), x(len);
      for (std::uint64_t t = 0; t < len; ++t) {
        a[t] = coef(rng);
        b[t] = val(rng);
        x[t] = val(rng);
      }
      const auto direct = run_recurrence_direct(a, b, x);
      const auto chunked = run_recurrence_chunked(a, b, x, chunk);
      for (std::uint64_t t = 0; t < len; ++t) {
        const double scale = std::max(1.0, std::fabs(direct[t]));
        worst = std::max(worst, std::fabs(direct[t] - chunked[t]) / scale);
      }
    }
    if (worst > 1e-9)
      o.fail("worst relative error " + std::to_string(worst));
    report_line(out,
                "chunked recurrence == direct recurrence (200 traces)", o,
                all_ok);
  }

  {
    Outcome o;
    for (std::uint64_t n = 1; n <= 64; ++n) {
      for (std::uint64_t size : {std::uint64_t{1}, std::uint64_t{7},
                                 std::uint64_t{1024}, std::uint64_t{1} << 20}) {
        const Rat s(size);
        const Rat ar = data_moved_per_device(CollectiveKind::all_reduce, n, s);
        const Rat rs =
            data_moved_per_device(CollectiveKind::ring_reduce_scatter, n, s);
        const Rat ag =
            data_moved_per_device(CollectiveKind::ring_all_gather, n, s);
        if (ar != rs + ag)
          o.fail("all_reduce != rs+ag at n=" + std::to_string(n));
        if (n == 1) {
          for (CollectiveKind k :
               {CollectiveKind::reduce, CollectiveKind::gather,
                CollectiveKind::ring_all_gather,
                CollectiveKind::ring_reduce_scatter, CollectiveKind::all_to_all,
                CollectiveKind::all_reduce})
            if (!data_moved_per_device(k, 1, s).is_zero())
              o.fail(std::string("single-rank ") + to_string(k) +
                     " moved data");
        }
        if (data_moved_per_device(CollectiveKind::p2p_send_recv, n, s) != s)
          o.fail("p2p != size at n=" + std::to_string(n));
        if (data_moved_per_device(CollectiveKind::gather, n, s) !=
            Rat(n - 1) * s)
          o.fail("gather != (n-1)*size at n=" + std::to_string(n));
      }
    }
    report_line(out, "collective volume identities (n=1..64)", o, all_ok);
  }

  {
    Outcome o;
    for (std::uint64_t world : {1ull, 2ull, 3ull, 4ull, 6ull, 8ull, 12ull,
                                16ull, 24ull, 32ull, 48ull, 64ull}) {
      const auto configs = enumerate_configs(world);
      std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t,
                          std::uint64_t>> seen;
      for (const auto& c : configs) {
        if (c.degree() != world)
          o.fail("degree != world at world=" + std::to_string(world));
        seen.insert({c.dp, c.pp, c.tp, c.cp});
      }
      if (seen.size() != configs.size())
        o.fail("duplicate tuples at world=" + std::to_string(world));
      if (configs.size() != count_factorizations(world))
        o.fail("count mismatch at world=" + std::to_string(world));
      EnumConstraints ec;
      ec.max_pp = 4;
      ec.max_tp = 8;
      if (enumerate_configs(world, ec).size() !=
          count_factorizations(world, 4, 8))
        o.fail("bounded count mismatch at world=" + std::to_string(world));
    }
    report_line(out, "strategy enumeration == exhaustive tuple scan", o,
                all_ok);
  }

  {
    Outcome o;
    for (std::uint64_t pp : {1ull, 2ull, 3ull, 4ull, 8ull})
      for (std::uint64_t mb : {1ull, 2ull, 4ull, 8ull, 32ull, 256ull}) {
        const double grid = bubble_fraction_from_grid(pp, mb);
        const double formula =
            pp > 1 ? static_cast<double>(pp - 1) /
                         static_cast<double>(mb + pp - 1)
                   : 0.0;
        if (std::fabs(grid - formula) > 1e-15)
          o.fail("pp=" + std::to_string(pp) + " mb=" + std::to_string(mb));
      }
    report_line(out, "pipeline bubble formula == slot-grid schedule", o,
                all_ok);
  }

  return all_ok;
}

}  // namespace parashard
