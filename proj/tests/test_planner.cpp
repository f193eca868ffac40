// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <string>

#include "parashard/config.hpp"
#include "parashard/oracles.hpp"
#include "parashard/planner.hpp"
#include "parashard/report.hpp"

using namespace parashard;

namespace {

ConfigSet shipped(const char* name) {
  const char* dir = std::getenv("PARASHARD_TEST_DIR");
  REQUIRE(dir != nullptr);
  return load_config(std::string(dir) + "/configs/" + name + ".json");
}

ParallelConfig degrees(std::uint64_t dp, std::uint64_t pp, std::uint64_t tp,
                       std::uint64_t cp) {
  ParallelConfig c;
  c.dp = dp;
  c.pp = pp;
  c.tp = tp;
  c.cp = cp;
  return c;
}

}  // namespace

TEST_CASE("factorization counts for the worlds we plan on") {
  CHECK(enumerate_configs(8).size() == 20);
  CHECK(enumerate_configs(16).size() == 35);
  CHECK(enumerate_configs(1).size() == 1);
  for (std::uint64_t world = 1; world <= 32; ++world) {
    CHECK(enumerate_configs(world).size() == count_factorizations(world));
  }
}

TEST_CASE("enumeration constraints prune pp and tp") {
  EnumConstraints ec;
  ec.max_tp = 2;
  for (const ParallelConfig& c : enumerate_configs(16, ec)) {
    CHECK(c.tp <= 2);
  }
  CHECK(enumerate_configs(16, ec).size() == count_factorizations(16, 0, 2));
  ec.max_pp = 1;
  for (const ParallelConfig& c : enumerate_configs(16, ec)) {
    CHECK(c.pp == 1);
  }
}

TEST_CASE("process groups route intra-node only when they tile a node") {
  ClusterSpec c;
  c.world = 16;
  c.devices_per_node = 8;
  CHECK(group_is_intra_node(1, 8, c));       // whole node
  CHECK(group_is_intra_node(1, 2, c));       // adjacent pair
  CHECK(group_is_intra_node(2, 4, c));       // strided, span 8
  CHECK(group_is_intra_node(4, 2, c));       // span 8
  CHECK_FALSE(group_is_intra_node(1, 16, c));  // spans two nodes
  CHECK_FALSE(group_is_intra_node(8, 2, c));   // one rank per node
  CHECK_FALSE(group_is_intra_node(3, 2, c));   // span 6 does not tile 8
  CHECK(group_is_intra_node(5, 1, c));         // singleton is trivially local
}

TEST_CASE("frozen whole-model costs for a pipelined strategy") {
  const ConfigSet cs = shipped("llama7b");
  const CostReport r =
      model_cost(cs.model, cs.workload, cs.cluster, degrees(4, 2, 1, 1));
  CHECK(r.feasible);
  CHECK(r.microbatches == 256);
  CHECK(r.layers_per_stage == 16);
  CHECK(r.weight_bytes == 6476005376.0);
  CHECK(r.act_bytes == 19058917376.0);
  CHECK(r.train_state_bytes == 0.0);
  CHECK(r.comm_bytes() == 26893877248.0);
  CHECK(r.bubble_fraction == doctest::Approx(1.0 / 257.0).epsilon(1e-12));
  CHECK(r.step_time_s == doctest::Approx(73.252268311048).epsilon(1e-9));
  CHECK(r.throughput_tok_s == doctest::Approx(57258.349764541).epsilon(1e-9));
  CHECK(r.mfu_pct == doctest::Approx(85.641236366676).epsilon(1e-9));
}

TEST_CASE("microbatch mismatch is infeasible with a reason, not an error") {
  ConfigSet cs = shipped("llama7b");
  cs.workload.global_batch = 4;  // 4 sequences cannot fill dp=8 replicas
  const CostReport r =
      model_cost(cs.model, cs.workload, cs.cluster, degrees(8, 1, 1, 1));
  CHECK_FALSE(r.feasible);
  CHECK(r.reason.find("microbatch") != std::string::npos);
  CHECK(r.step_time_s == 0.0);
}

TEST_CASE("memory infeasibility carries the sizes in the reason") {
  const ConfigSet cs = shipped("mamba7b");
  ParallelConfig cfg = degrees(8, 1, 1, 1);
  cfg.tp_flavor = TpFlavor::tpsp;
  const CostReport r = model_cost(cs.model, cs.workload, cs.cluster, cfg);
  CHECK_FALSE(r.feasible);
  CHECK(r.reason.find("memory:") != std::string::npos);
  CHECK(r.reason.find("74.1 GB needed > 60.0 GB capacity") !=
        std::string::npos);
}

TEST_CASE("invalid bindings throw instead of reporting infeasible") {
  const ConfigSet cs = shipped("llama7b");
  CHECK_THROWS_AS(
      model_cost(cs.model, cs.workload, cs.cluster, degrees(2, 1, 1, 1)),
      ConfigError);
}

TEST_CASE("training state bytes scale local parameters only") {
  ConfigSet cs = shipped("llama7b");
  cs.cluster.training_state_bytes_per_param = 16;
  const CostReport dp_pure =
      model_cost(cs.model, cs.workload, cs.cluster, degrees(8, 1, 1, 1));
  const CostReport tp_pure =
      model_cost(cs.model, cs.workload, cs.cluster, degrees(1, 1, 8, 1));
  // 16 bytes per parameter, 32 layers of 202M params, unsharded vs /8.
  CHECK(dp_pure.train_state_bytes ==
        doctest::Approx(16.0 * 32 * 202375168.0));
  CHECK(tp_pure.train_state_bytes ==
        doctest::Approx(16.0 * 32 * 202375168.0 / 8.0));
  CHECK(dp_pure.mem_bytes() > tp_pure.mem_bytes());

  // Prefill keeps no optimizer or gradient state.
  cs.workload.mode = Mode::prefill;
  const CostReport pf =
      model_cost(cs.model, cs.workload, cs.cluster, degrees(8, 1, 1, 1));
  CHECK(pf.train_state_bytes == 0.0);
}

TEST_CASE("prefill runs one pass and sends one boundary per micro-batch") {
  ConfigSet cs = shipped("llama7b");
  const CostReport train =
      model_cost(cs.model, cs.workload, cs.cluster, degrees(4, 2, 1, 1));
  cs.workload.mode = Mode::prefill;
  const CostReport pf =
      model_cost(cs.model, cs.workload, cs.cluster, degrees(4, 2, 1, 1));
  CHECK(pf.flops_cube == doctest::Approx(train.flops_cube / 3.0));
  // Forward-only pipeline traffic, and no gradient sync at all.
  CHECK(pf.comm_bytes() < train.comm_bytes());
}

TEST_CASE("full overlap removes bandwidth cost but keeps launch latency") {
  const ConfigSet cs = shipped("llama7b");
  PlanOptions opt;
  opt.overlap_eff = 1.0;
  const CostReport hidden = model_cost(cs.model, cs.workload, cs.cluster,
                                       degrees(1, 1, 8, 1), opt);
  const CostReport exposed =
      model_cost(cs.model, cs.workload, cs.cluster, degrees(1, 1, 8, 1));
  CHECK(hidden.comm_time_s < exposed.comm_time_s);
  // 32 layers x 1024 micro-batches of all-reduce, 14 ring steps x 1 ms
  // each, staying exposed as launch latency.
  CHECK(hidden.comm_time_s == doctest::Approx(32 * 1024 * 14 * 1e-3));
}

TEST_CASE("embedding weights are an opt-in, unsharded addend") {
  const ConfigSet cs = shipped("llama7b");
  PlanOptions opt;
  opt.include_embeddings = true;
  const CostReport with = model_cost(cs.model, cs.workload, cs.cluster,
                                     degrees(8, 1, 1, 1), opt);
  const CostReport without =
      model_cost(cs.model, cs.workload, cs.cluster, degrees(8, 1, 1, 1));
  CHECK(with.weight_bytes - without.weight_bytes ==
        doctest::Approx(32000.0 * 4096.0 * 2.0));
}

TEST_CASE("slo floors move strategies to infeasible with a reason") {
  const ConfigSet cs = shipped("llama7b");
  SLOSpec slo;
  slo.min_throughput = 55000.0;  // only the pp-ladder strategies survive
  const RankedPlan plan = plan_sweep(cs.model, cs.workload, cs.cluster, slo,
                                     RankKey::mfu);
  CHECK(plan.feasible.size() == 4);
  for (const CostReport& r : plan.infeasible) {
    if (r.reason.find("slo") != std::string::npos) {
      CHECK(r.throughput_tok_s < 55000.0);
    }
  }
  bool found_slo_reason = false;
  for (const CostReport& r : plan.infeasible) {
    found_slo_reason |= r.reason == "slo: throughput below floor";
  }
  CHECK(found_slo_reason);
}

TEST_CASE("rank keys order feasible strategies by their own metric") {
  const ConfigSet cs = shipped("llama1b");
  const SLOSpec slo;
  for (RankKey key : {RankKey::mfu, RankKey::throughput, RankKey::step_time,
                      RankKey::memory}) {
    const RankedPlan plan =
        plan_sweep(cs.model, cs.workload, cs.cluster, slo, key);
    REQUIRE(plan.feasible.size() >= 2);
    const bool descending =
        key == RankKey::mfu || key == RankKey::throughput;
    for (std::size_t i = 1; i < plan.feasible.size(); ++i) {
      const double prev = rank_score(plan.feasible[i - 1], key);
      const double cur = rank_score(plan.feasible[i], key);
      if (descending) {
        CHECK(prev >= cur);
      } else {
        CHECK(prev <= cur);
      }
    }
  }
  CHECK(rank_key_from_string("step_time") == RankKey::step_time);
  CHECK_THROWS_AS(rank_key_from_string("speed"), ConfigError);
}

TEST_CASE("ranking does not depend on evaluation order") {
  const ConfigSet cs = shipped("mamba1b");
  const SLOSpec slo;
  std::vector<CostReport> fwd;
  for (ParallelConfig cfg : enumerate_configs(cs.cluster.world)) {
    cfg.tp_flavor = TpFlavor::tpsp;
    fwd.push_back(model_cost(cs.model, cs.workload, cs.cluster, cfg));
  }
  std::vector<CostReport> shuffled = fwd;
  std::mt19937 rng(7);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);

  const RankedPlan a = rank(fwd, slo, RankKey::mfu);
  const RankedPlan b = rank(std::move(shuffled), slo, RankKey::mfu);
  REQUIRE(a.feasible.size() == b.feasible.size());
  for (std::size_t i = 0; i < a.feasible.size(); ++i) {
    CHECK(a.feasible[i].cfg == b.feasible[i].cfg);
  }
}

TEST_CASE("spearman rank correlation with midranks") {
  using V = std::vector<double>;
  CHECK(spearman_rank_correlation(V{1, 2, 3, 4}, V{10, 20, 30, 40}) ==
        doctest::Approx(1.0));
  CHECK(spearman_rank_correlation(V{1, 2, 3, 4}, V{40, 30, 20, 10}) ==
        doctest::Approx(-1.0));
  // Ties get midranks; a co-monotone tied pair still correlates perfectly.
  CHECK(spearman_rank_correlation(V{1, 2, 2, 3}, V{10, 20, 20, 30}) ==
        doctest::Approx(1.0));
  // Monotone transforms leave rank correlation untouched.
  CHECK(spearman_rank_correlation(V{1, 4, 9, 16}, V{1, 2, 3, 4}) ==
        doctest::Approx(1.0));
  CHECK(spearman_rank_correlation(V{5, 5, 5}, V{1, 2, 3}) == 0.0);
  CHECK_THROWS_AS(spearman_rank_correlation(V{1}, V{1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(spearman_rank_correlation(V{1, 2}, V{1}),
                  std::invalid_argument);
}

TEST_CASE("sweep output is byte-identical across runs") {
  const ConfigSet cs = shipped("llama7b");
  const SLOSpec slo;
  const RankedPlan p1 =
      plan_sweep(cs.model, cs.workload, cs.cluster, slo, RankKey::mfu);
  const RankedPlan p2 =
      plan_sweep(cs.model, cs.workload, cs.cluster, slo, RankKey::mfu);
  CHECK(render_plan(p1, OutputFormat::csv) == render_plan(p2, OutputFormat::csv));
}
