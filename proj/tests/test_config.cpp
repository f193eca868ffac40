// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <string>

#include "parashard/config.hpp"

using namespace parashard;

namespace {

ModelSpec tiny_transformer() {
  ModelSpec m;
  m.name = "tiny";
  m.block_kind = BlockKind::transformer;
  m.layers = 2;
  m.d = 4;
  m.a = 2;
  m.k = 1;
  m.d_h = 2;
  m.I = 8;
  m.v = 32;
  return m;
}

ModelSpec tiny_mamba() {
  ModelSpec m;
  m.name = "tiny-ssd";
  m.block_kind = BlockKind::mamba2;
  m.layers = 2;
  m.d = 4;
  m.expand_mamba = 2;
  m.d_inner = 8;
  m.ngroups_ssm = 1;
  m.n = 2;
  m.h = 1;
  m.p = 2;
  m.l = 2;
  m.v = 32;
  return m;
}

ConfigSet tiny_set() {
  ConfigSet cs;
  cs.model = tiny_transformer();
  cs.workload.b = 1;
  cs.workload.global_batch = 4;
  cs.workload.s = 2;
  cs.workload.mode = Mode::training;
  cs.cluster.world = 4;
  cs.cluster.devices_per_node = 4;
  cs.cluster.mem_capacity = 1 << 30;
  cs.cluster.cube_peak = 1e12;
  cs.cluster.vector_peak = 1e10;
  cs.cluster.mem_bandwidth = 1e11;
  cs.cluster.intra_bw = 1e10;
  cs.cluster.inter_bw = 1e9;
  cs.slo.min_throughput = 10.0;
  return cs;
}

}  // namespace

TEST_CASE("model validation names the violated rule") {
  ModelSpec m = tiny_transformer();
  CHECK_NOTHROW(validate(m));

  m.d = 5;  // d != a * d_h
  CHECK_THROWS_WITH_AS(validate(m),
                       doctest::Contains("d must equal a * d_h"), ConfigError);

  m = tiny_transformer();
  m.a = 6;
  m.d_h = 1;
  m.d = 6;
  m.k = 4;  // does not divide a
  CHECK_THROWS_WITH_AS(validate(m), doctest::Contains("must divide"),
                       ConfigError);

  m = tiny_transformer();
  m.k = 3;  // exceeds a
  CHECK_THROWS_AS(validate(m), ConfigError);

  ModelSpec s = tiny_mamba();
  CHECK_NOTHROW(validate(s));
  s.d_inner = 9;  // != expand * d
  CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("expand_mamba"),
                       ConfigError);
}

TEST_CASE("workload validation couples to the model") {
  WorkloadSpec w;
  w.b = 2;
  w.global_batch = 5;  // not a multiple of b
  w.s = 4;
  CHECK_THROWS_WITH_AS(validate(w, tiny_transformer()),
                       doctest::Contains("divide"), ConfigError);

  w.global_batch = 4;
  CHECK_NOTHROW(validate(w, tiny_transformer()));

  // Chunk length must divide the sequence for SSD blocks.
  w.s = 3;
  CHECK_THROWS_WITH_AS(validate(w, tiny_mamba()),
                       doctest::Contains("chunk length"), ConfigError);
  w.s = 4;
  CHECK_NOTHROW(validate(w, tiny_mamba()));
}

TEST_CASE("binding requires the degree product to match the world") {
  ClusterSpec c;
  c.world = 4;
  c.devices_per_node = 4;
  ParallelConfig cfg;
  cfg.dp = 2;
  cfg.pp = 2;
  cfg.tp = 2;
  cfg.cp = 1;  // product 8 on a world of 4
  CHECK_THROWS_WITH_AS(validate_binding(cfg, c),
                       doctest::Contains("= 8 != cluster.world"),
                       ConfigError);
  cfg.tp = 1;  // product 4 matches
  CHECK_NOTHROW(validate_binding(cfg, c));
  cfg.cp = 4;  // product 16
  CHECK_THROWS_AS(validate_binding(cfg, c), ConfigError);
}

TEST_CASE("derived dimensions of the fused input projection") {
  const DerivedDims dd = derive_dims(tiny_mamba());
  CHECK(dd.d_inner == 8);
  CHECK(dd.d_inproj == 21);  // 2*8 + 2*1*2 + 1
}

TEST_CASE("enum names round-trip") {
  CHECK(block_kind_from_string(to_string(BlockKind::mamba2)) ==
        BlockKind::mamba2);
  CHECK(mode_from_string(to_string(Mode::prefill)) == Mode::prefill);
  for (TpFlavor f : {TpFlavor::plain, TpFlavor::tpsp, TpFlavor::tpup}) {
    CHECK(tp_flavor_from_string(to_string(f)) == f);
  }
  CHECK_THROWS_AS(block_kind_from_string("rnn"), ConfigError);
  CHECK_THROWS_AS(mode_from_string("decode"), ConfigError);
  CHECK_THROWS_AS(tp_flavor_from_string("fancy"), ConfigError);
}

TEST_CASE("serialize then parse is the identity") {
  const ConfigSet cs = tiny_set();
  const ConfigSet back = parse_config(serialize(cs), "round-trip");
  CHECK(back == cs);

  ConfigSet ms = cs;
  ms.model = tiny_mamba();
  ms.workload.s = 4;
  ms.slo.max_ttft = 2.5;
  CHECK(parse_config(serialize(ms), "round-trip") == ms);
}

TEST_CASE("unknown keys are rejected, not ignored") {
  const std::string text = R"({
    "model": {"name": "x", "block_kind": "transformer", "layers": 1,
              "d": 4, "a": 2, "k": 2, "d_h": 2, "I": 4, "typo_field": 1},
    "workload": {"b": 1, "global_batch": 1, "s": 2, "mode": "training"},
    "cluster": {"world": 1, "devices_per_node": 1, "mem_capacity": 1,
                "cube_peak": 1, "vector_peak": 1, "mem_bandwidth": 1,
                "intra_bw": 1, "inter_bw": 1},
    "slo": {}
  })";
  CHECK_THROWS_WITH_AS(parse_config(text, "t"),
                       doctest::Contains("typo_field"), ConfigError);
}

TEST_CASE("missing required fields are named") {
  const std::string text = R"({
    "model": {"name": "x", "block_kind": "transformer",
              "d": 4, "a": 2, "k": 2, "d_h": 2, "I": 4},
    "workload": {"b": 1, "global_batch": 1, "s": 2, "mode": "training"},
    "cluster": {"world": 1, "devices_per_node": 1, "mem_capacity": 1,
                "cube_peak": 1, "vector_peak": 1, "mem_bandwidth": 1,
                "intra_bw": 1, "inter_bw": 1},
    "slo": {}
  })";
  CHECK_THROWS_WITH_AS(parse_config(text, "t"), doctest::Contains("layers"),
                       ConfigError);
}

TEST_CASE("optional cluster fields default to the volume-only model") {
  const std::string text = R"({
    "model": {"name": "x", "block_kind": "transformer", "layers": 1,
              "d": 4, "a": 2, "k": 2, "d_h": 2, "I": 4},
    "workload": {"b": 1, "global_batch": 1, "s": 2, "mode": "training"},
    "cluster": {"world": 1, "devices_per_node": 1, "mem_capacity": 1,
                "cube_peak": 1, "vector_peak": 1, "mem_bandwidth": 1,
                "intra_bw": 1, "inter_bw": 1},
    "slo": {}
  })";
  const ConfigSet cs = parse_config(text, "t");
  CHECK(cs.cluster.link_latency == 0.0);
  CHECK(cs.cluster.training_state_bytes_per_param == 0);
  CHECK_FALSE(cs.slo.min_throughput.has_value());
  CHECK_FALSE(cs.slo.max_ttft.has_value());
}

TEST_CASE("shipped configuration files load and validate") {
  const char* dir = std::getenv("PARASHARD_TEST_DIR");
  REQUIRE(dir != nullptr);
  for (const char* name :
       {"llama7b", "llama1b", "mamba7b", "mamba1b"}) {
    const ConfigSet cs =
        load_config(std::string(dir) + "/configs/" + name + ".json");
    CHECK_NOTHROW(validate(cs));
    CHECK(cs.model.name == name);
    CHECK(cs.cluster.world == 8);
  }
  CHECK_THROWS_AS(load_config(std::string(dir) + "/configs/nope.json"),
                  ConfigError);
}
