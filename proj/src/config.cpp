// SPDX-License-Identifier: Apache-2.0
#include "parashard/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace parashard {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ConfigError(origin + ": " + msg);
}

// Rejects keys that are not in the allowed set.  Typos must be loud.
void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& origin, const std::string& section) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      fail(origin, "unknown key \"" + it.key() + "\" in section \"" + section +
                       "\"");
    }
  }
}

std::uint64_t get_u64(const json& obj, const std::string& key,
                      const std::string& origin, const std::string& section,
                      std::optional<std::uint64_t> def = std::nullopt) {
  if (!obj.contains(key)) {
    if (def) return *def;
    fail(origin, "missing required field \"" + section + "." + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() &&
                                   v.get<std::int64_t>() >= 0)) {
    fail(origin, "field \"" + section + "." + key +
                     "\" must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double get_num(const json& obj, const std::string& key,
               const std::string& origin, const std::string& section,
               std::optional<double> def = std::nullopt) {
  if (!obj.contains(key)) {
    if (def) return *def;
    fail(origin, "missing required field \"" + section + "." + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    fail(origin, "field \"" + section + "." + key + "\" must be a number");
  }
  return v.get<double>();
}

std::string get_str(const json& obj, const std::string& key,
                    const std::string& origin, const std::string& section,
                    std::optional<std::string> def = std::nullopt) {
  if (!obj.contains(key)) {
    if (def) return *def;
    fail(origin, "missing required field \"" + section + "." + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) {
    fail(origin, "field \"" + section + "." + key + "\" must be a string");
  }
  return v.get<std::string>();
}

ModelSpec parse_model(const json& obj, const std::string& origin) {
  check_keys(obj,
             {"name", "block_kind", "layers", "d", "v", "a_byte", "w_byte",
              "a", "k", "d_h", "I", "expand_mamba", "d_inner", "ngroups_ssm",
              "n", "h", "p", "l"},
             origin, "model");
  ModelSpec m;
  m.name = get_str(obj, "name", origin, "model", std::string{});
  m.block_kind =
      block_kind_from_string(get_str(obj, "block_kind", origin, "model"));
  m.layers = get_u64(obj, "layers", origin, "model");
  m.d = get_u64(obj, "d", origin, "model");
  m.v = get_u64(obj, "v", origin, "model", 0);
  m.a_byte = get_u64(obj, "a_byte", origin, "model", 2);
  m.w_byte = get_u64(obj, "w_byte", origin, "model", 2);
  const bool tf = m.block_kind == BlockKind::transformer;
  // Fields of the other block kind may appear (e.g. shared templates) and
  // are parsed but unused; fields of the declared kind are required.
  const std::optional<std::uint64_t> required = std::nullopt;
  const std::optional<std::uint64_t> zero = 0;
  const auto tf_def = tf ? required : zero;
  const auto mb_def = tf ? zero : required;
  m.a = get_u64(obj, "a", origin, "model", tf_def);
  m.k = get_u64(obj, "k", origin, "model", tf_def);
  m.d_h = get_u64(obj, "d_h", origin, "model", tf_def);
  m.I = get_u64(obj, "I", origin, "model", tf_def);
  m.expand_mamba = get_u64(obj, "expand_mamba", origin, "model", mb_def);
  m.ngroups_ssm = get_u64(obj, "ngroups_ssm", origin, "model", mb_def);
  m.n = get_u64(obj, "n", origin, "model", mb_def);
  m.h = get_u64(obj, "h", origin, "model", mb_def);
  m.p = get_u64(obj, "p", origin, "model", mb_def);
  m.l = get_u64(obj, "l", origin, "model", mb_def);
  // d_inner may be given explicitly or derived from expand_mamba * d.
  m.d_inner = get_u64(obj, "d_inner", origin, "model",
                      std::optional<std::uint64_t>{m.expand_mamba * m.d});
  return m;
}

WorkloadSpec parse_workload(const json& obj, const std::string& origin) {
  check_keys(obj, {"b", "global_batch", "s", "mode", "out_tokens"}, origin,
             "workload");
  WorkloadSpec w;
  w.b = get_u64(obj, "b", origin, "workload");
  w.global_batch = get_u64(obj, "global_batch", origin, "workload");
  w.s = get_u64(obj, "s", origin, "workload");
  w.mode = mode_from_string(get_str(obj, "mode", origin, "workload"));
  w.out_tokens = get_u64(obj, "out_tokens", origin, "workload", 1);
  return w;
}

ClusterSpec parse_cluster(const json& obj, const std::string& origin) {
  check_keys(obj,
             {"world", "devices_per_node", "mem_capacity", "cube_peak",
              "vector_peak", "mem_bandwidth", "intra_bw", "inter_bw",
              "link_latency", "training_state_bytes_per_param"},
             origin, "cluster");
  ClusterSpec c;
  c.world = get_u64(obj, "world", origin, "cluster");
  c.devices_per_node = get_u64(obj, "devices_per_node", origin, "cluster");
  c.mem_capacity = get_u64(obj, "mem_capacity", origin, "cluster");
  c.cube_peak = get_num(obj, "cube_peak", origin, "cluster");
  c.vector_peak = get_num(obj, "vector_peak", origin, "cluster");
  c.mem_bandwidth = get_num(obj, "mem_bandwidth", origin, "cluster");
  c.intra_bw = get_num(obj, "intra_bw", origin, "cluster");
  c.inter_bw = get_num(obj, "inter_bw", origin, "cluster");
  c.link_latency = get_num(obj, "link_latency", origin, "cluster", 0.0);
  c.training_state_bytes_per_param =
      get_u64(obj, "training_state_bytes_per_param", origin, "cluster", 0);
  return c;
}

SLOSpec parse_slo(const json& obj, const std::string& origin) {
  check_keys(obj, {"min_throughput", "max_ttft", "percentile_q"}, origin,
             "slo");
  SLOSpec s;
  if (obj.contains("min_throughput")) {
    s.min_throughput = get_num(obj, "min_throughput", origin, "slo");
  }
  if (obj.contains("max_ttft")) {
    s.max_ttft = get_num(obj, "max_ttft", origin, "slo");
  }
  s.percentile_q = get_num(obj, "percentile_q", origin, "slo", 0.95);
  return s;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace

const char* to_string(BlockKind k) {
  return k == BlockKind::transformer ? "transformer" : "mamba2";
}

const char* to_string(Mode m) {
  return m == Mode::training ? "training" : "prefill";
}

const char* to_string(TpFlavor f) {
  switch (f) {
    case TpFlavor::plain: return "plain";
    case TpFlavor::tpsp: return "tpsp";
    case TpFlavor::tpup: return "tpup";
  }
  return "?";
}

BlockKind block_kind_from_string(const std::string& s) {
  if (s == "transformer") return BlockKind::transformer;
  if (s == "mamba2") return BlockKind::mamba2;
  throw ConfigError("block_kind must be \"transformer\" or \"mamba2\", got \"" +
                    s + "\"");
}

Mode mode_from_string(const std::string& s) {
  if (s == "training") return Mode::training;
  if (s == "prefill") return Mode::prefill;
  throw ConfigError("mode must be \"training\" or \"prefill\", got \"" + s +
                    "\"");
}

TpFlavor tp_flavor_from_string(const std::string& s) {
  if (s == "plain") return TpFlavor::plain;
  if (s == "tpsp") return TpFlavor::tpsp;
  if (s == "tpup") return TpFlavor::tpup;
  throw ConfigError("tp_flavor must be \"plain\", \"tpsp\" or \"tpup\", got \"" +
                    s + "\"");
}

void validate(const ModelSpec& m) {
  require(m.layers > 0, "model.layers must be > 0");
  require(m.d > 0, "model.d must be > 0");
  require(m.a_byte > 0 && m.w_byte > 0,
          "model.a_byte and model.w_byte must be > 0");
  if (m.block_kind == BlockKind::transformer) {
    require(m.a > 0, "model.a must be > 0 for transformer blocks");
    require(m.k > 0, "model.k must be > 0 for transformer blocks");
    require(m.d_h > 0, "model.d_h must be > 0 for transformer blocks");
    require(m.I > 0, "model.I must be > 0 for transformer blocks");
    require(m.d == m.a * m.d_h,
            "model.d must equal a * d_h (got d=" + std::to_string(m.d) +
                ", a*d_h=" + std::to_string(m.a * m.d_h) + ")");
    require(m.k <= m.a, "model.k must not exceed model.a");
    require(m.a % m.k == 0,
            "model.k must divide model.a (query heads per KV group)");
  } else {
    require(m.expand_mamba > 0,
            "model.expand_mamba must be > 0 for mamba2 blocks");
    require(m.ngroups_ssm > 0,
            "model.ngroups_ssm must be > 0 for mamba2 blocks");
    require(m.n > 0, "model.n must be > 0 for mamba2 blocks");
    require(m.h > 0, "model.h must be > 0 for mamba2 blocks");
    require(m.p > 0, "model.p must be > 0 for mamba2 blocks");
    require(m.l > 0, "model.l must be > 0 for mamba2 blocks");
    require(m.d_inner == m.expand_mamba * m.d,
            "model.d_inner must equal expand_mamba * d (got d_inner=" +
                std::to_string(m.d_inner) + ", expand_mamba*d=" +
                std::to_string(m.expand_mamba * m.d) + ")");
  }
}

void validate(const WorkloadSpec& w, const ModelSpec& m) {
  require(w.b > 0, "workload.b must be > 0");
  require(w.global_batch > 0, "workload.global_batch must be > 0");
  require(w.s > 0, "workload.s must be > 0");
  require(w.global_batch % w.b == 0,
          "workload.b must divide workload.global_batch");
  require(w.out_tokens >= 1, "workload.out_tokens must be >= 1");
  if (m.block_kind == BlockKind::mamba2) {
    require(w.s % m.l == 0,
            "model.l (chunk length) must divide workload.s (got s=" +
                std::to_string(w.s) + ", l=" + std::to_string(m.l) + ")");
  }
}

void validate(const ClusterSpec& c) {
  require(c.world > 0, "cluster.world must be > 0");
  require(c.devices_per_node > 0, "cluster.devices_per_node must be > 0");
  require(c.mem_capacity > 0, "cluster.mem_capacity must be > 0");
  require(c.cube_peak > 0, "cluster.cube_peak must be > 0");
  require(c.vector_peak > 0, "cluster.vector_peak must be > 0");
  require(c.cube_peak >= c.vector_peak,
          "cluster.cube_peak must be >= cluster.vector_peak");
  require(c.mem_bandwidth > 0, "cluster.mem_bandwidth must be > 0");
  require(c.intra_bw > 0, "cluster.intra_bw must be > 0");
  require(c.inter_bw > 0, "cluster.inter_bw must be > 0");
  require(c.link_latency >= 0, "cluster.link_latency must be >= 0");
}

void validate(const SLOSpec& s) {
  if (s.min_throughput) {
    require(*s.min_throughput > 0, "slo.min_throughput must be > 0");
  }
  if (s.max_ttft) require(*s.max_ttft > 0, "slo.max_ttft must be > 0");
  require(s.percentile_q > 0 && s.percentile_q <= 1,
          "slo.percentile_q must be in (0, 1]");
}

void validate(const ConfigSet& cs) {
  validate(cs.model);
  validate(cs.workload, cs.model);
  validate(cs.cluster);
  validate(cs.slo);
}

void validate_binding(const ParallelConfig& cfg, const ClusterSpec& cluster) {
  require(cfg.dp > 0 && cfg.pp > 0 && cfg.tp > 0 && cfg.cp > 0,
          "parallel degrees must all be > 0");
  if (cfg.degree() != cluster.world) {
    throw ConfigError("parallel degrees dp*pp*tp*cp = " +
                      std::to_string(cfg.degree()) + " != cluster.world = " +
                      std::to_string(cluster.world));
  }
}

DerivedDims derive_dims(const ModelSpec& m) {
  require(m.block_kind == BlockKind::mamba2,
          "derive_dims: model is not a mamba2 block");
  validate(m);
  DerivedDims dd;
  dd.d_inner = m.d_inner;
  dd.d_inproj = 2 * m.d_inner + 2 * m.ngroups_ssm * m.n + m.h;
  return dd;
}

ConfigSet parse_config(const std::string& json_text,
                       const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": JSON parse error: " + e.what());
  }
  if (!root.is_object()) fail(origin, "top level must be a JSON object");
  check_keys(root, {"model", "workload", "cluster", "slo"}, origin,
             "(top level)");
  for (const char* section : {"model", "workload", "cluster"}) {
    if (!root.contains(section)) {
      fail(origin, std::string("missing required section \"") + section +
                       "\"");
    }
  }
  ConfigSet cs;
  cs.model = parse_model(root.at("model"), origin);
  cs.workload = parse_workload(root.at("workload"), origin);
  cs.cluster = parse_cluster(root.at("cluster"), origin);
  cs.slo = root.contains("slo") ? parse_slo(root.at("slo"), origin) : SLOSpec{};
  validate(cs);
  return cs;
}

ConfigSet load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string serialize(const ConfigSet& cs) {
  json model = {
      {"name", cs.model.name},
      {"block_kind", to_string(cs.model.block_kind)},
      {"layers", cs.model.layers},
      {"d", cs.model.d},
      {"v", cs.model.v},
      {"a_byte", cs.model.a_byte},
      {"w_byte", cs.model.w_byte},
  };
  if (cs.model.block_kind == BlockKind::transformer) {
    model["a"] = cs.model.a;
    model["k"] = cs.model.k;
    model["d_h"] = cs.model.d_h;
    model["I"] = cs.model.I;
  } else {
    model["expand_mamba"] = cs.model.expand_mamba;
    model["d_inner"] = cs.model.d_inner;
    model["ngroups_ssm"] = cs.model.ngroups_ssm;
    model["n"] = cs.model.n;
    model["h"] = cs.model.h;
    model["p"] = cs.model.p;
    model["l"] = cs.model.l;
  }
  json workload = {
      {"b", cs.workload.b},
      {"global_batch", cs.workload.global_batch},
      {"s", cs.workload.s},
      {"mode", to_string(cs.workload.mode)},
      {"out_tokens", cs.workload.out_tokens},
  };
  json cluster = {
      {"world", cs.cluster.world},
      {"devices_per_node", cs.cluster.devices_per_node},
      {"mem_capacity", cs.cluster.mem_capacity},
      {"cube_peak", cs.cluster.cube_peak},
      {"vector_peak", cs.cluster.vector_peak},
      {"mem_bandwidth", cs.cluster.mem_bandwidth},
      {"intra_bw", cs.cluster.intra_bw},
      {"inter_bw", cs.cluster.inter_bw},
      {"link_latency", cs.cluster.link_latency},
      {"training_state_bytes_per_param",
       cs.cluster.training_state_bytes_per_param},
  };
  json slo = json::object();
  if (cs.slo.min_throughput) slo["min_throughput"] = *cs.slo.min_throughput;
  if (cs.slo.max_ttft) slo["max_ttft"] = *cs.slo.max_ttft;
  slo["percentile_q"] = cs.slo.percentile_q;
  json root = {
      {"model", model},
      {"workload", workload},
      {"cluster", cluster},
      {"slo", slo},
  };
  return root.dump(2) + "\n";
}

}  // namespace parashard
