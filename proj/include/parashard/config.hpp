// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace parashard {

// Raised for any malformed, inconsistent, or out-of-range configuration
// input.  Configuration problems are user errors, not bugs, so they carry a
// message naming the offending field and rule instead of tripping asserts.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class BlockKind { transformer, mamba2 };

enum class Mode { training, prefill };

enum class TpFlavor {
  plain,  // shard heads / FFN columns, all-reduce partial sums
  tpsp,   // sequence-parallel residual stream, all-gather + reduce-scatter
  tpup,   // head-sharded with all-to-all redistribution ("Ulysses" style)
};

// Architecture of one repeated block plus the model-wide dimensions.
// A single struct covers both block kinds; validation requires the fields
// relevant to the declared kind and ignores the others.
struct ModelSpec {
  std::string name;
  BlockKind block_kind = BlockKind::transformer;
  std::uint64_t layers = 0;
  std::uint64_t d = 0;    // hidden size
  std::uint64_t v = 0;    // vocabulary size (embeddings are optional in costs)
  std::uint64_t a_byte = 2;  // bytes per activation element
  std::uint64_t w_byte = 2;  // bytes per weight element

  // Transformer (GQA attention + gated MLP) fields.
  std::uint64_t a = 0;    // query heads
  std::uint64_t k = 0;    // key/value heads (k == a means no grouping)
  std::uint64_t d_h = 0;  // head dimension, d == a * d_h
  std::uint64_t I = 0;    // MLP intermediate size

  // Mamba-2 (SSD) fields.
  std::uint64_t expand_mamba = 0;  // d_inner == expand_mamba * d
  std::uint64_t d_inner = 0;
  std::uint64_t ngroups_ssm = 0;  // B/C projection groups
  std::uint64_t n = 0;            // SSM state dimension per group
  std::uint64_t h = 0;            // SSD heads
  std::uint64_t p = 0;            // SSD head dimension
  std::uint64_t l = 0;            // SSD chunk length, must divide s

  bool operator==(const ModelSpec&) const = default;
};

// Dimensions derived from a Mamba-2 ModelSpec.  d_inproj is the fused input
// projection width: gates and x (2*d_inner), sequence-varying B and C
// (2*ngroups_ssm*n), and the per-head step-size channel (h).
struct DerivedDims {
  std::uint64_t d_inner = 0;
  std::uint64_t d_inproj = 0;

  bool operator==(const DerivedDims&) const = default;
};

struct WorkloadSpec {
  std::uint64_t b = 1;             // micro-batch size per device
  std::uint64_t global_batch = 1;  // sequences per optimizer step
  std::uint64_t s = 1;             // sequence length
  Mode mode = Mode::training;
  std::uint64_t out_tokens = 1;  // decoded tokens, used by latency metrics

  bool operator==(const WorkloadSpec&) const = default;
};

struct ClusterSpec {
  std::uint64_t world = 1;             // total devices
  std::uint64_t devices_per_node = 1;  // devices sharing the fast fabric
  std::uint64_t mem_capacity = 0;      // bytes of device memory
  double cube_peak = 0;        // matrix-engine peak, FLOP/s
  double vector_peak = 0;      // vector-engine peak, FLOP/s
  double mem_bandwidth = 0;    // device memory bandwidth, B/s
  double intra_bw = 0;         // per-device link bandwidth inside a node, B/s
  double inter_bw = 0;         // per-device link bandwidth across nodes, B/s
  double link_latency = 0;     // seconds per ring step of a collective
  // Optimizer + gradient bytes carried per parameter during training.
  // 0 models weights-and-activations-only memory; mixed-precision Adam with
  // fp32 master weights is approximately 16.
  std::uint64_t training_state_bytes_per_param = 0;

  bool operator==(const ClusterSpec&) const = default;
};

// One point in the parallelization space.  dp*pp*tp*cp must equal the
// cluster's world size when the config is bound to a cluster.
struct ParallelConfig {
  std::uint64_t dp = 1;
  std::uint64_t pp = 1;
  std::uint64_t tp = 1;
  std::uint64_t cp = 1;
  TpFlavor tp_flavor = TpFlavor::plain;

  std::uint64_t degree() const { return dp * pp * tp * cp; }

  bool operator==(const ParallelConfig&) const = default;
};

struct SLOSpec {
  std::optional<double> min_throughput;  // tokens/s, training
  std::optional<double> max_ttft;        // seconds, prefill
  double percentile_q = 0.95;            // reporting percentile, metadata only

  bool operator==(const SLOSpec&) const = default;
};

struct ConfigSet {
  ModelSpec model;
  WorkloadSpec workload;
  ClusterSpec cluster;
  SLOSpec slo;

  bool operator==(const ConfigSet&) const = default;
};

// String names used both in JSON files and CLI flags.
const char* to_string(BlockKind k);
const char* to_string(Mode m);
const char* to_string(TpFlavor f);
BlockKind block_kind_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);
TpFlavor tp_flavor_from_string(const std::string& s);

// Consistency checks; throw ConfigError naming field and rule on violation.
void validate(const ModelSpec& m);
void validate(const WorkloadSpec& w, const ModelSpec& m);
void validate(const ClusterSpec& c);
void validate(const SLOSpec& s);
void validate(const ConfigSet& cs);

// Checks that cfg can run on cluster (degree product == world, positive
// degrees).  Neither argument is mutated.
void validate_binding(const ParallelConfig& cfg, const ClusterSpec& cluster);

DerivedDims derive_dims(const ModelSpec& m);

// Loads a JSON file holding the four sections "model", "workload",
// "cluster", "slo".  Unknown keys anywhere are errors: a misspelled field
// silently reverting to a default has burned enough people.
ConfigSet load_config(const std::string& path);
ConfigSet parse_config(const std::string& json_text,
                       const std::string& origin = "<string>");

// Inverse of parse_config; parse_config(serialize(cs)) == cs.
std::string serialize(const ConfigSet& cs);

}  // namespace parashard
