// SPDX-License-Identifier: Apache-2.0
#include "parashard/metrics.hpp"

#include <stdexcept>

namespace parashard {

Rat arithmetic_intensity(const Rat& flops, const Rat& bytes) {
  if (bytes.is_zero() || bytes.is_negative()) {
    throw std::invalid_argument("arithmetic_intensity: bytes must be > 0");
  }
  return flops / bytes;
}

Rat ridge_point(const ClusterSpec& cluster) {
  if (cluster.mem_bandwidth <= 0.0) {
    throw std::invalid_argument("ridge_point: mem_bandwidth must be > 0");
  }
  // The shipped clusters use integral peak rates; keep the ratio exact.
  return Rat(static_cast<std::uint64_t>(cluster.cube_peak)) /
         Rat(static_cast<std::uint64_t>(cluster.mem_bandwidth));
}

RooflineVerdict classify_roofline(const Rat& intensity,
                                  const ClusterSpec& cluster) {
  const Rat ridge = ridge_point(cluster);
  RooflineVerdict v;
  if (intensity > ridge) {
    v.regime = RooflineRegime::compute_bound;
  } else {
    v.regime = RooflineRegime::memory_bound;
    v.on_ridge = intensity == ridge;
  }
  return v;
}

double mfu_percent(double achieved_flops_per_s, double peak_flops_per_s) {
  if (peak_flops_per_s <= 0.0) {
    throw std::invalid_argument("mfu_percent: peak rate must be > 0");
  }
  if (achieved_flops_per_s < 0.0) {
    throw std::invalid_argument("mfu_percent: achieved rate must be >= 0");
  }
  return 100.0 * achieved_flops_per_s / peak_flops_per_s;
}

double generation_latency_s(double ttft_s, double tpot_s,
                            std::uint64_t out_tokens) {
  if (out_tokens == 0) {
    throw std::invalid_argument("generation_latency_s: out_tokens must be > 0");
  }
  return ttft_s + tpot_s * static_cast<double>(out_tokens - 1);
}

double tpot_from_latency_s(double latency_s, double ttft_s,
                           std::uint64_t out_tokens) {
  if (out_tokens < 2) {
    throw std::invalid_argument(
        "tpot_from_latency_s: needs at least two output tokens");
  }
  return (latency_s - ttft_s) / static_cast<double>(out_tokens - 1);
}

double throughput_tokens_per_s(double tokens, double elapsed_s) {
  if (elapsed_s <= 0.0) {
    throw std::invalid_argument(
        "throughput_tokens_per_s: elapsed time must be > 0");
  }
  return tokens / elapsed_s;
}

}  // namespace parashard
