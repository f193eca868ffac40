// SPDX-License-Identifier: Apache-2.0
//
// Roofline and serving metrics: arithmetic intensity, compute/memory
// boundedness, model flops utilization, and latency bookkeeping.
#pragma once

#include <cstdint>

#include "parashard/config.hpp"
#include "parashard/rational.hpp"

namespace parashard {

enum class RooflineRegime { compute_bound, memory_bound };

struct RooflineVerdict {
  RooflineRegime regime = RooflineRegime::memory_bound;
  bool on_ridge = false;  // intensity exactly equals the ridge point

  bool operator==(const RooflineVerdict&) const = default;
};

// flops per byte moved; bytes must be positive.
Rat arithmetic_intensity(const Rat& flops, const Rat& bytes);

// Ridge point of the device roofline (flops/s over bytes/s).
Rat ridge_point(const ClusterSpec& cluster);

// Classify a kernel against the roofline.  Strictly above the ridge is
// compute-bound; at or below is memory-bound, with on_ridge marking the
// exact-tie case (the defining inequalities are strict, so a tie is a
// boundary condition worth surfacing rather than silently bucketing).
RooflineVerdict classify_roofline(const Rat& intensity,
                                  const ClusterSpec& cluster);

// Model flops utilization in percent: achieved useful flops rate over the
// hardware peak rate.  For a multi-device job the peak is world * per-device
// cube peak.
double mfu_percent(double achieved_flops_per_s, double peak_flops_per_s);

// End-to-end generation latency from first-token and per-token costs.
// Tokens after the first each add one decode step.
double generation_latency_s(double ttft_s, double tpot_s,
                            std::uint64_t out_tokens);

// Inverse of the above: recover the per-token cost from a measured
// end-to-end latency.
double tpot_from_latency_s(double latency_s, double ttft_s,
                           std::uint64_t out_tokens);

// Tokens processed per second of wall time.
double throughput_tokens_per_s(double tokens, double elapsed_s);

}  // namespace parashard
