// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "parashard/rational.hpp"

namespace parashard {

enum class CollectiveKind {
  reduce,
  gather,
  ring_all_gather,
  ring_reduce_scatter,
  all_to_all,
  all_reduce,
  p2p_send_recv,
};

const char* to_string(CollectiveKind k);

// Bytes moved per participating device for a collective over n ranks on a
// tensor of tensor_bytes.  Ring algorithms are assumed for the
// bandwidth-optimal kinds, so:
//
//   reduce / gather          (n-1) * tensor_bytes      (root-centric)
//   ring all-gather          (n-1)/n * tensor_bytes
//   ring reduce-scatter      (n-1)/n * tensor_bytes
//   all-to-all               (n-1)/n * tensor_bytes
//   all-reduce               2 * (n-1)/n * tensor_bytes   (RS then AG)
//   p2p send/recv            tensor_bytes
//
// Returned as an exact rational so identities such as
// all_reduce == ring_reduce_scatter + ring_all_gather hold bit-for-bit even
// for sizes that don't divide by n.  n == 1 moves no data for every kind
// except p2p, which is already a two-party primitive.
Rat data_moved_per_device(CollectiveKind kind, std::uint64_t n,
                          const Rat& tensor_bytes);

// Serialized ring steps (latency hops) a collective needs: (n-1) for the
// one-pass kinds, 2*(n-1) for all-reduce, 1 for p2p.  This is the alpha in
// alpha-beta cost modeling; it is what makes many tiny collectives slower
// than one large one at equal volume.
std::uint64_t ring_steps(CollectiveKind kind, std::uint64_t n);

// Pure bandwidth term: seconds to move `bytes` at `bw` bytes/s, with
// overlap_eff in [0,1] hiding that fraction behind compute (1 means fully
// hidden).
double collective_time(double bytes, double bw, double overlap_eff);

// Full alpha-beta time for one collective invocation: per-step launch
// latency plus the bandwidth term.  fixed_cost (seconds per ring step)
// defaults to 0, which reduces to the volume-only model.
double collective_time(CollectiveKind kind, std::uint64_t n, double bytes,
                       double bw, double overlap_eff, double fixed_cost);

}  // namespace parashard
