// SPDX-License-Identifier: Apache-2.0
#include "parashard/collectives.hpp"

#include <stdexcept>

namespace parashard {

const char* to_string(CollectiveKind k) {
  switch (k) {
    case CollectiveKind::reduce: return "reduce";
    case CollectiveKind::gather: return "gather";
    case CollectiveKind::ring_all_gather: return "ring_all_gather";
    case CollectiveKind::ring_reduce_scatter: return "ring_reduce_scatter";
    case CollectiveKind::all_to_all: return "all_to_all";
    case CollectiveKind::all_reduce: return "all_reduce";
    case CollectiveKind::p2p_send_recv: return "p2p_send_recv";
  }
  return "?";
}

Rat data_moved_per_device(CollectiveKind kind, std::uint64_t n,
                          const Rat& tensor_bytes) {
  if (n == 0) throw std::invalid_argument("data_moved_per_device: n == 0");
  if (tensor_bytes.is_negative()) {
    throw std::invalid_argument("data_moved_per_device: negative tensor size");
  }
  const Rat size = tensor_bytes;
  const std::int64_t ni = static_cast<std::int64_t>(n);
  switch (kind) {
    case CollectiveKind::reduce:
    case CollectiveKind::gather:
      return Rat(ni - 1) * size;
    case CollectiveKind::ring_all_gather:
    case CollectiveKind::ring_reduce_scatter:
    case CollectiveKind::all_to_all:
      return Rat(ni - 1, ni) * size;
    case CollectiveKind::all_reduce:
      return Rat(2) * Rat(ni - 1, ni) * size;
    case CollectiveKind::p2p_send_recv:
      return size;
  }
  throw std::logic_error("data_moved_per_device: unhandled kind");
}

std::uint64_t ring_steps(CollectiveKind kind, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("ring_steps: n == 0");
  switch (kind) {
    case CollectiveKind::reduce:
    case CollectiveKind::gather:
    case CollectiveKind::ring_all_gather:
    case CollectiveKind::ring_reduce_scatter:
    case CollectiveKind::all_to_all:
      return n - 1;
    case CollectiveKind::all_reduce:
      return 2 * (n - 1);
    case CollectiveKind::p2p_send_recv:
      return 1;
  }
  throw std::logic_error("ring_steps: unhandled kind");
}

double collective_time(double bytes, double bw, double overlap_eff) {
  if (bw <= 0) throw std::invalid_argument("collective_time: bandwidth <= 0");
  if (overlap_eff < 0 || overlap_eff > 1) {
    throw std::invalid_argument("collective_time: overlap_eff outside [0,1]");
  }
  return bytes * (1.0 - overlap_eff) / bw;
}

double collective_time(CollectiveKind kind, std::uint64_t n, double bytes,
                       double bw, double overlap_eff, double fixed_cost) {
  double t = collective_time(bytes, bw, overlap_eff);
  if (bytes > 0 && n > 1) {
    t += fixed_cost * static_cast<double>(ring_steps(kind, n));
  }
  return t;
}

}  // namespace parashard
