// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>

#include "parashard/rational.hpp"

using parashard::Rat;

TEST_CASE("construction normalizes sign and reduces by gcd") {
  CHECK(Rat(6, 4) == Rat(3, 2));
  CHECK(Rat(-6, 4) == Rat(-3, 2));
  CHECK(Rat(6, -4) == Rat(-3, 2));
  CHECK(Rat(-6, -4) == Rat(3, 2));
  CHECK(Rat(0, 7) == Rat(0));
  CHECK(Rat(0, -7).den() == 1);
  CHECK_THROWS_AS(Rat(1, 0), std::domain_error);
}

TEST_CASE("arithmetic is exact for shard-style fractions") {
  // (n-1)/n ring factors summed back to an all-reduce factor.
  const Rat rs(3, 4);
  const Rat ag(3, 4);
  CHECK(rs + ag == Rat(3, 2));
  CHECK(Rat(1) - Rat(1, 3) == Rat(2, 3));
  CHECK(Rat(2, 3) * Rat(9, 4) == Rat(3, 2));
  CHECK(Rat(5, 7) / Rat(10, 21) == Rat(3, 2));
  CHECK_THROWS_AS(Rat(1) / Rat(0), std::domain_error);

  Rat acc(0);
  for (int i = 0; i < 7; ++i) acc += Rat(1, 7);
  CHECK(acc == Rat(1));
}

TEST_CASE("comparisons order by value, not representation") {
  CHECK(Rat(1, 3) < Rat(1, 2));
  CHECK(Rat(-1, 2) < Rat(-1, 3));
  CHECK(Rat(7, 7) <= Rat(1));
  CHECK(Rat(5, 2) > Rat(2));
  CHECK(Rat(4, 8) >= Rat(1, 2));
  CHECK(Rat(1, 3) != Rat(2, 3));
}

TEST_CASE("conversions at the reporting boundary") {
  CHECK(Rat(12).to_u64() == 12);
  CHECK(Rat(3, 2).to_double() == doctest::Approx(1.5));
  CHECK_THROWS_AS(Rat(3, 2).to_u64(), std::domain_error);
  CHECK_THROWS_AS(Rat(-1).to_u64(), std::domain_error);

  CHECK(Rat(5, 2).round_u64() == 3);  // ties round up
  CHECK(Rat(7, 3).round_u64() == 2);
  CHECK(Rat(8, 3).round_u64() == 3);
  CHECK_THROWS_AS(Rat(-1, 2).round_u64(), std::domain_error);

  CHECK(Rat(3, 2).to_string() == "3/2");
  CHECK(Rat(-7).to_string() == "-7");
  CHECK(Rat(0).to_string() == "0");
}

TEST_CASE("predicates") {
  CHECK(Rat(4, 2).is_integer());
  CHECK_FALSE(Rat(1, 2).is_integer());
  CHECK(Rat(0).is_zero());
  CHECK(Rat(-1, 3).is_negative());
  CHECK_FALSE(Rat(1, 3).is_negative());
}

TEST_CASE("large magnitudes stay exact through mixed expressions") {
  // A per-step FLOP total sized like a real sweep: ~2.4e16 built from
  // small factors, divided back out without drift.
  const Rat flops = Rat(std::uint64_t{4} * 4096) * Rat(std::uint64_t(4096)) *
                    Rat(std::uint64_t(4096)) * Rat(32) * Rat(256) * Rat(3);
  const Rat per_device = flops / Rat(8);
  CHECK(per_device * Rat(8) == flops);

  // 128-bit headroom: (2^62 / 3) * 6 is exact.
  const Rat big = Rat(std::int64_t{1} << 62, 3) * Rat(6);
  CHECK(big == Rat(std::int64_t{1} << 62) * Rat(2));

  // Cross-reduction keeps u64 * u64 products representable.
  const Rat huge = Rat(std::uint64_t{1} << 60) * Rat(std::uint64_t{1} << 60) /
                   (Rat(std::uint64_t{1} << 60) * Rat(std::uint64_t{1} << 59));
  CHECK(huge == Rat(2));
}
