// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace parashard {

// Exact rational arithmetic on 128-bit integers.
//
// Cost formulas are full of small fractions -- shard ratios like k/a, ring
// factors like (n-1)/n, per-device splits like total/degree -- and several
// invariants (all-reduce == reduce-scatter + all-gather, degree x per-device
// == total) are required to hold exactly, not within an epsilon.  Doing the
// math in doubles would make those identities flaky for awkward sizes, so
// everything cost-related is computed as a Rat and converted to double or
// uint64_t only at the reporting boundary.
//
// Magnitudes stay comfortably inside __int128: the largest quantities we
// form are per-step FLOP totals (~1e22) and the gcd reduction in mul() keeps
// intermediate products from growing past that by more than the (small)
// denominators involved.
class Rat {
 public:
  using i128 = __int128;

  constexpr Rat() : num_(0), den_(1) {}
  Rat(std::int64_t n) : num_(n), den_(1) {}
  Rat(std::uint64_t n) : num_(static_cast<i128>(n)), den_(1) {}
  Rat(int n) : num_(n), den_(1) {}
  Rat(unsigned n) : num_(n), den_(1) {}
  Rat(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  static Rat from_raw(i128 n, i128 d) {
    Rat r;
    r.num_ = n;
    r.den_ = d;
    r.normalize();
    return r;
  }

  i128 num() const { return num_; }
  i128 den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }

  // Exact integer value; throws if the value is fractional or out of range.
  std::uint64_t to_u64() const {
    if (den_ != 1 || num_ < 0 || num_ > i128(UINT64_MAX)) {
      throw std::domain_error("Rat::to_u64: value is not an exact uint64 (" +
                              to_string() + ")");
    }
    return static_cast<std::uint64_t>(num_);
  }

  // Nearest integer, used when emitting byte counts that picked up a
  // fractional shard factor on the way.
  std::uint64_t round_u64() const {
    if (num_ < 0) throw std::domain_error("Rat::round_u64: negative value");
    i128 q = num_ / den_;
    i128 r = num_ % den_;
    if (2 * r >= den_) ++q;
    return static_cast<std::uint64_t>(q);
  }

  double to_double() const {
    return static_cast<double>(static_cast<long double>(num_) /
                               static_cast<long double>(den_));
  }

  std::string to_string() const {
    std::string s = i128_to_string(num_);
    if (den_ != 1) s += "/" + i128_to_string(den_);
    return s;
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return from_raw(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return from_raw(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    // Cross-reduce before multiplying so intermediates stay small.
    i128 g1 = gcd128(abs128(a.num_), b.den_);
    i128 g2 = gcd128(abs128(b.num_), a.den_);
    return from_raw((a.num_ / g1) * (b.num_ / g2),
                    (a.den_ / g2) * (b.den_ / g1));
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    return a * from_raw(b.den_, b.num_);
  }

  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

 private:
  void normalize() {
    if (den_ == 0) throw std::domain_error("Rat: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    i128 g = gcd128(abs128(num_), den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  static i128 abs128(i128 v) { return v < 0 ? -v : v; }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  static std::string i128_to_string(i128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    std::string digits;
    i128 u = neg ? -v : v;
    while (u > 0) {
      digits.insert(digits.begin(), static_cast<char>('0' + int(u % 10)));
      u /= 10;
    }
    return neg ? "-" + digits : digits;
  }

  i128 num_;
  i128 den_;
};

}  // namespace parashard
