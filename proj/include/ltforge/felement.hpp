#pragma once

#include <string>

#include "ltforge/padic.hpp"

namespace ltforge {

/// Element of F with tracked valuation: pi^v * u where u is a unit of
/// O_F / pi^r. The value is known modulo pi^{v+r} (its absolute precision).
/// v may be negative; exp/log coefficients live here.
class FElement {
 public:
  /// Absolute precision used for zeros that are exact (structural zeros).
  static constexpr int kExact = 1 << 24;

  FElement() = default;

  static FElement zero(Field field, int abs_precision = kExact);
  static FElement from_of(const OFElement& x);
  static FElement from_int(Field field, std::int64_t v, int abs_precision);
  /// pi^k exactly, carried with relative precision rel.
  static FElement pi_power(Field field, int k, int rel);

  Field field() const { return field_; }
  bool is_zero() const { return zero_; }
  /// Valuation; for zero the absolute precision (a lower bound).
  int valuation() const { return zero_ ? abs_ : val_; }
  int abs_precision() const { return abs_; }
  int rel_precision() const { return zero_ ? 0 : unit_.precision(); }
  const OFElement& unit() const { return unit_; }

  FElement operator+(const FElement& o) const;
  FElement operator-(const FElement& o) const;
  FElement operator-() const;
  FElement operator*(const FElement& o) const;
  FElement& operator+=(const FElement& o) { return *this = *this + o; }
  FElement& operator-=(const FElement& o) { return *this = *this - o; }
  FElement& operator*=(const FElement& o) { return *this = *this * o; }

  /// Throws NotAUnit on zero.
  FElement inv() const;
  /// Multiplication by pi^k, k of either sign (exact).
  FElement shift(int k) const;
  /// Drops digits beyond the given absolute precision.
  FElement truncated(int abs_precision) const;

  /// Demotes to O_F / pi^N. IntegralityFailure for negative valuation,
  /// PrecisionExhausted when fewer than N absolute digits are known.
  OFElement to_of(int N) const;

  FElement zero_like() const { return zero(field_); }
  FElement one_like() const;

  std::string to_string() const;

 private:
  Field field_ = nullptr;
  bool zero_ = true;
  int val_ = 0;
  int abs_ = kExact;
  OFElement unit_;
};

/// True when x - y vanishes at the common absolute precision.
bool equal_within_precision(const FElement& x, const FElement& y);

}  // namespace ltforge
