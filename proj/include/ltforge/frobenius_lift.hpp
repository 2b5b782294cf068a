#pragma once

// Characteristic zero: the depth-m polynomial model of the lifted perfection,
// where Z stands for phi_q^{-m}(Y^) and phi_q acts by Z -> [pi](Z). On it
// lives the unique lift x of u with phi_q(x) = [pi](x), found digit by digit.

#include <cstdint>
#include <optional>
#include <vector>

#include "ltforge/charp.hpp"

namespace ltforge {

/// A series over O_F / pi^N in Z at some depth. Digit i (the coefficient of
/// pi^i) is reliable mod Z^{digit_orders[i]}; the orders never increase with i.
class LiftSeries {
 public:
  LiftSeries() = default;
  LiftSeries(int depth, OFSeries series);
  LiftSeries(int depth, OFSeries series, std::vector<int> digit_orders);

  Field field() const { return s_.proto().field(); }
  int depth() const { return depth_; }
  int order() const { return s_.order(); }
  int precision() const { return s_.proto().precision(); }
  const OFSeries& series() const { return s_; }
  const std::vector<int>& digit_orders() const { return orders_; }
  /// Order below which every digit is reliable.
  int verified_order() const { return orders_.empty() ? order() : orders_.back(); }

  /// Z -> Y^{1/q^depth} after reducing mod pi.
  PerfSeries reduction() const;

  /// True when the two agree digit by digit within the smaller reliable orders.
  bool agrees_with(const LiftSeries& o) const;

 private:
  int depth_ = 0;
  OFSeries s_;
  std::vector<int> orders_;
};

nlohmann::json to_json(const LiftSeries& x);
LiftSeries lift_series_from_json(Field field, const nlohmann::json& j);

/// x o [pi] at the same depth.
LiftSeries lift_phi_q(const LTModule& module, const LiftSeries& x);

/// phi_q(x) - [pi](x).
OFSeries frobenius_defect(const LTModule& module, const LiftSeries& x);

/// Digit i of the defect vanishes below digit_orders[i] for every i.
bool satisfies_frobenius_equation(const LTModule& module, const LiftSeries& x);

/// The lift of u mod (pi^N, Z^K) with phi_q(x) = [pi](x). The starting lift
/// defaults to the canonical digit lift of u; any other lift of u (at the
/// depth of u) gives the same answer. The depth goes up by one whenever a
/// correction is not a q-th power; otherwise digit j+1 keeps ceil(K_j / q)
/// terms. Errors: ValuationZero, BudgetExceeded, PrecisionExhausted.
LiftSeries colmez_lift(const LTModule& module, const PerfSeries& u, int N, int K,
                       const std::optional<OFSeries>& initial = std::nullopt);

/// {Teichmuller lift of a generator of k^x, 1 + pi, 1 + pi^2} with enough
/// digits for [g] mod (pi, Y^K).
std::vector<GammaElement> default_generators(const LTModule& module, int N, int K);

struct EquivarianceReport {
  bool equivariant = true;
  std::vector<OFElement> generators;
  std::optional<std::size_t> failing;  // index into generators
  std::int64_t first_mismatch = -1;    // exponent of the first differing term
};

/// u o [g] against [g] o u mod Z^K at the depth of u for each generator.
EquivarianceReport equivariance_report(const LTModule& module, const PerfSeries& u,
                                       const std::vector<GammaElement>& gens);
bool check_equivariance(const LTModule& module, const PerfSeries& u, const std::vector<GammaElement>& gens);

struct SeparablePower {
  FqSeries f;              // u^{p^m} as a series in Y
  std::int64_t m = 0;
};

/// The unique m with u^{p^m} in k[[Y]] and separable. Errors:
/// NonzeroConstantTerm, NoSeparablePower (u is 0 at its truncation).
SeparablePower pm_normalize(const PerfSeries& u);

struct Recovery {
  OFElement a;                 // known to as many digits as u determines, at most N
  int depth = 0;
  int verified_order = 0;      // [a] mod (pi, Z^verified_order) equals u
  std::vector<OFElement> generators_checked;
  LiftSeries lift;
  LubnarchResult degree;
};

nlohmann::json to_json(const Recovery& r);

/// Recovers a with u = [a] at the depth of u. Requires val_Y(u) = q^{-depth}
/// (WrongValuation) and equivariance under the default generators
/// (NotEquivariant); VerificationFailed if the final identity does not hold.
Recovery recover_a(const LTModule& module, const PerfSeries& u, int N);

}  // namespace ltforge
