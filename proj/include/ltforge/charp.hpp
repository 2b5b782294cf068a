#pragma once

// The characteristic p side: series in k[[Y]] and its perfection at finite
// depth, the action of Gal through [g] mod pi, and the predicates around
// commuting series.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ltforge/lubin_tate.hpp"

namespace ltforge {

/// Element of the depth-m perfection of k[[Y]]: a series in Z with
/// Z^{q^m} = Y, known mod Z^K. Kept normalized: the depth is lowered while
/// every exponent is a multiple of q and at least q terms are known (k = F_q
/// is fixed by x -> x^q, so the coefficients do not change). Equality compares
/// at the common depth within the shorter known range.
class PerfSeries {
 public:
  PerfSeries() = default;
  PerfSeries(int depth, FqSeries series);
  static PerfSeries from_series(FqSeries series) { return PerfSeries(0, std::move(series)); }
  /// Z at depth m, known mod Z^K.
  static PerfSeries variable(Field field, int depth, int K);

  Field field() const { return s_.proto().field(); }
  int depth() const { return depth_; }
  int order() const { return s_.order(); }
  const FqSeries& series() const { return s_; }
  bool is_zero() const { return val_T(s_) >= s_.order(); }

  /// val_Y as the fraction numerator / q^depth; the zero series reports its
  /// order as numerator.
  std::int64_t val_numerator() const { return val_T(s_); }
  std::uint64_t val_denominator() const;

  /// Same element written at a larger depth (exponents scaled by q^{m - depth}).
  /// Not normalized.
  FqSeries series_at_depth(int m) const;

  bool operator==(const PerfSeries& o) const;

  std::string to_string() const;

 private:
  void normalize();

  int depth_ = 0;
  FqSeries s_;
};

nlohmann::json to_json(const PerfSeries& f);
PerfSeries perf_series_from_json(Field field, const nlohmann::json& j);

/// An element of Gal represented by its image g in O_F^x.
class GammaElement {
 public:
  explicit GammaElement(OFElement g);
  const OFElement& g() const { return g_; }

 private:
  OFElement g_;
};

PerfSeries gamma_act(const LTModule& module, const GammaElement& gamma, const PerfSeries& f);

bool is_separable(const FqSeries& f);
/// f(0) must be 0 (NonzeroConstantTerm).
bool is_invertible(const FqSeries& f);
/// Bounded semi-decision: no iterate w^{on}, 1 <= n <= n_max, equals Y at
/// the truncation. Default bound q^3.
bool is_nontorsion(const FqSeries& w, std::uint64_t n_max = 0);
/// Exact decision for w = [g] mod pi: g is not a root of unity.
bool is_nontorsion_unit(const OFElement& g);

struct LubnarchCertificate {
  int n = 0;    // val_Y(f)
  int k = 0;    // val_Y(f')
  int r = 0;    // w = Y + w_r Y^r + ... after replacing w by its p^ell-th iterate
  int ell = 0;
  bool consistent = false;  // (n - 1) r == k
};

struct LubnarchResult {
  int weierstrass_degree = 0;
  bool invertible = false;
  LubnarchCertificate certificate;
};

/// Checks w^{(m)} o f = f o w at truncation and reads off the degree of f.
/// Errors: NonzeroConstantTerm, NotSeparable, TorsionW, CommutationFails.
LubnarchResult lubnarch_analyze(const FqSeries& f, const FqSeries& w, std::int64_t m, std::uint64_t n_max = 0);
/// Same with w = [g] mod pi, deciding nontorsion exactly from g.
LubnarchResult lubnarch_analyze(const LTModule& module, const FqSeries& f, const OFElement& g, std::int64_t m);

PerfSeries phi_q(const PerfSeries& f);
PerfSeries phi_q_inverse(const PerfSeries& f);
/// True iff f has depth 0 and every exponent with a nonzero coefficient is a
/// multiple of q.
bool in_phi_q_image(const PerfSeries& f);

/// d/dY of [g] mod pi equals the constant g mod pi, mod Y^K. Needs the
/// special-log coordinate (WrongCoordinate) and F != Q_p (BaseFieldIsQp),
/// which is when log' = 1 mod pi.
bool ltder_check(const LTModule& module, const GammaElement& gamma, int K);

struct KernelResult {
  std::vector<FqSeries> basis;  // polynomials of degree < K
  int target_order = 0;         // (gamma - 1) f is computed mod Y^{target_order}
};

/// Basis of {f in k[Y], deg f < K : gamma(f) = f mod Y^{K'}} where K' is
/// large enough that nonconstant polynomials cannot be fixed for trivial
/// reasons. TorsionGamma when g is a root of unity.
KernelResult fixed_field_kernel(const LTModule& module, const GammaElement& gamma, int K);

struct NoltraceWitness {
  PerfSeries lhs;  // (1 - gamma)(Y^{q/p}) at depth 0
  bool in_image = false;
  std::int64_t first_bad_exponent = -1;
};

/// Requires e*d > 1 (BaseFieldIsQp), g = 1 mod pi (BadGamma) and the
/// special-log coordinate (WrongCoordinate).
NoltraceWitness noltrace_witness(const LTModule& module, const GammaElement& gamma, int K);

}  // namespace ltforge
