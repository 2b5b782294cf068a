#pragma once

// Exact arithmetic in O_F / pi^N and in the residue field k = F_q for a
// finite extension F of Q_p presented as an Eisenstein extension of the
// unramified extension F_0 = Q_p[x]/(h).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>
#include "json.hpp"

#include "ltforge/errors.hpp"
#include "ltforge/random.hpp"

namespace ltforge {

using u128 = unsigned __int128;

class LocalField;
class OFElement;
class FqElement;

/// Fields are interned for the lifetime of the process, so elements can refer
/// to their field through a plain pointer.
using Field = const LocalField*;

struct FieldParams {
  std::uint32_t p = 2;
  int d = 1;
  int e = 1;
  /// Monic degree-d integer polynomial, lowest coefficient first.
  std::vector<std::int64_t> unram_poly;
  /// e+1 coefficients over O_{F_0}, each a list of d integers (basis 1, x, ...).
  std::vector<std::vector<std::int64_t>> eisenstein;
  int default_precision = 8;
  std::string name;
};

class LocalField {
 public:
  /// Validates the data (primality, irreducibility of h mod p, Eisenstein
  /// criterion) and returns the interned field. Throws InvalidSpec.
  static Field create(const FieldParams& params);

  std::uint32_t p() const { return params_.p; }
  int d() const { return params_.d; }
  int e() const { return params_.e; }
  std::uint64_t q() const { return q_; }
  int default_precision() const { return params_.default_precision; }
  const std::string& name() const { return params_.name; }
  const FieldParams& params() const { return params_; }

  /// Largest pi-adic precision representable with 126-bit coefficients.
  int max_precision() const { return max_precision_; }

  /// True when F = Q_p (e = d = 1).
  bool is_qp() const { return params_.e == 1 && params_.d == 1; }

  // Internal arithmetic support.
  u128 p_pow(int k) const { return p_pows_.at(static_cast<std::size_t>(k)); }
  int slots() const { return params_.e * params_.d; }
  const std::vector<std::uint32_t>& unram_mod_p() const { return unram_mod_p_; }

  OFElement pi(int precision) const;
  OFElement p_over_pi(int precision) const;
  /// A generator of k^x (the Teichmuller lift of it generates mu_{q-1}).
  const FqElement& residue_generator() const;

  nlohmann::json to_json() const;

 private:
  explicit LocalField(FieldParams params);
  void validate() const;
  void finish_setup();

  FieldParams params_;
  std::uint64_t q_ = 0;
  int max_precision_ = 0;
  std::vector<u128> p_pows_;
  std::vector<std::uint32_t> unram_mod_p_;
  std::vector<u128> pi_max_;         // c-form of pi at max precision
  std::vector<u128> p_over_pi_max_;  // c-form of p/pi at max precision
  std::vector<std::uint32_t> generator_;

  friend class OFElement;
  friend class FqElement;
};

Field field_from_json(const nlohmann::json& j);

/// Built-in presets: "Q2", "Q3", "Q2_unr2" (q = 4), "Q3_unr2" (q = 9),
/// "Q2_ram2" (pi^2 = 2).
Field preset(const std::string& name);
std::optional<Field> find_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Element of k = F_p[x]/(h mod p) in the polynomial basis.
class FqElement {
 public:
  using Coeffs = boost::container::small_vector<std::uint32_t, 4>;

  FqElement() = default;
  explicit FqElement(Field field);
  FqElement(Field field, Coeffs coeffs);

  static FqElement zero(Field field) { return FqElement(field); }
  static FqElement one(Field field);
  static FqElement from_int(Field field, std::int64_t v);
  static FqElement random(Field field, Rng& rng);
  /// Enumerates k in a fixed order (index in [0, q)).
  static FqElement from_index(Field field, std::uint64_t index);

  Field field() const { return field_; }
  const Coeffs& coeffs() const { return c_; }
  bool is_zero() const;
  bool is_one() const;

  FqElement operator+(const FqElement& o) const;
  FqElement operator-(const FqElement& o) const;
  FqElement operator-() const;
  FqElement operator*(const FqElement& o) const;
  FqElement& operator+=(const FqElement& o) { return *this = *this + o; }
  FqElement& operator-=(const FqElement& o) { return *this = *this - o; }
  FqElement& operator*=(const FqElement& o) { return *this = *this * o; }
  bool operator==(const FqElement& o) const { return field_ == o.field_ && c_ == o.c_; }

  FqElement pow(std::uint64_t n) const;
  /// Throws NotAUnit on zero.
  FqElement inv() const;
  /// x -> x^{p^m}; m may be negative (k is perfect).
  FqElement frobenius(std::int64_t m) const;

  FqElement zero_like() const { return FqElement(field_); }
  FqElement one_like() const { return one(field_); }

  std::string to_string() const;

 private:
  Field field_ = nullptr;
  Coeffs c_;
};

/// Element of O_F / pi^N. Stored as sum_{i<e} c_i pi^i with c_i in O_{F_0}
/// written in the basis 1, x, ..., x^{d-1}; with N = eQ + s the slots i < s
/// are reduced mod p^{Q+1} and the others mod p^Q, which is a canonical form
/// (pi^N O_F is exactly that lattice).
class OFElement {
 public:
  using Coeffs = boost::container::small_vector<u128, 4>;

  OFElement() = default;
  OFElement(Field field, int precision);

  static OFElement zero(Field field, int precision) { return OFElement(field, precision); }
  static OFElement one(Field field, int precision) { return from_int(field, 1, precision); }
  static OFElement from_int(Field field, std::int64_t v, int precision);
  /// Lift of a residue using the polynomial-basis representatives 0..p-1.
  static OFElement lift(const FqElement& c, int precision);
  static OFElement random(Field field, int precision, Rng& rng);
  static OFElement random_unit(Field field, int precision, Rng& rng);
  /// Element from the raw c-form coefficients (reduced on construction).
  static OFElement from_slots(Field field, int precision, const std::vector<std::int64_t>& slots);

  Field field() const { return field_; }
  int precision() const { return prec_; }
  const Coeffs& raw() const { return c_; }

  bool is_zero() const;
  bool is_one() const;
  /// Normalized so val_pi(pi) = 1; returns precision() for zero.
  int val_pi() const;
  bool is_unit() const { return prec_ > 0 && val_pi() == 0; }

  OFElement operator+(const OFElement& o) const;
  OFElement operator-(const OFElement& o) const;
  OFElement operator-() const;
  OFElement operator*(const OFElement& o) const;
  OFElement& operator+=(const OFElement& o) { return *this = *this + o; }
  OFElement& operator-=(const OFElement& o) { return *this = *this - o; }
  OFElement& operator*=(const OFElement& o) { return *this = *this * o; }
  /// Representation equality (same field, precision and canonical digits).
  bool operator==(const OFElement& o) const;

  OFElement pow(std::uint64_t n) const;
  /// Throws NotAUnit unless val_pi = 0.
  OFElement inv() const;
  /// Exact division by pi^k; requires val_pi >= k and loses k digits.
  OFElement div_pi(int k = 1) const;
  /// Multiplication by pi^k (precision unchanged).
  OFElement mul_pi(int k = 1) const;
  OFElement with_precision(int precision) const;
  /// Raises the nominal precision, keeping the canonical representative.
  OFElement extended(int precision) const;

  FqElement reduce() const;
  /// pi-adic digits in the representative set used by lift().
  std::vector<FqElement> digits() const;
  static OFElement from_digits(Field field, const std::vector<FqElement>& digits, int precision);

  OFElement zero_like() const { return OFElement(field_, prec_); }
  OFElement one_like() const { return one(field_, prec_); }

  std::string to_string() const;

 private:
  void canonicalize();
  u128 work_modulus() const;
  u128 slot_modulus(int slot) const;
  static void check_same(const OFElement& a, const OFElement& b);
  friend class LocalField;

  Field field_ = nullptr;
  int prec_ = 0;
  Coeffs c_;
};

/// Valuation v_pi(a-b); equal to the common precision when a = b there.
int val_pi(const OFElement& x);
FqElement reduce_mod_pi(const OFElement& x);
/// The unique root of unity of order dividing q-1 reducing to c.
OFElement teichmuller(const FqElement& c, int precision);

/// True if g is a root of unity in O_F at the given precision, i.e. the
/// order of g in (O_F/pi^N)^x is a divisor of (q-1) * p^s where p^s is the
/// largest p-power root of unity order possible in an extension of
/// ramification index e.
/// Decided at the precision of g: true when g^{(q-1) p^s} is 1 there.
bool is_root_of_unity(const OFElement& g);

nlohmann::json to_json(const OFElement& x);
OFElement of_element_from_json(Field field, const nlohmann::json& j);
nlohmann::json to_json(const FqElement& x);
FqElement fq_element_from_json(Field field, const nlohmann::json& j);

}  // namespace ltforge
