#include "ltforge/padic.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace ltforge {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::MixedSpec: return "MixedSpec";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::MixedRing: return "MixedRing";
    case ErrorKind::NonzeroConstantTerm: return "NonzeroConstantTerm";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::IntegralityFailure: return "IntegralityFailure";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::WrongCoordinate: return "WrongCoordinate";
    case ErrorKind::CommutationFails: return "CommutationFails";
    case ErrorKind::NotSeparable: return "NotSeparable";
    case ErrorKind::TorsionW: return "TorsionW";
    case ErrorKind::TorsionGamma: return "TorsionGamma";
    case ErrorKind::BaseFieldIsQp: return "BaseFieldIsQp";
    case ErrorKind::BadGamma: return "BadGamma";
    case ErrorKind::ValuationZero: return "ValuationZero";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::WrongValuation: return "WrongValuation";
    case ErrorKind::NotEquivariant: return "NotEquivariant";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::NoSeparablePower: return "NoSeparablePower";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

using boost::multiprecision::uint256_t;

constexpr u128 kLimit = u128(1) << 126;

uint256_t widen(u128 x) {
  return (uint256_t(static_cast<std::uint64_t>(x >> 64)) << 64) | uint256_t(static_cast<std::uint64_t>(x));
}

u128 narrow(const uint256_t& x) {
  const auto lo = static_cast<std::uint64_t>(x & uint256_t(UINT64_MAX));
  const auto hi = static_cast<std::uint64_t>((x >> 64) & uint256_t(UINT64_MAX));
  return (u128(hi) << 64) | lo;
}

/// Arithmetic modulo p^k for one fixed precision.
struct RingCtx {
  u128 modulus = 1;
  bool pow2 = false;
  std::vector<u128> slot_mod;  // per pi-slot canonical modulus
  std::vector<u128> neg_h;     // -h_j mod M, j < d
  std::vector<u128> neg_a;     // -a_i mod M (e x d), eisenstein tail

  u128 reduce(u128 x) const { return pow2 ? (x & (modulus - 1)) : x % modulus; }
  u128 add(u128 a, u128 b) const {
    u128 s = a + b;
    return s >= modulus ? s - modulus : s;
  }
  u128 sub(u128 a, u128 b) const { return a >= b ? a - b : a + (modulus - b); }
  u128 mul(u128 a, u128 b) const {
    if (pow2) return (a * b) & (modulus - 1);
    if ((a >> 64) == 0 && (b >> 64) == 0) return (a * b) % modulus;
    return narrow((widen(a) * widen(b)) % widen(modulus));
  }
};

u128 mod_signed(std::int64_t v, u128 m, bool pow2) {
  if (v >= 0) return pow2 ? (u128(v) & (m - 1)) : u128(v) % m;
  u128 r = pow2 ? (u128(-(v + 1)) + 1) & (m - 1) : (u128(-(v + 1)) + 1) % m;
  return r == 0 ? 0 : m - r;
}

struct FieldExtra {
  std::vector<RingCtx> ctx;  // indexed by precision
};

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

struct Registry {
  std::map<std::string, std::unique_ptr<LocalField>> fields;
  std::map<const LocalField*, FieldExtra> extra;
};

Registry& registry() {
  static Registry r;
  return r;
}

// Fields never die, so a lookup table keyed by pointer is stable.
const FieldExtra& extra_of(Field f) {
  static thread_local const LocalField* last = nullptr;
  static thread_local const FieldExtra* last_extra = nullptr;
  if (f == last) return *last_extra;
  std::lock_guard lock(registry_mutex());
  const FieldExtra& ex = registry().extra.at(f);
  last = f;
  last_extra = &ex;
  return ex;
}

const RingCtx& ctx_of(Field f, int precision) {
  const auto& ctx = extra_of(f).ctx;
  if (precision < 0 || static_cast<std::size_t>(precision) >= ctx.size()) {
    throw Error(ErrorKind::PrecisionExhausted,
                "precision " + std::to_string(precision) + " outside supported range [0, " +
                    std::to_string(ctx.size() - 1) + "]");
  }
  return ctx[static_cast<std::size_t>(precision)];
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

// Dense polynomials over F_p, lowest degree first, used for validation only.
using PolyP = std::vector<std::uint64_t>;

void trim(PolyP& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

PolyP poly_mod(PolyP a, const PolyP& m, std::uint64_t p) {
  trim(a);
  const std::uint64_t lead_inv = [&] {
    std::uint64_t l = m.back(), r = 1, e = p - 2;
    while (e) {
      if (e & 1) r = r * l % p;
      l = l * l % p;
      e >>= 1;
    }
    return r;
  }();
  while (a.size() >= m.size()) {
    const std::uint64_t c = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = (a[shift + i] + p - c * m[i] % p) % p;
    trim(a);
  }
  return a;
}

PolyP poly_mulmod(const PolyP& a, const PolyP& b, const PolyP& m, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  PolyP r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return poly_mod(r, m, p);
}

PolyP poly_gcd(PolyP a, PolyP b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    PolyP r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

int vp_u128(u128 x, std::uint32_t p) {
  if (x == 0) return 1 << 20;
  int v = 0;
  if (p == 2) {
    while ((x & 1) == 0) {
      x >>= 1;
      ++v;
    }
    return v;
  }
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// LocalField

LocalField::LocalField(FieldParams params) : params_(std::move(params)) {}

Field LocalField::create(const FieldParams& params) {
  FieldParams normalized = params;
  if (normalized.d == 1 && normalized.unram_poly.empty()) normalized.unram_poly = {0, 1};
  for (auto& c : normalized.eisenstein) c.resize(static_cast<std::size_t>(normalized.d), 0);

  std::unique_ptr<LocalField> field(new LocalField(normalized));
  field->validate();

  std::string key = field->to_json().dump();
  {
    std::lock_guard lock(registry_mutex());
    auto it = registry().fields.find(key);
    if (it != registry().fields.end()) return it->second.get();
  }
  field->finish_setup();
  std::lock_guard lock(registry_mutex());
  auto [it, inserted] = registry().fields.emplace(key, nullptr);
  if (!inserted) return it->second.get();
  it->second = std::move(field);
  return it->second.get();
}

void LocalField::validate() const {
  const auto& P = params_;
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidSpec, msg); };
  if (!is_prime(P.p)) fail("p = " + std::to_string(P.p) + " is not prime");
  if (P.d < 1 || P.e < 1) fail("d and e must be >= 1");
  if (P.d > 16 || P.e > 16) fail("d and e are limited to 16");
  std::uint64_t q = 1;
  for (int i = 0; i < P.d; ++i) {
    q *= P.p;
    if (q > (1ULL << 31)) fail("q = p^d too large");
  }
  if (static_cast<int>(P.unram_poly.size()) != P.d + 1 || P.unram_poly.back() != 1)
    fail("unram_poly must be monic of degree d");
  if (static_cast<int>(P.eisenstein.size()) != P.e + 1) fail("eisenstein must have e+1 coefficients");
  const auto& lead = P.eisenstein.back();
  for (int j = 0; j < P.d; ++j)
    if (lead[static_cast<std::size_t>(j)] != (j == 0 ? 1 : 0)) fail("eisenstein polynomial must be monic");

  const std::int64_t p = P.p;
  for (int i = 0; i < P.e; ++i)
    for (auto c : P.eisenstein[static_cast<std::size_t>(i)])
      if (c % p != 0) fail("eisenstein coefficient " + std::to_string(i) + " is not divisible by p");
  bool unit_part = false;
  for (auto c : P.eisenstein[0])
    if ((c / p) % p != 0) unit_part = true;
  if (!unit_part) fail("eisenstein constant term must have p-valuation exactly 1");

  if (P.d >= 2) {
    PolyP h;
    for (auto c : P.unram_poly) h.push_back(static_cast<std::uint64_t>(((c % p) + p) % p));
    PolyP x{0, 1};
    PolyP xp = x;
    for (int i = 1; i < P.d; ++i) {
      // xp <- xp^p mod h
      PolyP base = xp, r{1};
      std::uint64_t k = P.p;
      while (k) {
        if (k & 1) r = poly_mulmod(r, base, h, P.p);
        base = poly_mulmod(base, base, h, P.p);
        k >>= 1;
      }
      xp = r;
      PolyP diff = xp;
      diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
      diff[1] = (diff[1] + P.p - 1) % P.p;
      PolyP g = poly_gcd(h, diff, P.p);
      if (g.size() != 1) fail("unram_poly is reducible mod p");
    }
  }
}

void LocalField::finish_setup() {
  const auto& P = params_;
  q_ = 1;
  for (int i = 0; i < P.d; ++i) q_ *= P.p;

  p_pows_.clear();
  u128 pw = 1;
  p_pows_.push_back(pw);
  while (pw < kLimit / P.p) {
    pw *= P.p;
    p_pows_.push_back(pw);
  }
  const int kmax = static_cast<int>(p_pows_.size()) - 1;  // p^kmax < 2^126
  max_precision_ = P.e * (kmax - 1) + P.e - 1;

  unram_mod_p_.clear();
  for (auto c : P.unram_poly)
    unram_mod_p_.push_back(static_cast<std::uint32_t>(((c % std::int64_t(P.p)) + P.p) % P.p));

  FieldExtra ex;
  for (int n = 0; n <= max_precision_; ++n) {
    RingCtx c;
    const int Q = n / P.e, s = n % P.e;
    c.modulus = p_pows_[static_cast<std::size_t>(Q + 1)];
    c.pow2 = P.p == 2;
    for (int i = 0; i < P.e; ++i) c.slot_mod.push_back(p_pows_[static_cast<std::size_t>(i < s ? Q + 1 : Q)]);
    for (int j = 0; j < P.d; ++j)
      c.neg_h.push_back(mod_signed(-P.unram_poly[static_cast<std::size_t>(j)], c.modulus, c.pow2));
    for (int i = 0; i < P.e; ++i)
      for (int j = 0; j < P.d; ++j)
        c.neg_a.push_back(
            mod_signed(-P.eisenstein[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], c.modulus, c.pow2));
    ex.ctx.push_back(std::move(c));
  }
  {
    std::lock_guard lock(registry_mutex());
    registry().extra[this] = std::move(ex);
  }

  const int N = max_precision_;
  OFElement one = OFElement::one(this, N);
  OFElement pi_el = one.mul_pi();
  pi_max_.assign(pi_el.raw().begin(), pi_el.raw().end());

  // p/pi = -(pi^{e-1} + sum_{i=1}^{e-1} a_i pi^{i-1}) / u0 with a_0 = p u0.
  std::vector<std::int64_t> numer_slots(static_cast<std::size_t>(slots()), 0);
  std::vector<std::int64_t> u0(static_cast<std::size_t>(P.d), 0);
  for (int j = 0; j < P.d; ++j) u0[static_cast<std::size_t>(j)] = P.eisenstein[0][static_cast<std::size_t>(j)] / std::int64_t(P.p);
  for (int i = 1; i < P.e; ++i)
    for (int j = 0; j < P.d; ++j)
      numer_slots[static_cast<std::size_t>((i - 1) * P.d + j)] += P.eisenstein[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  numer_slots[static_cast<std::size_t>((P.e - 1) * P.d)] += 1;
  OFElement numer = OFElement::from_slots(this, N, numer_slots);
  OFElement u0_el = OFElement::from_slots(this, N, u0);
  OFElement ratio = -(numer * u0_el.inv());
  p_over_pi_max_.assign(ratio.raw().begin(), ratio.raw().end());

  // Generator of k^x.
  std::vector<std::uint64_t> prime_factors;
  std::uint64_t m = q_ - 1;
  for (std::uint64_t f = 2; f * f <= m; ++f) {
    if (m % f == 0) {
      prime_factors.push_back(f);
      while (m % f == 0) m /= f;
    }
  }
  if (m > 1) prime_factors.push_back(m);
  for (std::uint64_t idx = 1; idx < q_; ++idx) {
    FqElement g = FqElement::from_index(this, idx);
    bool ok = true;
    for (auto f : prime_factors)
      if (g.pow((q_ - 1) / f).is_one()) ok = false;
    if (ok) {
      generator_.assign(g.coeffs().begin(), g.coeffs().end());
      break;
    }
  }
}

OFElement LocalField::pi(int precision) const {
  OFElement x(this, max_precision_);
  x.c_.assign(pi_max_.begin(), pi_max_.end());
  return x.with_precision(precision);
}

OFElement LocalField::p_over_pi(int precision) const {
  OFElement x(this, max_precision_);
  x.c_.assign(p_over_pi_max_.begin(), p_over_pi_max_.end());
  return x.with_precision(precision);
}

const FqElement& LocalField::residue_generator() const {
  static thread_local std::map<const LocalField*, FqElement> cache;
  auto it = cache.find(this);
  if (it == cache.end())
    it = cache.emplace(this, FqElement(this, FqElement::Coeffs(generator_.begin(), generator_.end()))).first;
  return it->second;
}

nlohmann::json LocalField::to_json() const {
  nlohmann::json j;
  j["p"] = params_.p;
  j["d"] = params_.d;
  j["e"] = params_.e;
  j["unram_poly"] = params_.unram_poly;
  j["eisenstein"] = params_.eisenstein;
  j["default_precision"] = params_.default_precision;
  if (!params_.name.empty()) j["name"] = params_.name;
  return j;
}

Field field_from_json(const nlohmann::json& j) {
  try {
    FieldParams P;
    P.p = j.at("p").get<std::uint32_t>();
    P.d = j.value("d", 1);
    P.e = j.value("e", 1);
    if (j.contains("unram_poly")) P.unram_poly = j.at("unram_poly").get<std::vector<std::int64_t>>();
    for (const auto& c : j.at("eisenstein")) {
      if (c.is_number_integer())
        P.eisenstein.push_back({c.get<std::int64_t>()});
      else
        P.eisenstein.push_back(c.get<std::vector<std::int64_t>>());
    }
    P.default_precision = j.value("default_precision", 8);
    P.name = j.value("name", std::string());
    return LocalField::create(P);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("field config: ") + ex.what());
  }
}

namespace {

std::map<std::string, FieldParams> preset_table() {
  std::map<std::string, FieldParams> t;
  t["Q2"] = FieldParams{2, 1, 1, {0, 1}, {{-2}, {1}}, 8, "Q2"};
  t["Q3"] = FieldParams{3, 1, 1, {0, 1}, {{-3}, {1}}, 8, "Q3"};
  t["Q2_unr2"] = FieldParams{2, 2, 1, {1, 1, 1}, {{-2, 0}, {1, 0}}, 8, "Q2_unr2"};
  t["Q3_unr2"] = FieldParams{3, 2, 1, {1, 0, 1}, {{-3, 0}, {1, 0}}, 8, "Q3_unr2"};
  t["Q2_ram2"] = FieldParams{2, 1, 2, {0, 1}, {{-2}, {0}, {1}}, 8, "Q2_ram2"};
  return t;
}

}  // namespace

std::optional<Field> find_preset(const std::string& name) {
  auto table = preset_table();
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return LocalField::create(it->second);
}

Field preset(const std::string& name) {
  auto f = find_preset(name);
  if (!f) throw Error(ErrorKind::InvalidSpec, "unknown preset '" + name + "'");
  return *f;
}

std::vector<std::string> preset_names() { return {"Q2", "Q3", "Q2_unr2", "Q3_unr2", "Q2_ram2"}; }

// ---------------------------------------------------------------------------
// FqElement

FqElement::FqElement(Field field) : field_(field), c_(static_cast<std::size_t>(field->d()), 0) {}

FqElement::FqElement(Field field, Coeffs coeffs) : field_(field), c_(std::move(coeffs)) {
  c_.resize(static_cast<std::size_t>(field->d()), 0);
  for (auto& x : c_) x %= field->p();
}

FqElement FqElement::one(Field field) {
  FqElement r(field);
  r.c_[0] = 1;
  return r;
}

FqElement FqElement::from_int(Field field, std::int64_t v) {
  FqElement r(field);
  const std::int64_t p = field->p();
  r.c_[0] = static_cast<std::uint32_t>(((v % p) + p) % p);
  return r;
}

FqElement FqElement::random(Field field, Rng& rng) {
  FqElement r(field);
  for (auto& x : r.c_) x = static_cast<std::uint32_t>(rng.below(field->p()));
  return r;
}

FqElement FqElement::from_index(Field field, std::uint64_t index) {
  FqElement r(field);
  for (auto& x : r.c_) {
    x = static_cast<std::uint32_t>(index % field->p());
    index /= field->p();
  }
  return r;
}

bool FqElement::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](auto x) { return x == 0; });
}

bool FqElement::is_one() const {
  if (c_.empty() || c_[0] != 1) return false;
  return std::all_of(c_.begin() + 1, c_.end(), [](auto x) { return x == 0; });
}

FqElement FqElement::operator+(const FqElement& o) const {
  FqElement r(*this);
  const auto p = field_->p();
  for (std::size_t i = 0; i < c_.size(); ++i) {
    r.c_[i] += o.c_[i];
    if (r.c_[i] >= p) r.c_[i] -= p;
  }
  return r;
}

FqElement FqElement::operator-(const FqElement& o) const {
  FqElement r(*this);
  const auto p = field_->p();
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (r.c_[i] + p - o.c_[i]) % p;
  return r;
}

FqElement FqElement::operator-() const { return zero_like() - *this; }

FqElement FqElement::operator*(const FqElement& o) const {
  const std::uint64_t p = field_->p();
  const std::size_t d = c_.size();
  if (d == 1) {
    FqElement r(field_);
    r.c_[0] = static_cast<std::uint32_t>(std::uint64_t(c_[0]) * o.c_[0] % p);
    return r;
  }
  boost::container::small_vector<std::uint64_t, 8> prod(2 * d - 1, 0);
  for (std::size_t i = 0; i < d; ++i) {
    if (!c_[i]) continue;
    for (std::size_t j = 0; j < d; ++j) prod[i + j] = (prod[i + j] + std::uint64_t(c_[i]) * o.c_[j]) % p;
  }
  const auto& h = field_->unram_mod_p();
  for (std::size_t k = 2 * d - 2; k >= d; --k) {
    const std::uint64_t t = prod[k];
    if (!t) continue;
    prod[k] = 0;
    for (std::size_t j = 0; j < d; ++j) prod[k - d + j] = (prod[k - d + j] + (p - h[j]) * t) % p;
  }
  FqElement r(field_);
  for (std::size_t i = 0; i < d; ++i) r.c_[i] = static_cast<std::uint32_t>(prod[i]);
  return r;
}

FqElement FqElement::pow(std::uint64_t n) const {
  FqElement r = one_like(), b = *this;
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

FqElement FqElement::inv() const {
  if (is_zero()) throw Error(ErrorKind::NotAUnit, "zero has no inverse in k");
  return pow(field_->q() - 2);
}

FqElement FqElement::frobenius(std::int64_t m) const {
  const std::int64_t d = field_->d();
  const std::int64_t r = ((m % d) + d) % d;
  FqElement x = *this;
  for (std::int64_t i = 0; i < r; ++i) x = x.pow(field_->p());
  return x;
}

std::string FqElement::to_string() const {
  if (c_.size() == 1) return std::to_string(c_[0]);
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i];
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------------------
// OFElement

OFElement::OFElement(Field field, int precision)
    : field_(field), prec_(precision), c_(static_cast<std::size_t>(field->slots()), 0) {
  ctx_of(field, precision);  // range check
}

u128 OFElement::work_modulus() const { return ctx_of(field_, prec_).modulus; }
u128 OFElement::slot_modulus(int slot) const { return ctx_of(field_, prec_).slot_mod[static_cast<std::size_t>(slot)]; }

void OFElement::canonicalize() {
  const auto& ctx = ctx_of(field_, prec_);
  const int d = field_->d();
  for (int i = 0; i < field_->e(); ++i) {
    const u128 m = ctx.slot_mod[static_cast<std::size_t>(i)];
    for (int j = 0; j < d; ++j) {
      u128& x = c_[static_cast<std::size_t>(i * d + j)];
      x = ctx.pow2 ? (x & (m - 1)) : x % m;
    }
  }
}

void OFElement::check_same(const OFElement& a, const OFElement& b) {
  if (a.field_ != b.field_ || a.field_ == nullptr)
    throw Error(ErrorKind::MixedSpec, "operands belong to different fields");
}

OFElement OFElement::from_int(Field field, std::int64_t v, int precision) {
  OFElement r(field, precision);
  const auto& ctx = ctx_of(field, precision);
  r.c_[0] = mod_signed(v, ctx.modulus, ctx.pow2);
  r.canonicalize();
  return r;
}

OFElement OFElement::from_slots(Field field, int precision, const std::vector<std::int64_t>& slots) {
  OFElement r(field, precision);
  const auto& ctx = ctx_of(field, precision);
  for (std::size_t i = 0; i < slots.size() && i < r.c_.size(); ++i) r.c_[i] = mod_signed(slots[i], ctx.modulus, ctx.pow2);
  r.canonicalize();
  return r;
}

OFElement OFElement::lift(const FqElement& c, int precision) {
  OFElement r(c.field(), precision);
  for (std::size_t j = 0; j < c.coeffs().size(); ++j) r.c_[j] = c.coeffs()[j];
  r.canonicalize();
  return r;
}

OFElement OFElement::random(Field field, int precision, Rng& rng) {
  std::vector<FqElement> digits;
  for (int i = 0; i < precision; ++i) digits.push_back(FqElement::random(field, rng));
  return from_digits(field, digits, precision);
}

OFElement OFElement::random_unit(Field field, int precision, Rng& rng) {
  std::vector<FqElement> digits;
  for (int i = 0; i < precision; ++i) {
    FqElement c = FqElement::random(field, rng);
    if (i == 0)
      while (c.is_zero()) c = FqElement::random(field, rng);
    digits.push_back(c);
  }
  return from_digits(field, digits, precision);
}

bool OFElement::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](u128 x) { return x == 0; });
}

bool OFElement::is_one() const { return *this == one(field_, prec_); }

int OFElement::val_pi() const {
  const int d = field_->d(), e = field_->e();
  int best = prec_;
  for (int i = 0; i < e; ++i) {
    int v = 1 << 20;
    for (int j = 0; j < d; ++j) v = std::min(v, vp_u128(c_[static_cast<std::size_t>(i * d + j)], field_->p()));
    if (v < (1 << 20)) best = std::min(best, e * v + i);
  }
  return best;
}

OFElement OFElement::operator+(const OFElement& o) const {
  check_same(*this, o);
  OFElement r(field_, std::min(prec_, o.prec_));
  const auto& ctx = ctx_of(field_, r.prec_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = ctx.add(ctx.reduce(c_[i]), ctx.reduce(o.c_[i]));
  r.canonicalize();
  return r;
}

OFElement OFElement::operator-(const OFElement& o) const {
  check_same(*this, o);
  OFElement r(field_, std::min(prec_, o.prec_));
  const auto& ctx = ctx_of(field_, r.prec_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = ctx.sub(ctx.reduce(c_[i]), ctx.reduce(o.c_[i]));
  r.canonicalize();
  return r;
}

OFElement OFElement::operator-() const { return zero_like() - *this; }

namespace {

// out = a * b in O_{F_0} mod M (d coefficients each).
void unram_mul(const RingCtx& ctx, int d, const u128* a, const u128* b, u128* out) {
  if (d == 1) {
    out[0] = ctx.mul(a[0], b[0]);
    return;
  }
  boost::container::small_vector<u128, 16> prod(static_cast<std::size_t>(2 * d - 1), 0);
  for (int i = 0; i < d; ++i) {
    if (!a[i]) continue;
    for (int j = 0; j < d; ++j) prod[static_cast<std::size_t>(i + j)] = ctx.add(prod[static_cast<std::size_t>(i + j)], ctx.mul(a[i], b[j]));
  }
  for (int k = 2 * d - 2; k >= d; --k) {
    const u128 t = prod[static_cast<std::size_t>(k)];
    if (!t) continue;
    for (int j = 0; j < d; ++j)
      prod[static_cast<std::size_t>(k - d + j)] = ctx.add(prod[static_cast<std::size_t>(k - d + j)], ctx.mul(ctx.neg_h[static_cast<std::size_t>(j)], t));
  }
  for (int i = 0; i < d; ++i) out[i] = prod[static_cast<std::size_t>(i)];
}

}  // namespace

OFElement OFElement::operator*(const OFElement& o) const {
  check_same(*this, o);
  OFElement r(field_, std::min(prec_, o.prec_));
  const auto& ctx = ctx_of(field_, r.prec_);
  const int d = field_->d(), e = field_->e();
  if (d == 1 && e == 1) {
    r.c_[0] = ctx.mul(ctx.reduce(c_[0]), ctx.reduce(o.c_[0]));
    r.canonicalize();
    return r;
  }
  const std::size_t D = static_cast<std::size_t>(d);
  boost::container::small_vector<u128, 16> a(c_.begin(), c_.end()), b(o.c_.begin(), o.c_.end());
  for (auto& x : a) x = ctx.reduce(x);
  for (auto& x : b) x = ctx.reduce(x);
  boost::container::small_vector<u128, 32> prod(static_cast<std::size_t>(2 * e - 1) * D, 0);
  boost::container::small_vector<u128, 16> tmp(D, 0);
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j) {
      unram_mul(ctx, d, &a[static_cast<std::size_t>(i) * D], &b[static_cast<std::size_t>(j) * D], tmp.data());
      for (std::size_t t = 0; t < D; ++t) {
        u128& dst = prod[static_cast<std::size_t>(i + j) * D + t];
        dst = ctx.add(dst, tmp[t]);
      }
    }
  // pi^e = -sum_{i<e} a_i pi^i
  for (int k = 2 * e - 2; k >= e; --k) {
    for (int i = 0; i < e; ++i) {
      unram_mul(ctx, d, &ctx.neg_a[static_cast<std::size_t>(i) * D], &prod[static_cast<std::size_t>(k) * D], tmp.data());
      for (std::size_t t = 0; t < D; ++t) {
        u128& dst = prod[static_cast<std::size_t>(k - e + i) * D + t];
        dst = ctx.add(dst, tmp[t]);
      }
    }
  }
  for (std::size_t t = 0; t < static_cast<std::size_t>(e) * D; ++t) r.c_[t] = prod[t];
  r.canonicalize();
  return r;
}

bool OFElement::operator==(const OFElement& o) const {
  return field_ == o.field_ && prec_ == o.prec_ && c_ == o.c_;
}

OFElement OFElement::pow(std::uint64_t n) const {
  OFElement r = one_like(), b = *this;
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  return r;
}

OFElement OFElement::inv() const {
  if (!is_unit()) throw Error(ErrorKind::NotAUnit, "element " + to_string() + " has positive valuation");
  OFElement x = lift(reduce().inv(), prec_);
  const OFElement two = from_int(field_, 2, prec_);
  for (int known = 1; known < prec_; known *= 2) x = x * (two - *this * x);
  return x;
}

OFElement OFElement::mul_pi(int k) const {
  if (k < 0) throw Error(ErrorKind::IntegralityFailure, "negative shift");
  const auto& ctx = ctx_of(field_, prec_);
  const int d = field_->d(), e = field_->e();
  const std::size_t D = static_cast<std::size_t>(d);
  OFElement r = *this;
  boost::container::small_vector<u128, 16> tmp(D, 0);
  for (int step = 0; step < k && !r.is_zero(); ++step) {
    Coeffs next(c_.size(), 0);
    for (int i = 0; i + 1 < e; ++i)
      for (std::size_t t = 0; t < D; ++t) next[static_cast<std::size_t>(i + 1) * D + t] = r.c_[static_cast<std::size_t>(i) * D + t];
    const u128* top = &r.c_[static_cast<std::size_t>(e - 1) * D];
    for (int i = 0; i < e; ++i) {
      unram_mul(ctx, d, &ctx.neg_a[static_cast<std::size_t>(i) * D], top, tmp.data());
      for (std::size_t t = 0; t < D; ++t) {
        u128& dst = next[static_cast<std::size_t>(i) * D + t];
        dst = ctx.add(dst, tmp[t]);
      }
    }
    r.c_ = std::move(next);
    r.canonicalize();
  }
  return r;
}

OFElement OFElement::div_pi(int k) const {
  if (k == 0) return *this;
  if (val_pi() < k || k > prec_)
    throw Error(ErrorKind::IntegralityFailure, "element " + to_string() + " is not divisible by pi^" + std::to_string(k));
  OFElement x = *this;
  const int d = field_->d(), e = field_->e();
  const std::size_t D = static_cast<std::size_t>(d);
  for (int step = 0; step < k; ++step) {
    const int np = x.prec_ - 1;
    OFElement rest(field_, np);
    for (int i = 1; i < e; ++i)
      for (std::size_t t = 0; t < D; ++t) rest.c_[static_cast<std::size_t>(i - 1) * D + t] = x.c_[static_cast<std::size_t>(i) * D + t];
    OFElement c0(field_, np);
    for (std::size_t t = 0; t < D; ++t) {
      const u128 v = x.c_[t];
      c0.c_[t] = field_->p() == 2 ? v >> 1 : v / field_->p();
    }
    rest.canonicalize();
    c0.canonicalize();
    x = rest + c0 * field_->p_over_pi(np);
  }
  return x;
}

OFElement OFElement::with_precision(int precision) const {
  if (precision > prec_)
    throw Error(ErrorKind::PrecisionExhausted,
                "cannot raise precision from " + std::to_string(prec_) + " to " + std::to_string(precision));
  OFElement r = *this;
  r.prec_ = precision;
  ctx_of(field_, precision);
  r.canonicalize();
  return r;
}

OFElement OFElement::extended(int precision) const {
  if (precision <= prec_) return with_precision(precision);
  OFElement r = *this;
  r.prec_ = precision;
  ctx_of(field_, precision);
  return r;
}

FqElement OFElement::reduce() const {
  FqElement r(field_);
  FqElement::Coeffs cs(static_cast<std::size_t>(field_->d()), 0);
  if (prec_ == 0) return r;
  for (std::size_t j = 0; j < cs.size(); ++j) cs[j] = static_cast<std::uint32_t>(c_[j] % field_->p());
  return FqElement(field_, cs);
}

std::vector<FqElement> OFElement::digits() const {
  std::vector<FqElement> out;
  OFElement x = *this;
  for (int i = 0; i < prec_; ++i) {
    FqElement r = x.reduce();
    out.push_back(r);
    x = (x - lift(r, x.prec_)).div_pi();
  }
  return out;
}

OFElement OFElement::from_digits(Field field, const std::vector<FqElement>& digits, int precision) {
  OFElement x(field, precision);
  for (std::size_t i = std::min<std::size_t>(digits.size(), static_cast<std::size_t>(precision)); i-- > 0;)
    x = x.mul_pi() + lift(digits[i], precision);
  return x;
}

std::string OFElement::to_string() const {
  std::ostringstream os;
  auto ds = digits();
  bool any = false;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds[i].is_zero()) continue;
    os << (any ? " + " : "") << ds[i].to_string();
    if (i == 1) os << "*pi";
    if (i > 1) os << "*pi^" << i;
    any = true;
  }
  if (!any) os << "0";
  os << " + O(pi^" << prec_ << ")";
  return os.str();
}

int val_pi(const OFElement& x) { return x.val_pi(); }
FqElement reduce_mod_pi(const OFElement& x) { return x.reduce(); }

OFElement teichmuller(const FqElement& c, int precision) {
  OFElement x = OFElement::lift(c, precision);
  const std::uint64_t q = c.field()->q();
  for (int i = 0; i <= precision + 1; ++i) {
    OFElement y = x.pow(q);
    if (y == x) return x;
    x = y;
  }
  return x;
}

bool is_root_of_unity(const OFElement& g) {
  if (!g.is_unit()) return false;
  Field F = g.field();
  OFElement h = g.pow(F->q() - 1);
  // p^s-th roots of unity need (p-1) p^{s-1} <= e.
  int s = 0;
  std::uint64_t phi = F->p() - 1;
  while (phi <= static_cast<std::uint64_t>(F->e())) {
    ++s;
    phi *= F->p();
  }
  for (int i = 0; i < s; ++i) h = h.pow(F->p());
  return h.is_one();
}

nlohmann::json to_json(const FqElement& x) {
  return nlohmann::json(std::vector<std::uint32_t>(x.coeffs().begin(), x.coeffs().end()));
}

FqElement fq_element_from_json(Field field, const nlohmann::json& j) {
  try {
    if (j.is_number_integer()) return FqElement::from_int(field, j.get<std::int64_t>());
    FqElement::Coeffs cs;
    for (const auto& v : j) {
      const std::int64_t p = field->p();
      cs.push_back(static_cast<std::uint32_t>(((v.get<std::int64_t>() % p) + p) % p));
    }
    return FqElement(field, cs);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("residue element: ") + ex.what());
  }
}

nlohmann::json to_json(const OFElement& x) {
  nlohmann::json digits = nlohmann::json::array();
  for (const auto& r : x.digits()) digits.push_back(to_json(r));
  return {{"pi_digits", digits}, {"precision", x.precision()}};
}

OFElement of_element_from_json(Field field, const nlohmann::json& j) {
  try {
    const int N = j.at("precision").get<int>();
    std::vector<FqElement> ds;
    for (const auto& r : j.at("pi_digits")) ds.push_back(fq_element_from_json(field, r));
    if (static_cast<int>(ds.size()) > N) throw Error(ErrorKind::ParseError, "more digits than precision");
    return OFElement::from_digits(field, ds, N);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("O_F element: ") + ex.what());
  }
}

}  // namespace ltforge
