#include "ltforge/charp.hpp"

#include <algorithm>
#include <sstream>

namespace ltforge {

namespace {

constexpr std::int64_t kMaxDenseOrder = std::int64_t(1) << 22;

std::uint64_t q_of(Field F) { return F->q(); }

FqSeries identity_like(const FqSeries& s) { return FqSeries::variable(s.proto(), s.order()); }

bool exponents_divisible(const FqSeries& s, std::uint64_t q) {
  for (int i = 0; i < s.order(); ++i)
    if (!s[i].is_zero() && static_cast<std::uint64_t>(i) % q != 0) return false;
  return true;
}

}  // namespace

PerfSeries::PerfSeries(int depth, FqSeries series) : depth_(depth), s_(std::move(series)) {
  if (depth < 0) throw Error(ErrorKind::InvalidSpec, "depth must be non-negative");
  normalize();
}

PerfSeries PerfSeries::variable(Field field, int depth, int K) {
  return PerfSeries(depth, FqSeries::variable(FqElement::zero(field), K));
}

void PerfSeries::normalize() {
  const std::uint64_t q = q_of(field());
  // Z^K is Y^{K/q} one level down, so only floor(K/q) terms survive.
  while (depth_ > 0 && static_cast<std::uint64_t>(s_.order()) >= q && exponents_divisible(s_, q)) {
    const int K = static_cast<int>(static_cast<std::uint64_t>(s_.order()) / q);
    FqSeries t = FqSeries::zero(s_.proto(), K);
    for (int i = 0; i < K; ++i) t[i] = s_[static_cast<int>(static_cast<std::uint64_t>(i) * q)];
    s_ = std::move(t);
    --depth_;
  }
}

std::uint64_t PerfSeries::val_denominator() const {
  std::uint64_t d = 1;
  for (int i = 0; i < depth_; ++i) d *= q_of(field());
  return d;
}

FqSeries PerfSeries::series_at_depth(int m) const {
  if (m < depth_) throw Error(ErrorKind::InvalidSpec, "cannot lower the depth of a series");
  std::int64_t factor = 1;
  for (int i = depth_; i < m; ++i) {
    factor *= static_cast<std::int64_t>(q_of(field()));
    if (factor * s_.order() > kMaxDenseOrder) throw Error(ErrorKind::BudgetExceeded, "series too long at the requested depth");
  }
  FqSeries t = FqSeries::zero(s_.proto(), static_cast<int>(factor * s_.order()));
  for (int i = 0; i < s_.order(); ++i) t[static_cast<int>(i * factor)] = s_[i];
  return t;
}

bool PerfSeries::operator==(const PerfSeries& o) const {
  if (field() != o.field()) return false;
  const int m = std::max(depth_, o.depth_);
  const FqSeries a = series_at_depth(m), b = o.series_at_depth(m);
  const int K = std::min(a.order(), b.order());
  return a.truncated(K) == b.truncated(K);
}

std::string PerfSeries::to_string() const {
  std::ostringstream os;
  os << "depth " << depth_ << ": " << ltforge::to_string(s_, depth_ == 0 ? "Y" : "Z");
  return os.str();
}

nlohmann::json to_json(const PerfSeries& f) {
  nlohmann::json cs = nlohmann::json::array();
  for (int i = 0; i < f.order(); ++i)
    if (!f.series()[i].is_zero()) cs.push_back(nlohmann::json::array({i, to_json(f.series()[i])}));
  return {{"depth", f.depth()}, {"order", f.order()}, {"coeffs", cs}};
}

PerfSeries perf_series_from_json(Field field, const nlohmann::json& j) {
  try {
    const int depth = j.at("depth").get<int>();
    const int K = j.at("order").get<int>();
    if (K < 1 || K > kMaxDenseOrder) throw Error(ErrorKind::ParseError, "order out of range");
    FqSeries s = FqSeries::zero(FqElement::zero(field), K);
    for (const auto& term : j.at("coeffs")) {
      const auto e = term.at(0).get<std::int64_t>();
      if (e < 0) throw Error(ErrorKind::ParseError, "negative exponent");
      if (e >= K) continue;
      s[static_cast<int>(e)] += fq_element_from_json(field, term.at(1));
    }
    return PerfSeries(depth, std::move(s));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("perfectoid series: ") + ex.what());
  }
}

GammaElement::GammaElement(OFElement g) : g_(std::move(g)) {
  if (!g_.is_unit()) throw Error(ErrorKind::NotAUnit, "Galois elements are represented by units of O_F");
}

PerfSeries gamma_act(const LTModule& module, const GammaElement& gamma, const PerfSeries& f) {
  const FqSeries w = module.reduced_endomorphism(gamma.g(), f.order());
  return PerfSeries(f.depth(), compose(f.series(), w));
}

bool is_separable(const FqSeries& f) {
  const FqSeries d = derivative(f);
  return val_T(d) < d.order();
}

bool is_invertible(const FqSeries& f) {
  if (!f[0].is_zero()) throw Error(ErrorKind::NonzeroConstantTerm, "series has nonzero constant term");
  return f.order() > 1 && !f[1].is_zero();
}

bool is_nontorsion(const FqSeries& w, std::uint64_t n_max) {
  if (!w[0].is_zero()) throw Error(ErrorKind::NonzeroConstantTerm, "series has nonzero constant term");
  if (n_max == 0) {
    const std::uint64_t q = w.proto().field()->q();
    n_max = q * q * q;
  }
  const FqSeries T = identity_like(w);
  FqSeries x = w;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    if (x == T.truncated(x.order())) return false;
    x = compose(w, x);
  }
  return true;
}

bool is_nontorsion_unit(const OFElement& g) { return !is_root_of_unity(g); }

namespace {

void check_lubnarch_shape(const FqSeries& f, const FqSeries& w) {
  if (!f[0].is_zero() || !w[0].is_zero()) throw Error(ErrorKind::NonzeroConstantTerm, "series must vanish at 0");
  if (w.order() < 2 || !w[1].is_one()) throw Error(ErrorKind::InvalidSpec, "w must be Y + O(Y^2)");
  if (!is_separable(f)) throw Error(ErrorKind::NotSeparable, "f is not separable at this truncation");
}

LubnarchResult lubnarch_core(const FqSeries& f, const FqSeries& w, std::int64_t m) {
  const FqSeries lhs = compose(frobenius_twist(w, m), f);
  const FqSeries rhs = compose(f, w);
  const int K = std::min(lhs.order(), rhs.order());
  if (!(lhs.truncated(K) == rhs.truncated(K)))
    throw Error(ErrorKind::CommutationFails, "w^(m) o f differs from f o w at Y^" + std::to_string(val_T(lhs.truncated(K) - rhs.truncated(K))));

  LubnarchResult res;
  auto& c = res.certificate;
  c.n = val_T(f);
  c.k = val_T(derivative(f));
  FqSeries ww = w;
  c.r = val_T(ww - identity_like(ww));
  const std::uint64_t p = w.proto().field()->p();
  while (c.r < c.k + 1) {
    if (c.r >= ww.order()) throw Error(ErrorKind::PrecisionExhausted, "iterate of w is the identity at this truncation");
    if (++c.ell > 20) throw Error(ErrorKind::TorsionW, "w^(p^l) did not move its first nonlinear term past the cap");
    ww = iterate(ww, p);
    c.r = val_T(ww - identity_like(ww));
  }
  c.consistent = static_cast<std::int64_t>(c.n - 1) * c.r == c.k;
  res.weierstrass_degree = c.n;
  res.invertible = c.n == 1;
  return res;
}

}  // namespace

LubnarchResult lubnarch_analyze(const FqSeries& f, const FqSeries& w, std::int64_t m, std::uint64_t n_max) {
  check_lubnarch_shape(f, w);
  if (!is_nontorsion(w, n_max)) throw Error(ErrorKind::TorsionW, "an iterate of w is the identity at this truncation");
  return lubnarch_core(f, w, m);
}

LubnarchResult lubnarch_analyze(const LTModule& module, const FqSeries& f, const OFElement& g, std::int64_t m) {
  if (!g.is_unit()) throw Error(ErrorKind::NotAUnit, "g must be a unit");
  if (!is_nontorsion_unit(g)) throw Error(ErrorKind::TorsionW, "g is a root of unity");
  const FqSeries w = module.reduced_endomorphism(g, f.order());
  check_lubnarch_shape(f, w);
  return lubnarch_core(f, w, m);
}

PerfSeries phi_q(const PerfSeries& f) {
  if (f.depth() > 0) return PerfSeries(f.depth() - 1, f.series());
  return PerfSeries(0, PerfSeries(0, f.series()).series_at_depth(1));
}

PerfSeries phi_q_inverse(const PerfSeries& f) { return PerfSeries(f.depth() + 1, f.series()); }

bool in_phi_q_image(const PerfSeries& f) { return f.depth() == 0 && exponents_divisible(f.series(), f.field()->q()); }

bool ltder_check(const LTModule& module, const GammaElement& gamma, int K) {
  if (module.coordinate() != Coordinate::SpecialLog)
    throw Error(ErrorKind::WrongCoordinate, "the derivative identity is stated in the special-log coordinate");
  if (module.field()->is_qp())
    throw Error(ErrorKind::BaseFieldIsQp, "log'(T) is not 1 mod pi when F = Q_p, so d/dY is not the invariant derivative");
  const FqSeries w = module.reduced_endomorphism(gamma.g(), K);
  const FqSeries dw = derivative(w);
  return dw == FqSeries::constant(gamma.g().reduce(), dw.order());
}

KernelResult fixed_field_kernel(const LTModule& module, const GammaElement& gamma, int K) {
  Field F = module.field();
  const OFElement& g = gamma.g();
  if (!is_nontorsion_unit(g)) throw Error(ErrorKind::TorsionGamma, "g is a root of unity, so gamma has finite order");
  // gamma^{q-1} moves Y first in degree q^j, j = val(g^{q-1} - 1); comparing
  // mod Y^{q^j (K+1)} separates all nonconstant polynomials of degree < K.
  const int j = (g.pow(F->q() - 1) - OFElement::one(F, g.precision())).val_pi();
  std::int64_t Kt = K + 1;
  for (int i = 0; i < j; ++i) {
    Kt *= static_cast<std::int64_t>(F->q());
    if (Kt > (1 << 15)) throw Error(ErrorKind::BudgetExceeded, "g is too close to 1 for a kernel computation at this order");
  }
  const int Kp = static_cast<int>(Kt);
  const FqSeries w = module.reduced_endomorphism(g, Kp);
  const FqElement zero = FqElement::zero(F);

  // Columns (w^i - Y^i) for i = 1..K-1, rows the coefficients of Y^0..Y^{K'-1}.
  const int cols = K - 1;
  std::vector<std::vector<FqElement>> M(static_cast<std::size_t>(Kp), std::vector<FqElement>(static_cast<std::size_t>(std::max(cols, 0)), zero));
  FqSeries power = FqSeries::constant(FqElement::one(F), Kp);
  for (int i = 1; i <= cols; ++i) {
    power = power * w;
    for (int r = 0; r < Kp; ++r) M[static_cast<std::size_t>(r)][static_cast<std::size_t>(i - 1)] = power[r];
    M[static_cast<std::size_t>(i)][static_cast<std::size_t>(i - 1)] -= FqElement::one(F);
  }
  // Reduced row echelon form.
  std::vector<int> pivot_row_of(static_cast<std::size_t>(std::max(cols, 0)), -1);
  int row = 0;
  for (int c = 0; c < cols && row < Kp; ++c) {
    int piv = -1;
    for (int r = row; r < Kp; ++r)
      if (!M[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(M[static_cast<std::size_t>(row)], M[static_cast<std::size_t>(piv)]);
    auto& R = M[static_cast<std::size_t>(row)];
    const FqElement inv = R[static_cast<std::size_t>(c)].inv();
    for (auto& x : R) x *= inv;
    for (int r = 0; r < Kp; ++r) {
      if (r == row) continue;
      auto& other = M[static_cast<std::size_t>(r)];
      const FqElement factor = other[static_cast<std::size_t>(c)];
      if (factor.is_zero()) continue;
      for (int cc = c; cc < cols; ++cc) other[static_cast<std::size_t>(cc)] -= factor * R[static_cast<std::size_t>(cc)];
    }
    pivot_row_of[static_cast<std::size_t>(c)] = row++;
  }

  KernelResult out;
  out.target_order = Kp;
  out.basis.push_back(FqSeries::constant(FqElement::one(F), K));
  for (int c = 0; c < cols; ++c) {
    if (pivot_row_of[static_cast<std::size_t>(c)] >= 0) continue;
    FqSeries v = FqSeries::zero(zero, K);
    v[c + 1] = FqElement::one(F);
    for (int pc = 0; pc < cols; ++pc) {
      const int pr = pivot_row_of[static_cast<std::size_t>(pc)];
      if (pr >= 0) v[pc + 1] = -M[static_cast<std::size_t>(pr)][static_cast<std::size_t>(c)];
    }
    out.basis.push_back(v);
  }
  return out;
}

NoltraceWitness noltrace_witness(const LTModule& module, const GammaElement& gamma, int K) {
  Field F = module.field();
  if (F->is_qp()) throw Error(ErrorKind::BaseFieldIsQp, "the witness needs F different from Q_p");
  if (module.coordinate() != Coordinate::SpecialLog)
    throw Error(ErrorKind::WrongCoordinate, "the witness is computed in the special-log coordinate");
  if (!gamma.g().reduce().is_one()) throw Error(ErrorKind::BadGamma, "g must be 1 mod pi");
  const std::uint64_t e = F->q() / F->p();
  const FqSeries w = module.reduced_endomorphism(gamma.g(), K);
  FqSeries we = FqSeries::constant(FqElement::one(F), K);
  for (std::uint64_t i = 0; i < e; ++i) we = we * w;
  const FqSeries lhs = FqSeries::monomial(FqElement::one(F), static_cast<int>(e), K) - we;
  NoltraceWitness out;
  out.lhs = PerfSeries(0, lhs);
  out.in_image = true;
  for (int i = 0; i < lhs.order(); ++i)
    if (!lhs[i].is_zero() && static_cast<std::uint64_t>(i) % F->q() != 0) {
      out.in_image = false;
      out.first_bad_exponent = i;
      break;
    }
  return out;
}

}  // namespace ltforge
