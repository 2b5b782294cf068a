#include "ltforge/frobenius_lift.hpp"

#include <algorithm>

namespace ltforge {

namespace {

constexpr int kMaxDepth = 64;

std::vector<int> full_orders(const OFSeries& s) {
  return std::vector<int>(static_cast<std::size_t>(s.proto().precision()), s.order());
}

// [pi] mod (pi^N, Z^K).
OFSeries frobenius_series(const LTModule& module, int N, int K) {
  if (N > module.precision())
    throw Error(ErrorKind::PrecisionExhausted, "module carries " + std::to_string(module.precision()) + " digits, " +
                                                   std::to_string(N) + " requested");
  return with_precision(module.pi_series(K), N);
}

FqElement digit(const OFElement& x, int i) { return x.digits()[static_cast<std::size_t>(i)]; }

// x o P from a precomputed table of powers of P (val_T(P) = 1).
OFSeries compose_with_powers(const OFSeries& x, const std::vector<OFSeries>& powers) {
  const int K = std::min(x.order(), powers.front().order());
  OFSeries res = OFSeries::zero(x.proto(), K);
  for (int k = 0; k < K; ++k) {
    if (x[k].is_zero()) continue;
    const OFSeries& Pk = powers[static_cast<std::size_t>(k)];
    for (int i = k; i < K; ++i) res[i] += x[k] * Pk[i];
  }
  return res;
}

int ceil_div(int a, std::uint64_t b) { return static_cast<int>((static_cast<std::uint64_t>(a) + b - 1) / b); }

}  // namespace

LiftSeries::LiftSeries(int depth, OFSeries series) : LiftSeries(depth, series, full_orders(series)) {}

LiftSeries::LiftSeries(int depth, OFSeries series, std::vector<int> digit_orders)
    : depth_(depth), s_(std::move(series)), orders_(std::move(digit_orders)) {
  if (depth < 0) throw Error(ErrorKind::InvalidSpec, "depth must be non-negative");
  if (orders_.size() != static_cast<std::size_t>(precision()))
    throw Error(ErrorKind::InvalidSpec, "one reliable order per pi-adic digit");
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    orders_[i] = std::clamp(orders_[i], 0, order());
    if (i > 0 && orders_[i] > orders_[i - 1]) throw Error(ErrorKind::InvalidSpec, "digit orders must not increase");
  }
}

PerfSeries LiftSeries::reduction() const { return PerfSeries(depth_, reduce_mod_pi(s_)); }

bool LiftSeries::agrees_with(const LiftSeries& o) const {
  if (depth_ != o.depth_ || field() != o.field()) return false;
  const int N = std::min(precision(), o.precision());
  for (int i = 0; i < N; ++i) {
    const int K = std::min(orders_[static_cast<std::size_t>(i)], o.orders_[static_cast<std::size_t>(i)]);
    for (int k = 0; k < K; ++k)
      if (!(digit(s_[k], i) == digit(o.s_[k], i))) return false;
  }
  return true;
}

nlohmann::json to_json(const LiftSeries& x) {
  nlohmann::json cs = nlohmann::json::array();
  for (int i = 0; i < x.order(); ++i)
    if (!x.series()[i].is_zero()) cs.push_back(nlohmann::json::array({i, to_json(x.series()[i])}));
  return {{"depth", x.depth()},
          {"order", x.order()},
          {"precision", x.precision()},
          {"digit_orders", x.digit_orders()},
          {"verified_order", x.verified_order()},
          {"coeffs", cs}};
}

LiftSeries lift_series_from_json(Field field, const nlohmann::json& j) {
  try {
    const int K = j.at("order").get<int>();
    const int N = j.at("precision").get<int>();
    if (K < 1 || N < 1 || N > field->max_precision()) throw Error(ErrorKind::ParseError, "order or precision out of range");
    OFSeries s = OFSeries::zero(OFElement::zero(field, N), K);
    for (const auto& term : j.at("coeffs")) {
      const auto e = term.at(0).get<std::int64_t>();
      if (e < 0) throw Error(ErrorKind::ParseError, "negative exponent");
      if (e >= K) continue;
      s[static_cast<int>(e)] = of_element_from_json(field, term.at(1)).with_precision(N);
    }
    std::vector<int> orders(static_cast<std::size_t>(N), K);
    if (j.contains("digit_orders")) orders = j.at("digit_orders").get<std::vector<int>>();
    return LiftSeries(j.at("depth").get<int>(), std::move(s), std::move(orders));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("lift series: ") + ex.what());
  }
}

LiftSeries lift_phi_q(const LTModule& module, const LiftSeries& x) {
  const OFSeries P = frobenius_series(module, x.precision(), x.order());
  return LiftSeries(x.depth(), compose(x.series(), P), x.digit_orders());
}

OFSeries frobenius_defect(const LTModule& module, const LiftSeries& x) {
  const OFSeries P = frobenius_series(module, x.precision(), x.order());
  return compose(x.series(), P) - compose(P, x.series());
}

bool satisfies_frobenius_equation(const LTModule& module, const LiftSeries& x) {
  const OFSeries d = frobenius_defect(module, x);
  for (int i = 0; i < x.precision(); ++i)
    for (int k = 0; k < std::min(d.order(), x.digit_orders()[static_cast<std::size_t>(i)]); ++k)
      if (!digit(d[k], i).is_zero()) return false;
  return true;
}

LiftSeries colmez_lift(const LTModule& module, const PerfSeries& u, int N, int K, const std::optional<OFSeries>& initial) {
  Field F = module.field();
  if (u.field() != F) throw Error(ErrorKind::MixedSpec, "series belongs to a different field");
  if (N < 1 || K < 2) throw Error(ErrorKind::BudgetExceeded, "need N >= 1 and K >= 2");
  if (K > u.order()) throw Error(ErrorKind::BudgetExceeded, "u is known mod Z^" + std::to_string(u.order()) + ", lift asked mod Z^" + std::to_string(K));
  if (u.depth() + N > kMaxDepth)
    throw Error(ErrorKind::BudgetExceeded, "depth " + std::to_string(u.depth()) + " + " + std::to_string(N) + " digits exceeds the depth budget");
  if (val_T(u.series()) == 0) throw Error(ErrorKind::ValuationZero, "u has a nonzero constant term");
  const OFSeries P = frobenius_series(module, N, K);
  const auto powers = power_table(P, K - 1);
  const std::uint64_t q = F->q();

  OFSeries x = OFSeries::zero(OFElement::zero(F, N), K);
  if (initial) {
    if (initial->order() < K || !(reduce_mod_pi(initial->truncated(K)) == u.series().truncated(K)))
      throw Error(ErrorKind::InvalidSpec, "initial series does not lift u");
    x = with_precision(initial->truncated(K), std::min(N, initial->proto().precision()));
    if (x.proto().precision() < N) throw Error(ErrorKind::PrecisionExhausted, "initial series has too few digits");
  } else {
    for (int k = 0; k < K; ++k) x[k] = OFElement::lift(u.series()[k], N);
  }

  std::vector<int> orders(static_cast<std::size_t>(N), 0);
  orders[0] = K;
  int depth = u.depth();
  for (int j = 0; j + 1 < N; ++j) {
    const int Kj = orders[static_cast<std::size_t>(j)];
    OFSeries defect = compose_with_powers(x, powers) - compose(P, x);
    FqSeries dbar = FqSeries::zero(FqElement::zero(F), std::max(Kj, 1));
    for (int k = 0; k < Kj; ++k) {
      const auto ds = defect[k].digits();
      for (int i = 0; i <= j; ++i)
        if (!ds[static_cast<std::size_t>(i)].is_zero())
          throw Error(ErrorKind::VerificationFailed, "defect has a digit below pi^" + std::to_string(j + 1) + " at Z^" + std::to_string(k));
      dbar[k] = ds[static_cast<std::size_t>(j + 1)];
    }
    FqSeries h;
    int next = Kj;
    if (in_phi_q_image(PerfSeries(0, dbar))) {
      next = std::max(ceil_div(Kj, q), 1);
      h = FqSeries::zero(FqElement::zero(F), next);
      for (int k = 0; static_cast<std::uint64_t>(k) * q < static_cast<std::uint64_t>(Kj); ++k)
        h[k] = -dbar[static_cast<int>(static_cast<std::uint64_t>(k) * q)];
    } else {
      // Z = [pi](Z') one level deeper; the defect becomes dbar(Z'^q) mod pi.
      x = compose_with_powers(x, powers);
      ++depth;
      h = -dbar;
    }
    orders[static_cast<std::size_t>(j + 1)] = next;
    for (int k = 0; k < next; ++k) x[k] += OFElement::lift(h[k], N).mul_pi(j + 1);
  }
  return LiftSeries(depth, std::move(x), std::move(orders));
}

std::vector<GammaElement> default_generators(const LTModule& module, int N, int K) {
  Field F = module.field();
  const int n = std::max(N, module.residue_module().input_precision(K));
  const OFElement one = OFElement::one(F, n);
  return {GammaElement(teichmuller(F->residue_generator(), n)), GammaElement(one + F->pi(n)),
          GammaElement(one + F->pi(n) * F->pi(n))};
}

EquivarianceReport equivariance_report(const LTModule& module, const PerfSeries& u, const std::vector<GammaElement>& gens) {
  EquivarianceReport rep;
  const int K = u.order();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    rep.generators.push_back(gens[i].g());
    if (rep.failing) continue;
    const FqSeries w = module.reduced_endomorphism(gens[i].g(), K);
    const FqSeries lhs = compose(u.series(), w);
    const FqSeries rhs = compose(w, u.series());
    const int k = std::min(lhs.order(), rhs.order());
    const FqSeries diff = lhs.truncated(k) - rhs.truncated(k);
    if (val_T(diff) < k) {
      rep.equivariant = false;
      rep.failing = i;
      rep.first_mismatch = val_T(diff);
    }
  }
  return rep;
}

bool check_equivariance(const LTModule& module, const PerfSeries& u, const std::vector<GammaElement>& gens) {
  return equivariance_report(module, u, gens).equivariant;
}

SeparablePower pm_normalize(const PerfSeries& u) {
  const FqSeries& s = u.series();
  if (!s[0].is_zero()) throw Error(ErrorKind::NonzeroConstantTerm, "u must vanish at 0");
  Field F = u.field();
  const std::uint64_t p = F->p();
  int v = -1;
  for (int e = 1; e < s.order(); ++e) {
    if (s[e].is_zero()) continue;
    int ve = 0;
    for (int t = e; t % static_cast<int>(p) == 0; t /= static_cast<int>(p)) ++ve;
    v = v < 0 ? ve : std::min(v, ve);
  }
  if (v < 0) throw Error(ErrorKind::NoSeparablePower, "u vanishes at its truncation");
  const std::int64_t m = static_cast<std::int64_t>(F->d()) * u.depth() - v;
  // exponents scale by p^{m - d*depth} = p^{-v}
  std::uint64_t pv = 1;
  for (int i = 0; i < v; ++i) pv *= p;
  const int K = ceil_div(s.order(), pv);
  FqSeries f = FqSeries::zero(FqElement::zero(F), K);
  for (int e = 0; e < s.order(); ++e)
    if (!s[e].is_zero()) f[static_cast<int>(static_cast<std::uint64_t>(e) / pv)] = s[e].frobenius(m);
  return {std::move(f), m};
}

nlohmann::json to_json(const Recovery& r) {
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : r.generators_checked) gens.push_back(to_json(g));
  return {{"a", to_json(r.a)},
          {"depth", r.depth},
          {"precision", r.a.precision()},
          {"generators_checked", gens},
          {"verified_order", r.verified_order}};
}

Recovery recover_a(const LTModule& module, const PerfSeries& u, int N) {
  Field F = module.field();
  if (u.val_numerator() != 1)
    throw Error(ErrorKind::WrongValuation, "val_Y(u) = " + std::to_string(u.val_numerator()) + "/" +
                                               std::to_string(u.val_denominator()) + ", expected 1/" +
                                               std::to_string(u.val_denominator()));
  const int K = u.order();
  Recovery out;
  out.depth = u.depth();
  const auto gens = default_generators(module, N, K);
  const auto rep = equivariance_report(module, u, gens);
  out.generators_checked = rep.generators;
  if (!rep.equivariant)
    throw Error(ErrorKind::NotEquivariant, "u o [g] differs from [g] o u at Z^" + std::to_string(rep.first_mismatch) +
                                               " for g = " + rep.generators[*rep.failing].to_string());

  out.lift = colmez_lift(module, u, N, K);
  const SeparablePower sep = pm_normalize(u);
  out.degree = lubnarch_analyze(module, sep.f, gens[1].g(), sep.m);
  if (!out.degree.invertible) throw Error(ErrorKind::VerificationFailed, "u^{p^m} is not invertible");
  if (out.lift.depth() != u.depth()) throw Error(ErrorKind::VerificationFailed, "the lift left the depth of u");

  int digits = 0;
  while (digits < N && out.lift.digit_orders()[static_cast<std::size_t>(digits)] >= 2) ++digits;
  out.a = out.lift.series()[1].with_precision(digits);
  if (!out.a.is_unit()) throw Error(ErrorKind::VerificationFailed, "linear coefficient of the lift is not a unit");

  // [a] mod (pi, Z^k) is determined by a mod pi^digits exactly when k <= q^digits.
  std::uint64_t reach = 1;
  for (int i = 0; i < digits && reach < static_cast<std::uint64_t>(K); ++i) reach *= F->q();
  out.verified_order = static_cast<int>(std::min<std::uint64_t>(reach, static_cast<std::uint64_t>(K)));
  const FqSeries w = module.reduced_endomorphism(out.a, out.verified_order);
  if (!(w == u.series().truncated(out.verified_order)))
    throw Error(ErrorKind::VerificationFailed, "[a] mod pi differs from u at Z^" +
                                                   std::to_string(val_T(w - u.series().truncated(out.verified_order))));
  return out;
}

}  // namespace ltforge
