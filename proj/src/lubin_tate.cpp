#include "ltforge/lubin_tate.hpp"

#include <algorithm>
#include <utility>

namespace ltforge {

std::string coordinate_name(Coordinate c) { return c == Coordinate::Polynomial ? "polynomial" : "special-log"; }

Coordinate parse_coordinate(const std::string& name) {
  if (name == "polynomial") return Coordinate::Polynomial;
  if (name == "special-log") return Coordinate::SpecialLog;
  throw Error(ErrorKind::InvalidSpec, "unknown coordinate '" + name + "' (expected polynomial or special-log)");
}

struct LTModule::Cache {
  using Key = std::pair<int, int>;
  std::mutex mu;
  std::map<Key, std::shared_ptr<const std::vector<OFSeries>>> pi_pow;
  std::map<Key, std::shared_ptr<const FSeries>> log;
  std::map<Key, std::shared_ptr<const FSeries>> exp;
  std::map<int, std::shared_ptr<const OFBivariate>> group;
  std::once_flag residue_once;
  std::unique_ptr<LTModule> residue;
};

namespace {

// Entries are computed outside the lock and published once; a racing
// duplicate computation is discarded.
template <class V, class Key, class Make>
const V& memo(std::mutex& mu, std::map<Key, std::shared_ptr<const V>>& table, const Key& key, Make&& make) {
  {
    std::lock_guard lock(mu);
    auto it = table.find(key);
    if (it != table.end()) return *it->second;
  }
  auto value = std::make_shared<const V>(make());
  std::lock_guard lock(mu);
  return *table.emplace(key, std::move(value)).first->second;
}

int floor_log(std::uint64_t base, std::uint64_t x) {
  int k = 0;
  for (std::uint64_t b = base; b <= x; b *= base) {
    ++k;
    if (b > x / base) break;
  }
  return k;
}

void check_order(int K) {
  if (K < 2) throw Error(ErrorKind::InvalidSpec, "series order must be at least 2");
}

// 1 / (pi^{n-1} - 1) at precision W.
OFElement pivot_unit_inverse(Field F, int n, int W) {
  return (F->pi(W).pow(static_cast<std::uint64_t>(n - 1)) - OFElement::one(F, W)).inv();
}

using Homogeneous = std::vector<OFElement>;

void hom_mul_add(const Homogeneous& u, const Homogeneous& v, Homogeneous& out) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].is_zero()) continue;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (!v[k].is_zero()) out[i + k] += u[i] * v[k];
  }
}

}  // namespace

LTModule::LTModule(Field field, Coordinate coordinate, int precision)
    : field_(field), coordinate_(coordinate), precision_(precision), cache_(std::make_shared<Cache>()) {
  if (!field) throw Error(ErrorKind::InvalidSpec, "module needs a field");
  if (precision < 1) throw Error(ErrorKind::InvalidSpec, "module precision must be positive");
  if (precision > field->max_precision())
    throw Error(ErrorKind::PrecisionExhausted, "precision exceeds the representable range for this field");
}

int LTModule::solver_guard(int K) const { return 1 + floor_log(field_->q(), static_cast<std::uint64_t>(std::max(K - 1, 1))); }

int LTModule::input_precision(int K) const {
  return precision_ + floor_log(field_->q(), static_cast<std::uint64_t>(std::max(K - 1, 1)));
}

int LTModule::field_precision(int target, int K) const {
  const std::uint64_t q = field_->q();
  const int denominators = static_cast<int>((static_cast<std::uint64_t>(K - 1) + q - 2) / (q - 1));
  const int W = target + denominators + solver_guard(K) + 2;
  if (W > field_->max_precision())
    throw Error(ErrorKind::PrecisionExhausted, "order " + std::to_string(K) + " needs " + std::to_string(W) +
                                                   " working digits, more than the field supports");
  return W;
}

OFSeries LTModule::pi_series_at(int K, int W) const {
  if (coordinate_ == Coordinate::Polynomial) {
    OFSeries P = OFSeries::zero(OFElement::zero(field_, W), K);
    P[1] = field_->pi(W);
    if (field_->q() < static_cast<std::uint64_t>(K)) P[static_cast<int>(field_->q())] += OFElement::one(field_, W);
    return P;
  }
  // log([pi](T)) = pi log(T), solved degree by degree. With G_0 = [pi] and
  // G_k = G_{k-1}^q the equation at T^n reads
  //   p_n = pi^{1-k0} [n = q^{k0}] - sum_{k>=1} [G_k]_n / pi^k,
  // which is multiplied through by pi^kmax to stay in O_F.
  const std::uint64_t q = field_->q();
  const int kmax = floor_log(q, static_cast<std::uint64_t>(K - 1));
  const int Wk = W + kmax;
  if (Wk > field_->max_precision()) throw Error(ErrorKind::PrecisionExhausted, "order too large for [pi] at this precision");
  const OFElement zero = OFElement::zero(field_, Wk);
  const int qi = static_cast<int>(std::min<std::uint64_t>(q, static_cast<std::uint64_t>(K)));
  // Q[k][m][n] = coefficient of T^n in G_{k-1}^m (k = 1..kmax, m = 1..q).
  std::vector<std::vector<std::vector<OFElement>>> Q(
      static_cast<std::size_t>(kmax + 1),
      std::vector<std::vector<OFElement>>(static_cast<std::size_t>(qi + 1), std::vector<OFElement>(static_cast<std::size_t>(K), zero)));
  std::vector<OFElement> pi_pow{OFElement::one(field_, Wk)};
  for (int k = 1; k <= kmax + 1; ++k) pi_pow.push_back(pi_pow.back() * field_->pi(Wk));
  OFSeries P = OFSeries::zero(zero, K);
  for (int n = 1; n < K; ++n) {
    for (int k = 1; k <= kmax; ++k) {
      auto& rows = Q[static_cast<std::size_t>(k)];
      for (int m = 2; m <= static_cast<int>(q); ++m) {
        OFElement acc = zero;
        for (int t = 1; t < n; ++t) {
          const OFElement& x = rows[1][static_cast<std::size_t>(t)];
          const OFElement& y = rows[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(n - t)];
          if (!x.is_zero() && !y.is_zero()) acc += x * y;
        }
        rows[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = acc;
      }
      if (k < kmax) Q[static_cast<std::size_t>(k + 1)][1][static_cast<std::size_t>(n)] = rows[q][static_cast<std::size_t>(n)];
    }
    OFElement acc = zero;
    int k0 = 0;
    std::uint64_t e = 1;
    while (e < static_cast<std::uint64_t>(n)) e *= q, ++k0;
    if (e == static_cast<std::uint64_t>(n)) acc = pi_pow[static_cast<std::size_t>(kmax + 1 - k0)];
    for (int k = 1; k <= kmax; ++k) {
      const OFElement& g = Q[static_cast<std::size_t>(k)][q][static_cast<std::size_t>(n)];
      if (!g.is_zero()) acc -= g * pi_pow[static_cast<std::size_t>(kmax - k)];
    }
    if (acc.val_pi() < kmax) throw Error(ErrorKind::IntegralityFailure, "[pi] has a non-integral coefficient at T^" + std::to_string(n));
    P[n] = acc.div_pi(kmax).extended(Wk);
    if (kmax >= 1) Q[1][1][static_cast<std::size_t>(n)] = P[n];
  }
  return with_precision(P, W);
}

OFSeries LTModule::pi_series_from_exp_log(int K) const {
  check_order(K);
  const int Wf = field_precision(precision_, K);
  FSeries arg = scale(FElement::pi_power(field_, 1, Wf), log_at(K, Wf));
  try {
    return to_integral(compose(exp_at(K, Wf), arg), precision_);
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::IntegralityFailure)
      throw Error(ErrorKind::IntegralityFailure, "exp(pi log T) has a non-integral coefficient: " + std::string(err.what()));
    throw;
  }
}

const std::vector<OFSeries>& LTModule::pi_powers(int K, int W) const {
  return memo(cache_->mu, cache_->pi_pow, std::make_pair(K, W),
              [&] { return power_table(pi_series_at(K, W), K - 1); });
}

OFSeries LTModule::pi_series(int K) const {
  check_order(K);
  const int W = coordinate_ == Coordinate::Polynomial ? precision_ : precision_ + solver_guard(K);
  return with_precision(pi_powers(K, W)[1], precision_);
}

OFSeries LTModule::solve_endomorphism(const OFElement& a, int K, int W) const {
  const auto& Ppow = pi_powers(K, W);
  const OFSeries& P = Ppow[1];
  const OFElement zero = OFElement::zero(field_, W);
  int mmax = 1;
  for (int m = 2; m < K; ++m)
    if (!P[m].is_zero()) mmax = m;

  // Apow[m][n] = coefficient of T^n in A^m.
  std::vector<std::vector<OFElement>> Apow(static_cast<std::size_t>(mmax + 1),
                                           std::vector<OFElement>(static_cast<std::size_t>(K), zero));
  auto& A = Apow[1];
  A[1] = a;
  for (int n = 2; n < K; ++n) {
    for (int m = 2; m <= std::min(n, mmax); ++m) {
      OFElement acc = zero;
      const auto& lower = Apow[static_cast<std::size_t>(m - 1)];
      for (int t = 1; t <= n - m + 1; ++t) {
        const auto& x = A[static_cast<std::size_t>(t)];
        const auto& y = lower[static_cast<std::size_t>(n - t)];
        if (!x.is_zero() && !y.is_zero()) acc += x * y;
      }
      Apow[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = acc;
    }
    // (pi^n - pi) A_n = sum_{m>=2} P_m [A^m]_n - sum_{m<n} A_m [P^m]_n
    OFElement R = zero;
    for (int m = 2; m <= std::min(n, mmax); ++m) {
      const auto& y = Apow[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
      if (!P[m].is_zero() && !y.is_zero()) R += P[m] * y;
    }
    for (int m = 1; m < n; ++m) {
      const auto& x = A[static_cast<std::size_t>(m)];
      const auto& y = Ppow[static_cast<std::size_t>(m)][n];
      if (!x.is_zero() && !y.is_zero()) R -= x * y;
    }
    if (R.val_pi() < 1) throw Error(ErrorKind::CommutationFails, "commutation with [pi] has no integral solution");
    A[static_cast<std::size_t>(n)] = R.div_pi(1).extended(W) * pivot_unit_inverse(field_, n, W);
  }
  return OFSeries(std::vector<OFElement>(A.begin(), A.end()));
}

OFSeries LTModule::a_series(const OFElement& a, int K) const {
  check_order(K);
  if (a.field() != field_) throw Error(ErrorKind::MixedSpec, "coefficient belongs to a different field");
  const int need = input_precision(K);
  if (a.precision() < need)
    throw Error(ErrorKind::PrecisionExhausted, "[a] mod (pi^" + std::to_string(precision_) + ", T^" + std::to_string(K) +
                                                   ") needs a to " + std::to_string(need) + " digits, got " +
                                                   std::to_string(a.precision()));
  if (a.is_zero()) return OFSeries::zero(OFElement::zero(field_, precision_), K);
  const int W = precision_ + solver_guard(K);
  const OFElement aw = a.with_precision(std::min(a.precision(), W)).extended(W);
  return with_precision(solve_endomorphism(aw, K, W), precision_);
}

OFBivariate LTModule::group_law(int K) const {
  check_order(K);
  return memo(cache_->mu, cache_->group, K, [&] {
    const int W = precision_ + solver_guard(K);
    const auto& Ppow = pi_powers(K, W);
    const OFSeries& P = Ppow[1];
    const OFElement zero = OFElement::zero(field_, W);
    int mmax = 1;
    for (int m = 2; m < K; ++m)
      if (!P[m].is_zero()) mmax = m;

    auto blank = [&](int deg) { return Homogeneous(static_cast<std::size_t>(deg + 1), zero); };
    // H[n][i] = coefficient of X^i Y^{n-i}.
    std::vector<Homogeneous> H;
    H.push_back(blank(0));
    H.push_back(Homogeneous{OFElement::one(field_, W), OFElement::one(field_, W)});
    // Pw[m][n] = degree-n part of S^m (filled for n >= m).
    std::vector<std::vector<Homogeneous>> Pw(static_cast<std::size_t>(mmax + 1));
    for (int m = 2; m <= mmax; ++m) Pw[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(K));

    for (int n = 2; n < K; ++n) {
      for (int m = 2; m <= std::min(n, mmax); ++m) {
        Homogeneous acc = blank(n);
        for (int t = 1; t <= n - m + 1; ++t) {
          const Homogeneous& lower = m == 2 ? H[static_cast<std::size_t>(n - t)] : Pw[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(n - t)];
          hom_mul_add(H[static_cast<std::size_t>(t)], lower, acc);
        }
        Pw[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = std::move(acc);
      }
      Homogeneous R = blank(n);
      for (int m = 2; m <= std::min(n, mmax); ++m) {
        if (P[m].is_zero()) continue;
        const Homogeneous& part = Pw[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
        for (int a = 0; a <= n; ++a)
          if (!part[static_cast<std::size_t>(a)].is_zero()) R[static_cast<std::size_t>(a)] += P[m] * part[static_cast<std::size_t>(a)];
      }
      // S_{<n}(P(X), P(Y)) in degree n.
      for (int d = 1; d < n; ++d)
        for (int i = 0; i <= d; ++i) {
          const OFElement& s = H[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)];
          if (s.is_zero()) continue;
          const int j = d - i;
          const int lo = i, hi = n - j;
          for (int a = lo; a <= hi; ++a) {
            const OFElement& x = Ppow[static_cast<std::size_t>(i)][a];
            const OFElement& y = Ppow[static_cast<std::size_t>(j)][n - a];
            if (x.is_zero() || y.is_zero()) continue;
            R[static_cast<std::size_t>(a)] -= s * x * y;
          }
        }
      const OFElement u = pivot_unit_inverse(field_, n, W);
      Homogeneous Sn = blank(n);
      for (int a = 0; a <= n; ++a) {
        const OFElement& r = R[static_cast<std::size_t>(a)];
        if (r.is_zero()) continue;
        if (r.val_pi() < 1) throw Error(ErrorKind::CommutationFails, "group law has no integral solution");
        Sn[static_cast<std::size_t>(a)] = r.div_pi(1).extended(W) * u;
      }
      H.push_back(std::move(Sn));
    }
    OFBivariate S(OFElement::zero(field_, precision_), K);
    for (int n = 0; n < K; ++n)
      for (int i = 0; i <= n; ++i) S(i, n - i) = H[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)].with_precision(precision_);
    return S;
  });
}

FSeries LTModule::log_at(int K, int Wf) const {
  return memo(cache_->mu, cache_->log, std::make_pair(K, Wf), [&] {
    if (coordinate_ == Coordinate::SpecialLog) {
      FSeries L = FSeries::zero(FElement::zero(field_), K);
      int n = 0;
      for (std::uint64_t e = 1; e < static_cast<std::uint64_t>(K); e *= field_->q(), ++n)
        L[static_cast<int>(e)] = FElement::pi_power(field_, -n, Wf);
      return L;
    }
    // log o [pi] = pi log, solved degree by degree over F.
    const auto& Ppow = pi_powers(K, Wf);
    FSeries L = FSeries::zero(FElement::zero(field_), K);
    L[1] = FElement::pi_power(field_, 0, Wf);
    const OFElement pi = field_->pi(Wf);
    for (int n = 2; n < K; ++n) {
      FElement acc = FElement::zero(field_);
      for (int m = 1; m < n; ++m) {
        const OFElement& y = Ppow[static_cast<std::size_t>(m)][n];
        if (L[m].is_zero() || y.is_zero()) continue;
        acc += L[m] * FElement::from_of(y);
      }
      if (acc.is_zero() && acc.abs_precision() >= FElement::kExact) continue;
      const FElement pivot = FElement::from_of(pi.pow(static_cast<std::uint64_t>(n)) - pi);
      L[n] = -(acc * pivot.inv());
    }
    return L;
  });
}

FSeries LTModule::exp_at(int K, int Wf) const {
  return memo(cache_->mu, cache_->exp, std::make_pair(K, Wf), [&] { return compositional_inverse(log_at(K, Wf)); });
}

FSeries LTModule::log(int K) const {
  check_order(K);
  return log_at(K, field_precision(precision_, K));
}

FSeries LTModule::exp(int K) const {
  check_order(K);
  return exp_at(K, field_precision(precision_, K));
}

FSeries LTModule::exp_power(int j, int K) const {
  const FSeries e = exp(K);
  FSeries r = FSeries::constant(FElement::pi_power(field_, 0, field_precision(precision_, K)), K);
  for (int i = 0; i < j; ++i) r = r * e;
  return r;
}

OFSeries LTModule::exp_of_scaled_log(const OFElement& b, int K) const {
  check_order(K);
  if (b.field() != field_) throw Error(ErrorKind::MixedSpec, "coefficient belongs to a different field");
  const int Wf = field_precision(precision_, K);
  if (b.is_zero()) return OFSeries::zero(OFElement::zero(field_, precision_), K);
  const OFElement bw = b.with_precision(std::min(b.precision(), Wf)).extended(Wf);
  FSeries arg = scale(FElement::from_of(bw), log_at(K, Wf));
  return to_integral(compose(exp_at(K, Wf), arg), precision_);
}

bool LTModule::locan_identity_check(int n, const OFElement& c, int K) const {
  if (n < 1) throw Error(ErrorKind::InvalidSpec, "exponent n must be positive");
  const int need = input_precision(K);
  const OFElement pn = OFElement::from_int(field_, field_->p(), need).pow(static_cast<std::uint64_t>(n));
  const OFElement b = pn * c.with_precision(std::min(c.precision(), need)).extended(need);
  const OFSeries lhs = a_series(OFElement::one(field_, need) + b, K);
  const OFSeries E = exp_of_scaled_log(b, K);
  const OFSeries T = OFSeries::variable(OFElement::zero(field_, precision_), K);
  const OFSeries rhs = evaluate(group_law(K), T, E);
  return lhs == rhs;
}

OFSeries LTModule::inverse_log_derivative(int K) const {
  if (coordinate_ != Coordinate::SpecialLog)
    throw Error(ErrorKind::WrongCoordinate, "the invariant derivative needs the special-log coordinate");
  const int N = precision_;
  // log'(T) = sum_n (q/pi)^n T^{q^n - 1}
  OFElement q_over_pi = field_->p_over_pi(N) * OFElement::from_int(field_, field_->p(), N).pow(static_cast<std::uint64_t>(field_->d() - 1));
  OFSeries d = OFSeries::zero(OFElement::zero(field_, N), K);
  OFElement coeff = OFElement::one(field_, N);
  for (std::uint64_t e = 1; e - 1 < static_cast<std::uint64_t>(K); e *= field_->q()) {
    d[static_cast<int>(e - 1)] = coeff;
    coeff *= q_over_pi;
  }
  return reciprocal(d);
}

OFSeries LTModule::invariant_derivative(const OFSeries& f) const {
  if (coordinate_ != Coordinate::SpecialLog)
    throw Error(ErrorKind::WrongCoordinate, "the invariant derivative needs the special-log coordinate");
  const OFSeries df = derivative(with_precision(f, std::min(precision_, f.proto().precision())));
  return df * with_precision(inverse_log_derivative(df.order()), df.proto().precision());
}

const LTModule& LTModule::residue_module() const {
  if (precision_ == 1) return *this;
  std::call_once(cache_->residue_once, [&] { cache_->residue = std::make_unique<LTModule>(field_, coordinate_, 1); });
  return *cache_->residue;
}

FqSeries LTModule::reduced_endomorphism(const OFElement& g, int K) const {
  const LTModule& R = residue_module();
  const int need = R.input_precision(K);
  if (g.precision() < need)
    throw Error(ErrorKind::PrecisionExhausted, "[g] mod (pi, T^" + std::to_string(K) + ") needs g to " + std::to_string(need) +
                                                   " digits, got " + std::to_string(g.precision()));
  return reduce_mod_pi(R.a_series(g, K));
}

nlohmann::json LTModule::to_json() const {
  return {{"field", field_->to_json()}, {"coordinate", coordinate_name(coordinate_)}, {"precision", precision_}};
}

}  // namespace ltforge
