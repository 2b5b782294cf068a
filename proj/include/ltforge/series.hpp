#pragma once

// Truncated power series f = sum_{i<K} f_i T^i + O(T^K) over the coefficient
// rings O_F/pi^N (OFElement), k (FqElement) and F with tracked valuations
// (FElement). Coefficients beyond the order K are unknown, not zero.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ltforge/errors.hpp"
#include "ltforge/felement.hpp"
#include "ltforge/padic.hpp"

namespace ltforge {

inline bool coeff_is_unit(const OFElement& x) { return x.is_unit(); }
inline bool coeff_is_unit(const FqElement& x) { return !x.is_zero(); }
inline bool coeff_is_unit(const FElement& x) { return !x.is_zero(); }

template <class R>
class Series {
 public:
  Series() = default;
  explicit Series(std::vector<R> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw Error(ErrorKind::MixedRing, "series needs at least one known coefficient");
  }

  static Series zero(const R& proto, int order) { return Series(std::vector<R>(static_cast<std::size_t>(order), proto.zero_like())); }
  static Series constant(const R& c, int order) {
    Series s = zero(c, order);
    s.c_[0] = c;
    return s;
  }
  /// The series T.
  static Series variable(const R& proto, int order) {
    Series s = zero(proto, order);
    if (order > 1) s.c_[1] = proto.one_like();
    return s;
  }
  /// c * T^n.
  static Series monomial(const R& c, int n, int order) {
    Series s = zero(c, order);
    if (n < order) s.c_[static_cast<std::size_t>(n)] = c;
    return s;
  }

  int order() const { return static_cast<int>(c_.size()); }
  const R& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  R& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  const std::vector<R>& coeffs() const { return c_; }
  const R& proto() const { return c_.front(); }

  Series truncated(int order) const {
    const int k = std::min(order, this->order());
    return Series(std::vector<R>(c_.begin(), c_.begin() + k));
  }

  bool operator==(const Series& o) const { return c_ == o.c_; }

 private:
  std::vector<R> c_;
};

template <class R>
Series<R> operator+(const Series<R>& a, const Series<R>& b) {
  const int K = std::min(a.order(), b.order());
  std::vector<R> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) out.push_back(a[i] + b[i]);
  return Series<R>(std::move(out));
}

template <class R>
Series<R> operator-(const Series<R>& a, const Series<R>& b) {
  const int K = std::min(a.order(), b.order());
  std::vector<R> out;
  out.reserve(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) out.push_back(a[i] - b[i]);
  return Series<R>(std::move(out));
}

template <class R>
Series<R> operator-(const Series<R>& a) {
  std::vector<R> out;
  for (const auto& x : a.coeffs()) out.push_back(-x);
  return Series<R>(std::move(out));
}

template <class R>
Series<R> scale(const R& s, const Series<R>& a) {
  std::vector<R> out;
  for (const auto& x : a.coeffs()) out.push_back(s * x);
  return Series<R>(std::move(out));
}

/// Product truncated to `order` (never beyond what the factors justify).
template <class R>
Series<R> mul(const Series<R>& a, const Series<R>& b, int order) {
  const int K = std::min({order, a.order(), b.order()});
  std::vector<R> out(static_cast<std::size_t>(K), a.proto().zero_like());
  for (int i = 0; i < K; ++i) {
    if (a[i].is_zero()) continue;
    for (int j = 0; i + j < K; ++j) {
      if (b[j].is_zero()) continue;
      out[static_cast<std::size_t>(i + j)] += a[i] * b[j];
    }
  }
  return Series<R>(std::move(out));
}

template <class R>
Series<R> operator*(const Series<R>& a, const Series<R>& b) {
  return mul(a, b, std::min(a.order(), b.order()));
}

/// Index of the first nonzero coefficient, or the order if none is known.
template <class R>
int val_T(const Series<R>& f) {
  for (int i = 0; i < f.order(); ++i)
    if (!f[i].is_zero()) return i;
  return f.order();
}

template <class R>
Series<R> derivative(const Series<R>& f) {
  if (f.order() <= 1) return Series<R>::zero(f.proto(), 1);
  std::vector<R> out;
  for (int i = 1; i < f.order(); ++i) {
    R c = f[i].zero_like();
    // i * f_i computed by repeated addition keeps this ring-agnostic.
    R acc = f[i];
    for (int k = i; k; k >>= 1) {
      if (k & 1) c += acc;
      acc += acc;
    }
    out.push_back(c);
  }
  return Series<R>(std::move(out));
}

/// Composition f(g). Requires g(0) = 0. With v = val_T(g) the result is
/// known mod T^{min(v * order(f), order(g))}.
template <class R>
Series<R> compose(const Series<R>& f, const Series<R>& g) {
  if (!g[0].is_zero()) throw Error(ErrorKind::NonzeroConstantTerm, "inner series has nonzero constant term");
  const int v = val_T(g);
  const long long bound = static_cast<long long>(v) * f.order();
  const int K = static_cast<int>(std::min<long long>(bound, g.order()));
  int top = std::min(f.order(), K) - 1;
  while (top > 0 && f[top].is_zero()) --top;
  Series<R> res = Series<R>::constant(f[std::max(top, 0)], K);
  for (int i = top - 1; i >= 0; --i) {
    res = mul(res, g, K);
    res[0] += f[i];
  }
  return res;
}

/// Table P with P[m] = g^m (m = 0..max_power), each truncated to order(g).
template <class R>
std::vector<Series<R>> power_table(const Series<R>& g, int max_power) {
  std::vector<Series<R>> P;
  P.push_back(Series<R>::constant(g.proto().one_like(), g.order()));
  for (int m = 1; m <= max_power; ++m) P.push_back(mul(P.back(), g, g.order()));
  return P;
}

/// Compositional inverse of f, with f(0) = 0 and f'(0) a unit. Computed
/// degree by degree from f(g) = T, maintaining the powers g^m.
template <class R>
Series<R> compositional_inverse(const Series<R>& f) {
  const int K = f.order();
  if (K < 2) throw Error(ErrorKind::NotInvertible, "series order too small to invert");
  if (!f[0].is_zero()) throw Error(ErrorKind::NonzeroConstantTerm, "series has nonzero constant term");
  if (!coeff_is_unit(f[1])) throw Error(ErrorKind::NotInvertible, "linear coefficient is not a unit");
  const R zero = f[1].zero_like();
  const R f1_inv = f[1].inv();
  // P[m][n] = coefficient of T^n in g^m, for m >= 1.
  std::vector<std::vector<R>> P(static_cast<std::size_t>(K), std::vector<R>(static_cast<std::size_t>(K), zero));
  std::vector<R> g(static_cast<std::size_t>(K), zero);
  g[1] = f1_inv;
  P[1][1] = g[1];
  for (int n = 2; n < K; ++n) {
    R acc = zero;
    for (int m = 2; m <= n; ++m) {
      R pm = zero;
      for (int t = 1; t <= n - m + 1; ++t) {
        if (g[static_cast<std::size_t>(t)].is_zero()) continue;
        const R& lower = P[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(n - t)];
        if (lower.is_zero()) continue;
        pm += g[static_cast<std::size_t>(t)] * lower;
      }
      P[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)] = pm;
      if (!f[m].is_zero() && !pm.is_zero()) acc += f[m] * pm;
    }
    g[static_cast<std::size_t>(n)] = -(acc * f1_inv);
    P[1][static_cast<std::size_t>(n)] = g[static_cast<std::size_t>(n)];
  }
  return Series<R>(std::move(g));
}

/// Multiplicative inverse of a series whose constant term is a unit.
template <class R>
Series<R> reciprocal(const Series<R>& f) {
  if (!coeff_is_unit(f[0])) throw Error(ErrorKind::NotAUnit, "constant term is not a unit");
  const int K = f.order();
  const R c0 = f[0].inv();
  Series<R> g = Series<R>::constant(c0, K);
  for (int n = 1; n < K; ++n) {
    R acc = f[0].zero_like();
    for (int i = 1; i <= n; ++i)
      if (!f[i].is_zero()) acc += f[i] * g[n - i];
    g[n] = -(acc * c0);
  }
  return g;
}

/// Applies fn coefficientwise (ring change, precision change, ...).
template <class S, class R, class Fn>
Series<S> map_coeffs(const Series<R>& f, Fn&& fn) {
  std::vector<S> out;
  out.reserve(f.coeffs().size());
  for (const auto& c : f.coeffs()) out.push_back(fn(c));
  return Series<S>(std::move(out));
}

/// n-fold composition f o f o ... o f.
template <class R>
Series<R> iterate(const Series<R>& f, std::uint64_t n) {
  Series<R> r = Series<R>::variable(f.proto(), f.order());
  Series<R> b = f;
  while (n) {
    if (n & 1) r = compose(r, b);
    b = compose(b, b);
    n >>= 1;
  }
  return r;
}

/// Coefficientwise x -> x^{p^m} on a series over k.
Series<FqElement> frobenius_twist(const Series<FqElement>& w, std::int64_t m);

/// Reduction mod pi of a series over O_F.
Series<FqElement> reduce_mod_pi(const Series<OFElement>& f);
Series<OFElement> with_precision(const Series<OFElement>& f, int precision);
Series<FElement> to_field(const Series<OFElement>& f);
/// Demotes an F-series to O_F / pi^N (IntegralityFailure / PrecisionExhausted).
Series<OFElement> to_integral(const Series<FElement>& f, int N);

std::string to_string(const Series<OFElement>& f, const std::string& var = "T");
std::string to_string(const Series<FqElement>& f, const std::string& var = "T");
std::string to_string(const Series<FElement>& f, const std::string& var = "T");

nlohmann::json to_json(const Series<OFElement>& f);
nlohmann::json to_json(const Series<FqElement>& f);
nlohmann::json to_json(const Series<FElement>& f);
Series<OFElement> of_series_from_json(Field field, const nlohmann::json& j);
Series<FqElement> fq_series_from_json(Field field, const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Bivariate series truncated by total degree: s_{i,j} known for i + j < K.

template <class R>
class Bivariate {
 public:
  Bivariate() = default;
  Bivariate(const R& proto, int order)
      : order_(order), c_(static_cast<std::size_t>(order) * static_cast<std::size_t>(order + 1) / 2, proto.zero_like()) {}

  int order() const { return order_; }
  static std::size_t index(int i, int j) {
    const std::size_t n = static_cast<std::size_t>(i + j);
    return n * (n + 1) / 2 + static_cast<std::size_t>(i);
  }
  const R& operator()(int i, int j) const { return c_[index(i, j)]; }
  R& operator()(int i, int j) { return c_[index(i, j)]; }
  const std::vector<R>& raw() const { return c_; }

  bool operator==(const Bivariate& o) const { return order_ == o.order_ && c_ == o.c_; }

  Bivariate swapped() const {
    Bivariate r = *this;
    for (int n = 0; n < order_; ++n)
      for (int i = 0; i <= n; ++i) r(i, n - i) = (*this)(n - i, i);
    return r;
  }

  /// S(X, 0) as a series in X.
  Series<R> restrict_x() const {
    std::vector<R> out;
    for (int i = 0; i < order_; ++i) out.push_back((*this)(i, 0));
    return Series<R>(std::move(out));
  }
  Series<R> restrict_y() const { return swapped().restrict_x(); }

 private:
  int order_ = 0;
  std::vector<R> c_;
};

template <class R>
Bivariate<R> operator+(const Bivariate<R>& a, const Bivariate<R>& b) {
  const int K = std::min(a.order(), b.order());
  Bivariate<R> r(a(0, 0), K);
  for (int n = 0; n < K; ++n)
    for (int i = 0; i <= n; ++i) r(i, n - i) = a(i, n - i) + b(i, n - i);
  return r;
}

template <class R>
Bivariate<R> operator-(const Bivariate<R>& a, const Bivariate<R>& b) {
  const int K = std::min(a.order(), b.order());
  Bivariate<R> r(a(0, 0), K);
  for (int n = 0; n < K; ++n)
    for (int i = 0; i <= n; ++i) r(i, n - i) = a(i, n - i) - b(i, n - i);
  return r;
}

template <class R>
Bivariate<R> mul(const Bivariate<R>& a, const Bivariate<R>& b) {
  const int K = std::min(a.order(), b.order());
  Bivariate<R> r(a(0, 0), K);
  for (int n1 = 0; n1 < K; ++n1)
    for (int i1 = 0; i1 <= n1; ++i1) {
      const R& x = a(i1, n1 - i1);
      if (x.is_zero()) continue;
      for (int n2 = 0; n1 + n2 < K; ++n2)
        for (int i2 = 0; i2 <= n2; ++i2) {
          const R& y = b(i2, n2 - i2);
          if (y.is_zero()) continue;
          r(i1 + i2, n1 - i1 + n2 - i2) += x * y;
        }
    }
  return r;
}

/// Embeds univariate series as f(X) or f(Y).
template <class R>
Bivariate<R> in_x(const Series<R>& f) {
  Bivariate<R> r(f.proto(), f.order());
  for (int i = 0; i < f.order(); ++i) r(i, 0) = f[i];
  return r;
}

template <class R>
Bivariate<R> in_y(const Series<R>& f) {
  return in_x(f).swapped();
}

/// f(S(X,Y)) for univariate f and bivariate S with S(0,0) = 0.
template <class R>
Bivariate<R> compose(const Series<R>& f, const Bivariate<R>& S) {
  if (!S(0, 0).is_zero()) throw Error(ErrorKind::NonzeroConstantTerm, "inner series has nonzero constant term");
  const int K = std::min(S.order(), f.order());
  Bivariate<R> res(f.proto(), K);
  res(0, 0) = f[K - 1];
  for (int i = K - 2; i >= 0; --i) {
    res = mul(res, S);
    res(0, 0) += f[i];
  }
  return res;
}

/// S(x(T), y(T)) for univariate x, y with zero constant terms.
template <class R>
Series<R> evaluate(const Bivariate<R>& S, const Series<R>& x, const Series<R>& y) {
  if (!x[0].is_zero() || !y[0].is_zero())
    throw Error(ErrorKind::NonzeroConstantTerm, "substituted series must vanish at 0");
  const int v = std::min(val_T(x), val_T(y));
  const int K = static_cast<int>(std::min<long long>({static_cast<long long>(v) * S.order(), x.order(), y.order()}));
  const int D = std::min(S.order(), K);
  std::vector<Series<R>> ypow;
  ypow.push_back(Series<R>::constant(y.proto().one_like(), K));
  for (int j = 1; j < D; ++j) ypow.push_back(mul(ypow.back(), y, K));
  // S(x, y) = sum_i x^i * (sum_j s_{ij} y^j), by Horner in x.
  Series<R> res = Series<R>::zero(x.proto(), K);
  for (int i = D - 1; i >= 0; --i) {
    res = mul(res, x, K);
    for (int j = 0; i + j < D; ++j) {
      const R& s = S(i, j);
      if (s.is_zero()) continue;
      const Series<R>& yj = ypow[static_cast<std::size_t>(j)];
      for (int t = 0; t < K; ++t)
        if (!yj[t].is_zero()) res[t] += s * yj[t];
    }
  }
  return res;
}

nlohmann::json to_json(const Bivariate<OFElement>& S);
std::string to_string(const Bivariate<OFElement>& S);
Bivariate<OFElement> of_bivariate_from_json(Field field, const nlohmann::json& j);

}  // namespace ltforge
