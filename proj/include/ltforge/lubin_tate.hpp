#pragma once

// The Lubin-Tate formal O_F-module attached to the uniformizer of a local
// field, in one of two coordinates:
//   Polynomial: [pi](T) = T^q + pi T
//   SpecialLog: log(T) = sum_n T^{q^n} / pi^n
// Series over O_F are returned mod pi^N where N is the module precision.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ltforge/felement.hpp"
#include "ltforge/padic.hpp"
#include "ltforge/series.hpp"

namespace ltforge {

enum class Coordinate { Polynomial, SpecialLog };

std::string coordinate_name(Coordinate c);
/// Accepts "polynomial" and "special-log".
Coordinate parse_coordinate(const std::string& name);

using OFSeries = Series<OFElement>;
using FqSeries = Series<FqElement>;
using FSeries = Series<FElement>;
using OFBivariate = Bivariate<OFElement>;

class LTModule {
 public:
  LTModule(Field field, Coordinate coordinate, int precision);

  Field field() const { return field_; }
  Coordinate coordinate() const { return coordinate_; }
  int precision() const { return precision_; }

  /// Extra pi-adic digits carried by the commutation solvers at order K.
  int solver_guard(int K) const;
  /// Digits of a needed for [a] mod (pi^N, T^K): [a] mod pi^N depends on a
  /// mod pi^{N + floor(log_q(K-1))}.
  int input_precision(int K) const;
  /// Working precision for log/exp when the result is needed mod pi^target.
  int field_precision(int target, int K) const;

  OFSeries pi_series(int K) const;
  /// [pi](T) computed as exp(pi log T) over F and demoted to O_F
  /// (IntegralityFailure if a coefficient is not integral).
  OFSeries pi_series_from_exp_log(int K) const;
  /// [a](T). a = 0 gives the zero series.
  OFSeries a_series(const OFElement& a, int K) const;
  /// S(X, Y), truncated by total degree K.
  OFBivariate group_law(int K) const;

  /// log(T) with tracked valuations; digits known mod pi^N or better.
  FSeries log(int K) const;
  FSeries exp(int K) const;
  /// exp(T)^j.
  FSeries exp_power(int j, int K) const;
  /// exp(b * log T), demoted to O_F / pi^N. Equals [b](T).
  OFSeries exp_of_scaled_log(const OFElement& b, int K) const;

  /// Checks [1 + p^n c](T) = S(T, exp(p^n c log T)) mod (pi^N, T^K).
  bool locan_identity_check(int n, const OFElement& c, int K) const;

  /// f' / log'(T); SpecialLog only (WrongCoordinate otherwise).
  OFSeries invariant_derivative(const OFSeries& f) const;
  /// 1 / log'(T) as a series over O_F; SpecialLog only.
  OFSeries inverse_log_derivative(int K) const;

  /// The same module at precision 1, for reductions mod pi (shared cache).
  const LTModule& residue_module() const;
  /// [g](T) mod pi. Needs g to input_precision(K) digits of the residue module.
  FqSeries reduced_endomorphism(const OFElement& g, int K) const;

  nlohmann::json to_json() const;

 private:
  struct Cache;

  // [pi] and its power table at the given precision.
  const std::vector<OFSeries>& pi_powers(int K, int precision) const;
  OFSeries pi_series_at(int K, int precision) const;
  FSeries log_at(int K, int precision) const;
  FSeries exp_at(int K, int precision) const;
  OFSeries solve_endomorphism(const OFElement& a, int K, int W) const;

  Field field_;
  Coordinate coordinate_;
  int precision_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace ltforge
