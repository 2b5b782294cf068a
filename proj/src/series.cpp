#include "ltforge/series.hpp"

#include <sstream>

namespace ltforge {

Series<FqElement> frobenius_twist(const Series<FqElement>& w, std::int64_t m) {
  return map_coeffs<FqElement>(w, [m](const FqElement& c) { return c.frobenius(m); });
}

Series<FqElement> reduce_mod_pi(const Series<OFElement>& f) {
  return map_coeffs<FqElement>(f, [](const OFElement& c) { return c.reduce(); });
}

Series<OFElement> with_precision(const Series<OFElement>& f, int precision) {
  return map_coeffs<OFElement>(f, [precision](const OFElement& c) { return c.with_precision(precision); });
}

Series<FElement> to_field(const Series<OFElement>& f) {
  return map_coeffs<FElement>(f, [](const OFElement& c) { return FElement::from_of(c); });
}

Series<OFElement> to_integral(const Series<FElement>& f, int N) {
  return map_coeffs<OFElement>(f, [N](const FElement& c) { return c.to_of(N); });
}

namespace {

template <class R>
std::string render(const Series<R>& f, const std::string& var) {
  std::ostringstream os;
  bool any = false;
  for (int i = 0; i < f.order(); ++i) {
    if (f[i].is_zero()) continue;
    if (any) os << " + ";
    os << "(" << f[i].to_string() << ")";
    if (i == 1) os << "*" << var;
    if (i > 1) os << "*" << var << "^" << i;
    any = true;
  }
  if (!any) os << "0";
  os << " + O(" << var << "^" << f.order() << ")";
  return os.str();
}

nlohmann::json felement_json(const FElement& x) {
  if (x.is_zero()) return {{"zero", true}, {"abs_precision", x.abs_precision()}};
  return {{"valuation", x.valuation()}, {"unit", to_json(x.unit())}};
}

void check_ring(const nlohmann::json& j, const char* ring) {
  if (!j.is_object() || j.value("ring", std::string()) != ring)
    throw Error(ErrorKind::ParseError, std::string("expected a series over ") + ring);
}

}  // namespace

std::string to_string(const Series<OFElement>& f, const std::string& var) { return render(f, var); }
std::string to_string(const Series<FqElement>& f, const std::string& var) { return render(f, var); }
std::string to_string(const Series<FElement>& f, const std::string& var) { return render(f, var); }

std::string to_string(const Bivariate<OFElement>& S) {
  std::ostringstream os;
  bool any = false;
  for (int n = 0; n < S.order(); ++n)
    for (int i = n; i >= 0; --i) {
      const OFElement& c = S(i, n - i);
      if (c.is_zero()) continue;
      if (any) os << " + ";
      os << "(" << c.to_string() << ")";
      if (i > 0) os << "*X" << (i > 1 ? "^" + std::to_string(i) : "");
      if (n - i > 0) os << "*Y" << (n - i > 1 ? "^" + std::to_string(n - i) : "");
      any = true;
    }
  if (!any) os << "0";
  os << " + O(deg " << S.order() << ")";
  return os.str();
}

nlohmann::json to_json(const Series<OFElement>& f) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : f.coeffs()) cs.push_back(to_json(c));
  return {{"ring", "OF"}, {"order", f.order()}, {"coeffs", cs}};
}

nlohmann::json to_json(const Series<FqElement>& f) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : f.coeffs()) cs.push_back(to_json(c));
  return {{"ring", "Fq"}, {"order", f.order()}, {"coeffs", cs}};
}

nlohmann::json to_json(const Series<FElement>& f) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : f.coeffs()) cs.push_back(felement_json(c));
  return {{"ring", "F"}, {"order", f.order()}, {"coeffs", cs}};
}

Series<OFElement> of_series_from_json(Field field, const nlohmann::json& j) {
  check_ring(j, "OF");
  try {
    std::vector<OFElement> cs;
    for (const auto& c : j.at("coeffs")) cs.push_back(of_element_from_json(field, c));
    if (static_cast<int>(cs.size()) != j.at("order").get<int>())
      throw Error(ErrorKind::ParseError, "coefficient count does not match order");
    for (const auto& c : cs)
      if (c.precision() != cs.front().precision()) throw Error(ErrorKind::ParseError, "mixed coefficient precisions");
    return Series<OFElement>(std::move(cs));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("series: ") + ex.what());
  }
}

Series<FqElement> fq_series_from_json(Field field, const nlohmann::json& j) {
  check_ring(j, "Fq");
  try {
    std::vector<FqElement> cs;
    for (const auto& c : j.at("coeffs")) cs.push_back(fq_element_from_json(field, c));
    if (static_cast<int>(cs.size()) != j.at("order").get<int>())
      throw Error(ErrorKind::ParseError, "coefficient count does not match order");
    return Series<FqElement>(std::move(cs));
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("series: ") + ex.what());
  }
}

nlohmann::json to_json(const Bivariate<OFElement>& S) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : S.raw()) cs.push_back(to_json(c));
  return {{"ring", "OF"}, {"arity", 2}, {"order", S.order()}, {"layout", "total_degree"}, {"coeffs", cs}};
}

Bivariate<OFElement> of_bivariate_from_json(Field field, const nlohmann::json& j) {
  check_ring(j, "OF");
  try {
    if (j.at("arity").get<int>() != 2) throw Error(ErrorKind::ParseError, "expected a bivariate series");
    const int K = j.at("order").get<int>();
    const auto& cs = j.at("coeffs");
    if (K < 1 || cs.size() != static_cast<std::size_t>(K) * static_cast<std::size_t>(K + 1) / 2)
      throw Error(ErrorKind::ParseError, "coefficient count does not match order");
    OFElement first = of_element_from_json(field, cs.at(0));
    Bivariate<OFElement> S(first, K);
    std::size_t idx = 0;
    for (int n = 0; n < K; ++n)
      for (int i = 0; i <= n; ++i) S(i, n - i) = of_element_from_json(field, cs.at(idx++));
    return S;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::ParseError, std::string("bivariate series: ") + ex.what());
  }
}

}  // namespace ltforge
