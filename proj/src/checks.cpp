#include "ltforge/checks.hpp"

#include <algorithm>
#include <future>

namespace ltforge {

namespace {

CheckOutcome skip(const std::string& name, const Error& e) {
  CheckOutcome c{name, CheckStatus::Skip, e.what(), nlohmann::json::object()};
  c.witness["error"] = std::string(error_name(e.kind()));
  return c;
}

CheckOutcome verdict(const std::string& name, bool ok, nlohmann::json witness, const std::string& reason = "") {
  return {name, ok ? CheckStatus::Pass : CheckStatus::Fail, reason, std::move(witness)};
}

OFSeries random_series(Field F, int N, int K, Rng& rng) {
  OFSeries s = OFSeries::zero(OFElement::zero(F, N), K);
  for (int i = 1; i < K; ++i) s[i] = OFElement::random(F, N, rng);
  return s;
}

CheckOutcome groupaxioms(const CheckConfig& cfg, Rng& rng) {
  Field F = cfg.field;
  const int N = cfg.precision, K = cfg.order;
  LTModule M(F, cfg.coordinate, N);
  const OFBivariate S = M.group_law(K);
  const OFSeries T = OFSeries::variable(OFElement::zero(F, N), K);
  nlohmann::json w;
  w["unit"] = S.restrict_x() == T && S.restrict_y() == T;
  w["commutative"] = S.swapped() == S;
  int assoc_ok = 0;
  const int triples = 3;
  for (int t = 0; t < triples; ++t) {
    const OFSeries x = random_series(F, N, K, rng), y = random_series(F, N, K, rng), z = random_series(F, N, K, rng);
    if (evaluate(S, evaluate(S, x, y), z) == evaluate(S, x, evaluate(S, y, z))) ++assoc_ok;
  }
  w["associative_substitutions"] = {assoc_ok, triples};
  const int W = M.input_precision(K);
  int mul_ok = 0, add_ok = 0;
  nlohmann::json first_bad = nullptr;
  for (int t = 0; t < cfg.samples; ++t) {
    const OFElement a = OFElement::random(F, W, rng), b = OFElement::random(F, W, rng);
    const OFSeries A = M.a_series(a, K), B = M.a_series(b, K);
    const bool m_ok = compose(A, B) == M.a_series(a * b, K);
    const bool s_ok = evaluate(S, A, B) == M.a_series(a + b, K);
    mul_ok += m_ok;
    add_ok += s_ok;
    if ((!m_ok || !s_ok) && first_bad.is_null()) first_bad = {{"a", to_json(a)}, {"b", to_json(b)}};
  }
  w["composition"] = {mul_ok, cfg.samples};
  w["addition"] = {add_ok, cfg.samples};
  if (!first_bad.is_null()) w["first_bad_pair"] = first_bad;
  const bool ok = w["unit"].get<bool>() && w["commutative"].get<bool>() && assoc_ok == triples && mul_ok == cfg.samples &&
                  add_ok == cfg.samples;
  return verdict("groupaxioms", ok, w);
}

CheckOutcome islocan(const CheckConfig& cfg, Rng& rng) {
  Field F = cfg.field;
  LTModule M(F, cfg.coordinate, cfg.precision);
  const int n = 2;
  const int W = M.input_precision(cfg.order);
  int good = 0;
  nlohmann::json bad = nlohmann::json::array();
  for (int t = 0; t < cfg.samples; ++t) {
    const OFElement c = OFElement::random(F, W, rng);
    if (M.locan_identity_check(n, c, cfg.order))
      ++good;
    else
      bad.push_back(to_json(c));
  }
  return verdict("islocan", good == cfg.samples, {{"n", n}, {"passed", good}, {"samples", cfg.samples}, {"failing_c", bad}});
}

CheckOutcome ltder(const CheckConfig& cfg, Rng& rng) {
  Field F = cfg.field;
  LTModule M(F, Coordinate::SpecialLog, cfg.precision);
  const int K = cfg.order;
  const int W = M.residue_module().input_precision(K);
  int good = 0;
  nlohmann::json bad = nlohmann::json::array();
  try {
    for (int t = 0; t < cfg.samples; ++t) {
      const OFElement g = OFElement::random_unit(F, W, rng);
      if (ltder_check(M, GammaElement(g), K))
        ++good;
      else
        bad.push_back(to_json(g));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::BaseFieldIsQp || e.kind() == ErrorKind::WrongCoordinate) return skip("ltder", e);
    throw;
  }
  return verdict("ltder", good == cfg.samples,
                 {{"coordinate", "special-log"}, {"passed", good}, {"samples", cfg.samples}, {"failing_g", bad}});
}

CheckOutcome pginv(const CheckConfig& cfg) {
  Field F = cfg.field;
  LTModule M(F, cfg.coordinate, cfg.precision);
  const OFElement g = OFElement::one(F, cfg.precision) + F->pi(cfg.precision);
  const KernelResult r = fixed_field_kernel(M, GammaElement(g), cfg.order);
  const bool constants = r.basis.size() == 1 && r.basis[0] == FqSeries::constant(FqElement::one(F), r.basis[0].order());
  return verdict("pginv", constants,
                 {{"g", to_json(g)}, {"dimension", r.basis.size()}, {"target_order", r.target_order}, {"order", cfg.order}});
}

CheckOutcome noltrace(const CheckConfig& cfg) {
  Field F = cfg.field;
  LTModule M(F, Coordinate::SpecialLog, cfg.precision);
  const OFElement g = OFElement::one(F, cfg.precision) + F->pi(cfg.precision);
  try {
    const NoltraceWitness w = noltrace_witness(M, GammaElement(g), cfg.order);
    return verdict("noltrace", w.in_image,
                   {{"coordinate", "special-log"}, {"g", to_json(g)}, {"lhs", to_json(w.lhs)}, {"in_image", w.in_image},
                    {"first_bad_exponent", w.first_bad_exponent}});
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::BaseFieldIsQp || e.kind() == ErrorKind::BadGamma) return skip("noltrace", e);
    throw;
  }
}

CheckOutcome valexp(const CheckConfig& cfg) {
  Field F = cfg.field;
  LTModule M(F, cfg.coordinate, cfg.precision);
  const int K = cfg.order + 1;  // n runs up to the order itself
  const int J = 8;
  const FSeries E = M.exp(K);
  FSeries power = M.exp_power(0, K);
  const auto q1 = static_cast<std::int64_t>(F->q() - 1);
  int violations = 0;
  nlohmann::json first = nullptr;
  for (int j = 1; j <= J; ++j) {
    power = power * E;
    for (int n = 0; n < K; ++n) {
      const std::int64_t v = power[n].valuation();
      if (v * q1 < -n && violations++ == 0) first = {{"j", j}, {"n", n}, {"valuation", v}};
    }
  }
  nlohmann::json w = {{"j_max", J}, {"n_max", K - 1}, {"violations", violations}};
  if (!first.is_null()) w["first_violation"] = first;
  return verdict("valexp", violations == 0, w);
}

}  // namespace

std::string status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

nlohmann::json to_json(const CheckOutcome& c) {
  nlohmann::json j = {{"name", c.name}, {"status", status_name(c.status)}, {"witness", c.witness}};
  if (!c.reason.empty()) j["reason"] = c.reason;
  return j;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = {"groupaxioms", "islocan", "ltder", "noltrace", "pginv", "valexp"};
  return names;
}

CheckOutcome run_check(const CheckConfig& cfg, const std::string& name) {
  Rng rng(derive_seed(cfg.seed, name));
  if (name == "groupaxioms") return groupaxioms(cfg, rng);
  if (name == "islocan") return islocan(cfg, rng);
  if (name == "ltder") return ltder(cfg, rng);
  if (name == "noltrace") return noltrace(cfg);
  if (name == "pginv") return pginv(cfg);
  if (name == "valexp") return valexp(cfg);
  throw Error(ErrorKind::InvalidSpec, "unknown check '" + name + "'");
}

std::vector<CheckOutcome> run_checks(const CheckConfig& cfg, const std::vector<std::string>& names) {
  std::vector<std::string> which = names.empty() ? check_names() : names;
  std::sort(which.begin(), which.end());
  which.erase(std::unique(which.begin(), which.end()), which.end());
  for (const auto& n : which)
    if (std::find(check_names().begin(), check_names().end(), n) == check_names().end())
      throw Error(ErrorKind::InvalidSpec, "unknown check '" + n + "'");
  std::vector<std::future<CheckOutcome>> jobs;
  for (const auto& n : which) jobs.push_back(std::async(std::launch::async, [&cfg, n] { return run_check(cfg, n); }));
  std::vector<CheckOutcome> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace ltforge
