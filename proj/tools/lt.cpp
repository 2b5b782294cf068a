// lt: command-line front end for ltforge.
//
//   lt group|series|log|exp|lift|recover|check [options]
//
// Exit status: 0 success (all checks pass), 1 mathematical failure or
// rejection, 2 usage or configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ltforge/checks.hpp"

using namespace ltforge;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string preset = "Q2";
  std::optional<std::uint32_t> p;
  int d = 1;
  int e = 1;
  std::string eisenstein;
  std::string unram_poly;
  std::string coordinate = "polynomial";
  int prec_pi = 8;
  int prec_t = 64;
  int depth = 0;
  std::uint64_t seed = 1;
  bool json = false;

  std::vector<std::int64_t> a_values;
  std::optional<std::int64_t> a;
  bool via_exp_log = false;
  std::string input;
  int samples = 10;
  std::vector<std::string> checks;
};

std::vector<std::int64_t> parse_ints(const std::string& s) {
  const std::string t = s.find('[') == std::string::npos ? "[" + s + "]" : s;
  try {
    return json::parse(t).get<std::vector<std::int64_t>>();
  } catch (const json::exception&) {
    throw UsageError("expected a list of integers, got '" + s + "'");
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& ex) {
    throw UsageError("'" + path + "' is not valid JSON: " + ex.what());
  }
}

Field resolve_field(const Options& o) {
  if (o.p) {
    json j = {{"p", *o.p}, {"d", o.d}, {"e", o.e}, {"default_precision", o.prec_pi}};
    if (o.eisenstein.empty()) throw UsageError("--p needs --eisenstein");
    const std::string eis = o.eisenstein.find('[') == std::string::npos ? "[" + o.eisenstein + "]" : o.eisenstein;
    try {
      j["eisenstein"] = json::parse(eis);
    } catch (const json::exception&) {
      throw UsageError("cannot read --eisenstein '" + o.eisenstein + "'");
    }
    if (!o.unram_poly.empty()) j["unram_poly"] = parse_ints(o.unram_poly);
    return field_from_json(j);
  }
  if (auto F = find_preset(o.preset)) return *F;
  if (const char* dir = std::getenv("LT_FORGE_PRESET_DIR")) {
    const auto path = std::filesystem::path(dir) / (o.preset + ".json");
    if (std::filesystem::exists(path)) {
      json j = read_json_file(path.string());
      if (!j.contains("name")) j["name"] = o.preset;
      return field_from_json(j);
    }
  }
  std::string known;
  for (const auto& n : preset_names()) known += " " + n;
  throw UsageError("unknown preset '" + o.preset + "' (built in:" + known + ")");
}

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

json header(const LTModule& M, int K) {
  return {{"field", M.field()->to_json()}, {"coordinate", coordinate_name(M.coordinate())}, {"precision", M.precision()}, {"order", K}};
}

OFElement planted_unit(const Options& o, const LTModule& M, int digits) {
  if (o.a) {
    OFElement a = OFElement::from_int(M.field(), *o.a, digits);
    if (!a.is_unit()) throw Error(ErrorKind::NotAUnit, "--a must be a unit");
    return a;
  }
  Rng rng(o.seed);
  return OFElement::random_unit(M.field(), digits, rng);
}

int cmd_group(const Options& o, const LTModule& M) {
  const int K = o.prec_t;
  json j = header(M, K);
  std::ostringstream t;
  const OFSeries P = M.pi_series(K);
  const OFBivariate S = M.group_law(K);
  j["pi_series"] = to_json(P);
  j["group_law"] = to_json(S);
  t << "[pi](T) = " << to_string(P) << "\n";
  t << "S(X,Y) = " << to_string(S) << "\n";
  json as = json::array();
  for (auto v : o.a_values) {
    const OFSeries A = M.a_series(OFElement::from_int(M.field(), v, M.input_precision(K)), K);
    as.push_back({{"a", v}, {"series", to_json(A)}});
    t << "[" << v << "](T) = " << to_string(A) << "\n";
  }
  j["a_series"] = as;
  emit(o, j, t.str());
  return 0;
}

int cmd_series(const Options& o, const LTModule& M) {
  const int K = o.prec_t;
  const std::int64_t v = o.a.value_or(1);
  const OFElement a = OFElement::from_int(M.field(), v, M.input_precision(K));
  const OFSeries A = o.via_exp_log ? M.exp_of_scaled_log(a, K) : M.a_series(a, K);
  json j = header(M, K);
  j["a"] = v;
  j["method"] = o.via_exp_log ? "exp-log" : "commutation";
  j["series"] = to_json(A);
  emit(o, j, "[" + std::to_string(v) + "](T) = " + to_string(A) + "\n");
  return 0;
}

int cmd_log_exp(const Options& o, const LTModule& M, bool is_log) {
  const int K = o.prec_t;
  const FSeries s = is_log ? M.log(K) : M.exp(K);
  json j = header(M, K);
  j[is_log ? "log" : "exp"] = to_json(s);
  emit(o, j, std::string(is_log ? "log" : "exp") + "(T) = " + to_string(s) + "\n");
  return 0;
}

PerfSeries input_series(const Options& o, const LTModule& M, json& meta) {
  if (!o.input.empty()) {
    const json j = read_json_file(o.input);
    return perf_series_from_json(M.field(), j.contains("u") ? j.at("u") : j);
  }
  const int K = o.prec_t;
  const OFElement a = planted_unit(o, M, std::max(o.prec_pi, M.residue_module().input_precision(K)));
  meta["planted"] = {{"a", to_json(a)}, {"depth", o.depth}};
  return PerfSeries(o.depth, M.reduced_endomorphism(a, K));
}

int cmd_lift(const Options& o, const LTModule& M) {
  json j = header(M, o.prec_t);
  const PerfSeries u = input_series(o, M, j);
  const LiftSeries x = colmez_lift(M, u, o.prec_pi, std::min(o.prec_t, u.order()));
  j["lift"] = to_json(x);
  const bool ok = satisfies_frobenius_equation(M, x) && x.reduction() == u;
  j["frobenius_equation"] = ok;
  std::ostringstream t;
  t << "depth " << x.depth() << ", reliable orders per digit:";
  for (int k : x.digit_orders()) t << " " << k;
  t << "\nlift = " << to_string(x.series(), "Z") << "\nfrobenius equation: " << (ok ? "holds" : "FAILS") << "\n";
  emit(o, j, t.str());
  return ok ? 0 : 1;
}

int cmd_recover(const Options& o, const LTModule& M) {
  json j = header(M, o.prec_t);
  const PerfSeries u = input_series(o, M, j);
  const Recovery r = recover_a(M, u, o.prec_pi);
  j["result"] = to_json(r);
  std::ostringstream t;
  t << "a = " << r.a.to_string() << " (" << r.a.precision() << " digits), depth " << r.depth << ", verified mod Z^"
    << r.verified_order << "\n";
  int status = 0;
  if (j.contains("planted")) {
    const OFElement planted = of_element_from_json(M.field(), j["planted"]["a"]);
    const bool same = planted.with_precision(r.a.precision()) == r.a && j["planted"]["depth"] == r.depth;
    j["round_trip"] = same;
    t << "round trip: " << (same ? "ok" : "MISMATCH") << "\n";
    status = same ? 0 : 1;
  }
  emit(o, j, t.str());
  return status;
}

int cmd_check(const Options& o) {
  CheckConfig cfg;
  cfg.field = resolve_field(o);
  cfg.coordinate = parse_coordinate(o.coordinate);
  cfg.precision = o.prec_pi;
  cfg.order = o.prec_t;
  cfg.samples = o.samples;
  cfg.seed = o.seed;
  for (const auto& n : o.checks)
    if (std::find(check_names().begin(), check_names().end(), n) == check_names().end())
      throw UsageError("unknown check '" + n + "'");
  const auto results = run_checks(cfg, o.checks);
  json j = {{"field", cfg.field->to_json()}, {"coordinate", o.coordinate}, {"precision", cfg.precision},
            {"order", cfg.order}, {"seed", cfg.seed}, {"samples", cfg.samples}};
  json arr = json::array();
  std::ostringstream t;
  bool failed = false;
  for (const auto& r : results) {
    arr.push_back(to_json(r));
    failed |= r.status == CheckStatus::Fail;
    t << status_name(r.status) << " " << r.name;
    if (!r.reason.empty()) t << " (" << r.reason << ")";
    t << "\n";
  }
  j["checks"] = arr;
  emit(o, j, t.str());
  return failed ? 1 : 0;
}

bool is_usage_kind(ErrorKind k) { return k == ErrorKind::InvalidSpec || k == ErrorKind::ParseError || k == ErrorKind::MixedSpec; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lubin-Tate formal groups, their characteristic p shadows and Frobenius lifts"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--preset", o.preset, "built-in preset or a name under $LT_FORGE_PRESET_DIR")->capture_default_str();
  app.add_option("--p", o.p, "prime of an inline field");
  app.add_option("--d", o.d, "residue degree of an inline field")->capture_default_str();
  app.add_option("--e", o.e, "ramification index of an inline field")->capture_default_str();
  app.add_option("--eisenstein", o.eisenstein, "Eisenstein coefficients, lowest first (JSON or comma list)");
  app.add_option("--unram-poly", o.unram_poly, "monic polynomial for the unramified part, lowest first");
  app.add_option("--coordinate", o.coordinate, "polynomial | special-log")->capture_default_str();
  app.add_option("--prec-pi", o.prec_pi, "pi-adic precision N")->capture_default_str();
  app.add_option("--prec-t", o.prec_t, "truncation order K")->capture_default_str();
  app.add_option("--depth", o.depth, "perfection depth M of generated inputs")->capture_default_str();
  app.add_option("--seed", o.seed, "seed for every sampled quantity")->capture_default_str();
  app.add_flag("--json", o.json, "print JSON");

  auto* group = app.add_subcommand("group", "[pi], S(X,Y) and [a] for the given a");
  group->add_option("--a", o.a_values, "integers a (repeatable)");
  auto* series = app.add_subcommand("series", "[a](T)");
  series->add_option("--a", o.a, "integer a (default 1)");
  series->add_flag("--via-exp-log", o.via_exp_log, "compute as exp(a log T)");
  app.add_subcommand("log", "the logarithm of the group");
  app.add_subcommand("exp", "its compositional inverse");
  auto* lift = app.add_subcommand("lift", "Frobenius-compatible lift of a perfectoid series");
  auto* recover = app.add_subcommand("recover", "recover a from u = [a] at depth");
  for (auto* sc : {lift, recover}) {
    sc->add_option("--input", o.input, "PerfSeries JSON file (otherwise generated from --a/--seed and --depth)");
    sc->add_option("--a", o.a, "planted integer unit for generated inputs");
  }
  auto* check = app.add_subcommand("check", "lemma checkers; all when none named");
  check->add_option("names", o.checks, "groupaxioms islocan ltder noltrace pginv valexp");
  check->add_option("--samples", o.samples, "samples per sampled check")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (o.prec_pi < 2 || o.prec_t < 4 || o.depth < 0 || o.samples < 1)
      throw UsageError("need --prec-pi >= 2, --prec-t >= 4, --depth >= 0, --samples >= 1");
    parse_coordinate(o.coordinate);
    if (check->parsed()) return cmd_check(o);
    const Field F = resolve_field(o);
    const LTModule M(F, parse_coordinate(o.coordinate), o.prec_pi);
    if (group->parsed()) return cmd_group(o, M);
    if (series->parsed()) return cmd_series(o, M);
    if (app.got_subcommand("log")) return cmd_log_exp(o, M, true);
    if (app.got_subcommand("exp")) return cmd_log_exp(o, M, false);
    if (lift->parsed()) return cmd_lift(o, M);
    if (recover->parsed()) return cmd_recover(o, M);
  } catch (const UsageError& e) {
    std::cerr << "lt: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    const json err = {{"error", std::string(error_name(e.kind()))}, {"message", e.what()}};
    if (o.json)
      std::cout << err.dump(2) << "\n";
    else
      std::cerr << "lt: " << e.what() << "\n";
    return is_usage_kind(e.kind()) ? 2 : 1;
  }
  return 2;
}
