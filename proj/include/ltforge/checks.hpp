#pragma once

// Named lemma checkers shared by the command line and the acceptance run.
// Each returns PASS / FAIL with a witness, or SKIP when its precondition does
// not hold for the field at hand.

#include <cstdint>
#include <string>
#include <vector>

#include "ltforge/frobenius_lift.hpp"

namespace ltforge {

enum class CheckStatus { Pass, Fail, Skip };

std::string status_name(CheckStatus s);

struct CheckConfig {
  Field field = nullptr;
  Coordinate coordinate = Coordinate::Polynomial;
  int precision = 8;   // N
  int order = 64;      // K
  int samples = 10;
  std::uint64_t seed = 1;
};

struct CheckOutcome {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string reason;
  nlohmann::json witness = nlohmann::json::object();
};

nlohmann::json to_json(const CheckOutcome& c);

/// Names accepted by run_checks, sorted.
const std::vector<std::string>& check_names();

/// Runs the named checks (all of them when empty) concurrently. The result is
/// sorted by name, and each check draws from its own generator seeded from
/// cfg.seed and its name, so the output does not depend on scheduling.
std::vector<CheckOutcome> run_checks(const CheckConfig& cfg, const std::vector<std::string>& names = {});

CheckOutcome run_check(const CheckConfig& cfg, const std::string& name);

}  // namespace ltforge
