#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace semipos::verify {

enum class Tier { smoke, full };
Tier tier_from_string(const std::string& name);
std::string to_string(Tier tier);

/// One acceptance check. `numbers` holds every value the verdict was
/// derived from, so the report can be audited without rerunning.
struct CheckResult {
  std::string id;
  std::string title;
  bool passed = false;
  /// The check raised instead of reaching a verdict.
  bool errored = false;
  std::string detail;
  nlohmann::ordered_json numbers = nlohmann::ordered_json::object();
  double seconds = 0.0;
};

struct SuiteOptions {
  Tier tier = Tier::smoke;
  std::uint64_t seed = 20240611;
  bool fail_fast = false;
  /// Overrides of the named tolerances; unknown names are rejected.
  std::map<std::string, double> tolerances;
  /// Restrict to these check ids (empty: all checks of the tier).
  std::vector<std::string> only;
};

/// Default tolerances by name, e.g. "c1.norm_rel" → 1e-9.
const std::map<std::string, double>& default_tolerances();

/// Check ids of a tier, in run order.
std::vector<std::string> check_ids(Tier tier);

/// Runs the checks of the tier in order. `progress` is called after each
/// check. With fail_fast the run stops at the first failure.
std::vector<CheckResult> run_suite(const SuiteOptions& options,
                                   const std::function<void(const CheckResult&)>& progress = {});

/// The numerical part of a report: ids, verdicts and numbers, no timings.
nlohmann::ordered_json numbers_only(const std::vector<CheckResult>& results);

}  // namespace semipos::verify
