#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace tfm {

struct SuiteOptions {
  unsigned workers = 0;            // 0: default_workers()
  std::size_t mechanisms = 500;    // random tabulated mechanisms for the reduction battery
  std::uint64_t seed = 20240611;
  std::size_t random_circuits = 200;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  nlohmann::json details;
  double seconds = 0;
};

/// Criteria reports free of timing, so reruns can be compared byte for byte.
nlohmann::json salsa_example_report();
nlohmann::json reduction_battery_report(const SuiteOptions& opts);
nlohmann::json single_item_report(const SuiteOptions& opts);
nlohmann::json posted_price_report(const SuiteOptions& opts);
nlohmann::json second_price_report(const SuiteOptions& opts);
nlohmann::json lemma_checks_report();
nlohmann::json tautology_roundtrip_report(const SuiteOptions& opts);

std::string criterion_name(int id);

/// Runs the selected criteria (1..9; empty = all) in order. Reports shared
/// between criteria are computed once.
std::vector<CriterionResult> run_suite(const SuiteOptions& opts, const std::vector<int>& ids = {});

nlohmann::json suite_to_json(const std::vector<CriterionResult>& results, bool timing);
std::string suite_to_csv(const std::vector<CriterionResult>& results, bool timing);

}  // namespace tfm
