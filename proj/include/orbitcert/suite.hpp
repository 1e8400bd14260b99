#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "orbitcert/generate.hpp"
#include "orbitcert/search.hpp"

namespace orbitcert {

struct SuiteConfig {
  std::vector<int> dims{1, 2, 3, 4, 5, 6};
  std::vector<double> p_grid{2.5, 3.0, 4.0, 10.0};
  std::vector<double> q_grid{0.5, 1.0, 1.5};
  int trials = 20;
  uint64_t master_seed = 42;
  bool include_timestamp = true;
  SearchConfig search;
};

struct SuiteReport {
  std::string suite;
  SuiteConfig config;
  nlohmann::json cases = nlohmann::json::array();
  int total = 0;
  int passed = 0;
  int failed = 0;
  int not_converged = 0;
  int scalar_disagreements = 0;
  std::map<std::string, int> op_counts;
  double wall_time_seconds = 0.0;
};

nlohmann::json suite_report_to_json(const SuiteReport& r);

// Valid names: identities, trace, majorization, eigenvalue, certificates,
// search, all.
SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg);

bool suite_name_valid(const std::string& name);

}  // namespace orbitcert
