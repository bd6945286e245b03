#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace contactgas {

struct CaseResult {
  std::string check_id;
  std::string anchor;  // emitted under the fixed key "paper_anchor"
  double expected = 0.0;
  double observed = 0.0;
  double stderr_est = 0.0;
  double sigma_margin = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite_id;
  std::vector<CaseResult> cases;
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;  // empty unless stamping was requested

  int total() const { return static_cast<int>(cases.size()); }
  int passed() const;
  int failed() const { return total() - passed(); }
  bool all_pass() const { return failed() == 0; }

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

extern const char* kVersion;

}  // namespace contactgas
