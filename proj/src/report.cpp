#include "contactgas/report.hpp"

#include <sstream>

namespace contactgas {

const char* kVersion = "0.1.0";

int SuiteReport::passed() const {
  int n = 0;
  for (const auto& c : cases)
    if (c.pass) ++n;
  return n;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json j;
  j["suite_id"] = suite_id;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cases) {
    nlohmann::json e;
    e["check_id"] = c.check_id;
    e["paper_anchor"] = c.anchor;
    e["expected"] = c.expected;
    e["observed"] = c.observed;
    e["stderr"] = c.stderr_est;
    e["sigma_margin"] = c.sigma_margin;
    e["pass"] = c.pass;
    arr.push_back(std::move(e));
  }
  j["cases"] = std::move(arr);
  j["summary"] = {{"total", total()}, {"passed", passed()}, {"failed", failed()}};
  j["provenance"] = {{"seed", seed}, {"version", version}, {"timestamp", timestamp}};
  return j;
}

std::string SuiteReport::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "check_id,expected,observed,stderr,sigma_margin,pass\n";
  for (const auto& c : cases) {
    os << c.check_id << ',' << c.expected << ',' << c.observed << ','
       << c.stderr_est << ',' << c.sigma_margin << ','
       << (c.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace contactgas
