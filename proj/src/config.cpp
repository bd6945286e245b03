#include "contactgas/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace contactgas {

namespace {

using nlohmann::json;

struct TomlCursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char get() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
  }
};

json parse_value(TomlCursor& c);

json parse_array(TomlCursor& c) {
  json arr = json::array();
  c.get();  // '['
  for (;;) {
    c.skip_ws_inline();
    while (!c.eof() && (c.peek() == '\n' || c.peek() == '\r')) c.get();
    c.skip_ws_inline();
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == ']') {
      c.get();
      return arr;
    }
    arr.push_back(parse_value(c));
    c.skip_ws_inline();
    while (!c.eof() && (c.peek() == '\n' || c.peek() == '\r')) c.get();
    c.skip_ws_inline();
    if (!c.eof() && c.peek() == ',') {
      c.get();
      continue;
    }
  }
}

json parse_value(TomlCursor& c) {
  c.skip_ws_inline();
  if (c.eof()) c.fail("missing value");
  const char ch = c.peek();
  if (ch == '"') {
    c.get();
    std::string s;
    while (!c.eof() && c.peek() != '"') s += c.get();
    if (c.eof()) c.fail("unterminated string");
    c.get();
    return s;
  }
  if (ch == '[') return parse_array(c);
  std::string tok;
  while (!c.eof() && c.peek() != '\n' && c.peek() != ',' && c.peek() != ']' &&
         c.peek() != '#' && c.peek() != '\r')
    tok += c.get();
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t'))
    tok.pop_back();
  if (tok == "true") return true;
  if (tok == "false") return false;
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    if (tok.find('.') == std::string::npos &&
        tok.find('e') == std::string::npos &&
        tok.find('E') == std::string::npos) {
      long long v = std::stoll(tok, &used);
      if (used == tok.size()) return v;
    }
    double v = std::stod(tok, &used);
    if (used == tok.size()) return v;
  } catch (...) {
  }
  c.fail("cannot parse value '" + tok + "'");
}

json* descend(json& root, const std::string& dotted, TomlCursor& c) {
  json* node = &root;
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) c.fail("empty table name");
    if (node->is_array()) node = &node->back();
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return node;
}

}  // namespace

json parse_toml_lite(const std::string& text) {
  json root = json::object();
  json* current = &root;
  TomlCursor c{text};
  while (!c.eof()) {
    c.skip_ws_inline();
    if (c.eof()) break;
    const char ch = c.peek();
    if (ch == '\n' || ch == '\r') {
      c.get();
      continue;
    }
    if (ch == '#') {
      while (!c.eof() && c.peek() != '\n') c.get();
      continue;
    }
    if (ch == '[') {
      c.get();
      const bool array_table = !c.eof() && c.peek() == '[';
      if (array_table) c.get();
      std::string name;
      while (!c.eof() && c.peek() != ']') name += c.get();
      if (c.eof()) c.fail("unterminated table header");
      c.get();
      if (array_table) {
        if (c.eof() || c.get() != ']') c.fail("expected ]] in table array");
      }
      json* node = descend(root, name, c);
      if (array_table) {
        if (!node->is_array()) *node = json::array();
        node->push_back(json::object());
        current = &node->back();
      } else {
        if (node->is_null()) *node = json::object();
        current = node;
      }
      continue;
    }
    // key = value
    std::string key;
    while (!c.eof() && c.peek() != '=' && c.peek() != '\n') key += c.get();
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t'))
      key.pop_back();
    if (c.eof() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
    c.get();
    (*current)[key] = parse_value(c);
    c.skip_ws_inline();
    if (!c.eof() && c.peek() == '#')
      while (!c.eof() && c.peek() != '\n') c.get();
  }
  return root;
}

namespace {

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Config config_from_json(const nlohmann::json& doc) {
  Config cfg;
  cfg.raw = doc;
  if (doc.contains("system")) {
    const auto& s = doc["system"];
    if (s.contains("n")) cfg.system.n_particles = s["n"].get<int>();
    if (s.contains("gamma")) cfg.system.gamma = s["gamma"].get<double>();
    if (s.contains("alpha0")) cfg.system.alpha0 = s["alpha0"].get<double>();
    if (s.contains("b")) cfg.system.b = s["b"].get<double>();
    if (s.contains("lambda")) cfg.system.lambda = s["lambda"].get<double>();
    if (s.contains("theta"))
      cfg.system.theta = parse_theta(s["theta"].get<std::string>());
  }
  if (doc.contains("mc")) {
    const auto& m = doc["mc"];
    if (m.contains("samples")) cfg.mc.samples = m["samples"].get<std::int64_t>();
    if (m.contains("seed")) cfg.mc.seed = m["seed"].get<std::uint64_t>();
    if (m.contains("workers")) cfg.mc.workers = m["workers"].get<int>();
    if (m.contains("budget_scale"))
      cfg.mc.budget_scale = m["budget_scale"].get<double>();
  }
  if (doc.contains("charges")) {
    for (const auto& entry : doc["charges"]) {
      ChargeComponentSpec spec;
      for (const auto& w : entry.at("widths")) spec.widths.push_back(w.get<double>());
      if (entry.contains("shifts"))
        for (const auto& sh : entry["shifts"]) spec.shifts.push_back(vec3_from(sh));
      if (entry.contains("amplitude"))
        spec.amplitude = entry["amplitude"].get<double>();
      cfg.charge_specs.push_back(std::move(spec));
    }
  }
  if (doc.contains("suites")) {
    const auto& s = doc["suites"];
    if (s.contains("sigma_tolerance")) cfg.sigma_tol = s["sigma_tolerance"].get<double>();
    if (s.contains("rel_stderr_target")) {
      cfg.rel_stderr_target = s["rel_stderr_target"].get<double>();
      cfg.mc.target_rel = cfg.rel_stderr_target;
    }
    if (s.contains("stability_charges"))
      cfg.stability_charges_per_cell = s["stability_charges"].get<int>();
    if (s.contains("stability_n")) {
      cfg.stability_n.clear();
      for (const auto& n : s["stability_n"]) cfg.stability_n.push_back(n.get<int>());
    }
    if (s.contains("equivalence_charges"))
      cfg.equivalence_charges = s["equivalence_charges"].get<int>();
    if (s.contains("bound_charges"))
      cfg.bound_charges = s["bound_charges"].get<int>();
    if (s.contains("gamma_norm_charges"))
      cfg.gamma_norm_charges = s["gamma_norm_charges"].get<int>();
    if (s.contains("dirichlet_configs"))
      cfg.dirichlet_configs = s["dirichlet_configs"].get<long>();
  }
  // env override
  if (const char* env_seed = std::getenv("CONTACT_GAS_SEED"))
    cfg.mc.seed = std::strtoull(env_seed, nullptr, 10);
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const bool is_json = path.size() > 5 &&
                       path.compare(path.size() - 5, 5, ".json") == 0;
  try {
    if (is_json) return config_from_json(nlohmann::json::parse(text));
    return config_from_json(parse_toml_lite(text));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
}

Config default_config() {
  Config cfg;
  cfg.system.n_particles = 3;
  cfg.system.gamma = 2.0;
  cfg.system.alpha0 = 0.5;
  cfg.system.b = 1.0;
  cfg.system.lambda = 1.0;
  cfg.system.theta = ThetaProfile::exponential(1.0);
  cfg.charge_specs = {
      {{1.0, 1.0}, {}, 1.0},
      {{0.8, 1.3}, {}, 1.0},
      {{1.1, 0.7}, {{Vec3{0.4, 0.0, 0.0}, Vec3{0.0, -0.3, 0.2}}}, 1.0},
  };
  if (const char* env_seed = std::getenv("CONTACT_GAS_SEED"))
    cfg.mc.seed = std::strtoull(env_seed, nullptr, 10);
  return cfg;
}

std::vector<Charge> Config::build_charges(int n_particles) const {
  std::vector<Charge> out;
  for (const auto& spec : charge_specs) {
    ChargeComponentSpec adapted = spec;
    // pad or trim the slot lists to the requested particle number
    const int slots = n_particles - 1;
    while (static_cast<int>(adapted.widths.size()) < slots)
      adapted.widths.push_back(adapted.widths.back());
    adapted.widths.resize(slots);
    if (!adapted.shifts.empty()) {
      while (static_cast<int>(adapted.shifts.size()) < slots)
        adapted.shifts.push_back(Vec3{});
      adapted.shifts.resize(slots);
    }
    out.push_back(make_gaussian_charge(std::span{&adapted, 1}, n_particles));
  }
  return out;
}

}  // namespace contactgas
