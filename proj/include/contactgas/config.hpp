#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "contactgas/charge.hpp"
#include "contactgas/mc.hpp"
#include "contactgas/params.hpp"

namespace contactgas {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct Config {
  SystemParams system;
  McSpec mc;
  std::vector<ChargeComponentSpec> charge_specs;  // one charge per entry
  // suite knobs
  double sigma_tol = 3.0;
  double rel_stderr_target = 0.01;
  int stability_charges_per_cell = 6;
  std::vector<int> stability_n = {3, 4, 5};
  int equivalence_charges = 3;
  int bound_charges = 20;
  int gamma_norm_charges = 6;
  long dirichlet_configs = 2000;
  nlohmann::json raw;

  std::vector<Charge> build_charges(int n_particles) const;
};

// Minimal TOML reader covering sections, array-of-tables, strings, numbers,
// booleans and (nested) arrays; returns the equivalent JSON document.
nlohmann::json parse_toml_lite(const std::string& text);

Config config_from_json(const nlohmann::json& doc);
Config load_config(const std::string& path);  // dispatches on .json/.toml
Config default_config();

}  // namespace contactgas
