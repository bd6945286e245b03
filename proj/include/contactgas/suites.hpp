#pragma once

#include <optional>
#include <string>

#include "contactgas/config.hpp"
#include "contactgas/report.hpp"

namespace contactgas {

enum class SuiteId { constants, kernel, forms, stability, gamma, dirichlet, all };

std::optional<SuiteId> parse_suite(const std::string& name);
const char* suite_name(SuiteId id);

// Runs the named verification suite.  Throws std::invalid_argument for
// preconditions the configuration violates (e.g. the stability suite below
// the critical coupling).
SuiteReport run_suite(const Config& cfg, SuiteId id);

// Deterministic random charge used by the suites (symmetrized, optional
// momentum shifts).
Charge random_suite_charge(RngStream& rng, int n_particles, bool with_shifts);

}  // namespace contactgas
