// Command-line front end: closed-form constants, kernel/identity checks,
// charge-form evaluation and the verification suites.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "contactgas/config.hpp"
#include "contactgas/dirichlet.hpp"
#include "contactgas/forms.hpp"
#include "contactgas/suites.hpp"

namespace {

using namespace contactgas;

struct GlobalOpts {
  std::string config_path;
  std::string out_path;
  std::string csv_path;
  bool stamp = false;
  std::int64_t seed = -1;
  int workers = 0;
  double budget_scale = 0.0;
};

Config make_config(const GlobalOpts& g) {
  Config cfg = g.config_path.empty() ? default_config()
                                     : load_config(g.config_path);
  if (g.seed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(g.seed);
  if (g.workers > 0) cfg.mc.workers = g.workers;
  if (g.budget_scale > 0.0) cfg.mc.budget_scale = g.budget_scale;
  return cfg;
}

void emit(const GlobalOpts& g, SuiteReport& rep) {
  if (g.stamp) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    rep.timestamp = buf;
  }
  const nlohmann::json j = rep.to_json();
  if (!g.out_path.empty()) {
    std::ofstream out(g.out_path);
    out << j.dump(2) << '\n';
  }
  if (!g.csv_path.empty()) {
    std::ofstream csv(g.csv_path);
    csv << rep.to_csv();
  }
  std::cout << "suite " << rep.suite_id << ": " << rep.passed() << "/"
            << rep.total() << " checks passed";
  if (rep.failed() > 0) std::cout << " (" << rep.failed() << " FAILED)";
  std::cout << std::endl;
  if (g.out_path.empty() && g.csv_path.empty() && rep.failed() > 0) {
    for (const auto& c : rep.cases)
      if (!c.pass)
        std::cout << "  FAIL " << c.check_id << " expected=" << c.expected
                  << " observed=" << c.observed << std::endl;
  }
}

int run_and_emit(const GlobalOpts& g, const Config& cfg, SuiteId id) {
  SuiteReport rep = run_suite(cfg, id);
  emit(g, rep);
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable N-boson contact-interaction quadratic forms: "
               "kernels, charge forms, stability bounds and checks"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOpts g;
  app.add_option("--config", g.config_path, "TOML or JSON configuration file");
  app.add_option("--out", g.out_path, "write the JSON report here");
  app.add_option("--csv", g.csv_path, "write the CSV report here");
  app.add_option("--seed", g.seed, "override the master seed");
  app.add_option("--workers", g.workers, "worker threads for MC");
  app.add_option("--budget-scale", g.budget_scale, "scale all MC budgets");
  app.add_flag("--stamp", g.stamp, "embed a wall-clock timestamp in reports");

  // constants
  auto* c_cmd = app.add_subcommand(
      "constants", "closed-form stability constants for given parameters");
  int c_n = 3;
  double c_gamma = 2.0, c_alpha0 = 0.0, c_b = 1.0, c_lambda = 1.0;
  std::string c_theta = "exp:1.0";
  c_cmd->add_option("--n", c_n, "particle number N >= 3");
  c_cmd->add_option("--gamma", c_gamma, "coupling");
  c_cmd->add_option("--alpha0", c_alpha0, "inverse scattering length");
  c_cmd->add_option("--b", c_b, "repulsion length scale");
  c_cmd->add_option("--lambda", c_lambda, "spectral shift");
  c_cmd->add_option("--theta", c_theta, "profile kind:param");

  auto* k_cmd = app.add_subcommand("kernel-check",
                                   "Bessel, resolvent-kernel and transform identities");
  auto* f_cmd = app.add_subcommand("form-eval",
                                   "evaluate the charge forms for configured charges");
  auto* v_cmd = app.add_subcommand("verify-stability",
                                   "coercivity lower bound on configured charges");
  auto* g_cmd = app.add_subcommand("gamma-check", "operator actions and norm bounds");
  auto* d_cmd = app.add_subcommand("dirichlet-check",
                                   "weight-function stability report");
  int d_n = 3;
  double d_e0 = 1.0, d_alpha0 = 0.0;
  long d_samples = 10000;
  std::string d_profile;
  d_cmd->add_option("--n", d_n, "particle number");
  d_cmd->add_option("--e0", d_e0, "per-particle energy scale");
  d_cmd->add_option("--alpha0", d_alpha0, "additive constant (>= 0)");
  d_cmd->add_option("--samples", d_samples, "random configurations");
  d_cmd->add_option("--profile", d_profile,
                    "optional profile kind:param for a ratio report");

  auto* s_cmd = app.add_subcommand("suite", "run a named verification suite");
  std::string suite_arg = "all";
  s_cmd->add_option("name", suite_arg,
                    "constants|kernel|forms|stability|gamma|dirichlet|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << std::endl;
    return 2;
  }

  try {
    Config cfg = make_config(g);
    if (*c_cmd) {
      SystemParams p;
      p.n_particles = c_n;
      p.gamma = c_gamma;
      p.alpha0 = c_alpha0;
      p.b = c_b;
      p.lambda = c_lambda;
      p.theta = parse_theta(c_theta);
      const StabilityConstants sc = compute_constants(p);
      nlohmann::json j{{"gamma_c", sc.gamma_c},
                       {"lambda_cap", sc.lambda_cap},
                       {"lambda0", sc.lambda0},
                       {"lambda0_star", sc.lambda0_star},
                       {"spectral_lower_bound", sc.spectral_lower_bound}};
      std::cout << j.dump(2) << std::endl;
      if (!sc.coercivity_guaranteed)
        std::cerr << "warning: gamma <= gamma_c, no coercivity guarantee"
                  << std::endl;
      return 0;
    }
    if (*k_cmd) return run_and_emit(g, cfg, SuiteId::kernel);
    if (*g_cmd) return run_and_emit(g, cfg, SuiteId::gamma);
    if (*f_cmd) {
      const auto charges = cfg.build_charges(cfg.system.n_particles);
      std::ostringstream csv;
      csv.precision(12);
      csv << "charge,diag,off0,off0_err,off1,off1_err,reg2,reg3,reg3_err,"
             "reg4,reg4_err,total,total_err\n";
      for (std::size_t i = 0; i < charges.size(); ++i) {
        FormBreakdown fb = phi_total(charges[i], cfg.system,
                                     cfg.mc.with_seed_offset(i));
        csv << i << ',' << fb.diag.value << ',' << fb.off0.value << ','
            << fb.off0.error << ',' << fb.off1.value << ',' << fb.off1.error
            << ',' << fb.reg2.value << ',' << fb.reg3.value << ','
            << fb.reg3.error << ',' << fb.reg4.value << ',' << fb.reg4.error
            << ',' << fb.total.value << ',' << fb.total.error << '\n';
      }
      if (!g.csv_path.empty()) {
        std::ofstream out(g.csv_path);
        out << csv.str();
      } else {
        std::cout << csv.str();
      }
      return 0;
    }
    if (*v_cmd) {
      const auto charges = cfg.build_charges(cfg.system.n_particles);
      LowerBoundReport lb = verify_lower_bound(charges, cfg.system, cfg.mc);
      nlohmann::json cases = nlohmann::json::array();
      for (const auto& c : lb.cases)
        cases.push_back({{"total", c.breakdown.total.value},
                         {"total_err", c.breakdown.total.error},
                         {"bound", c.bound_norm},
                         {"margin_sigma", c.margin_sigma},
                         {"pass", c.pass}});
      nlohmann::json j{{"cases", cases},
                       {"violations", lb.violations},
                       {"worst_margin_sigma", lb.worst_margin_sigma}};
      if (!g.out_path.empty()) {
        std::ofstream out(g.out_path);
        out << j.dump(2) << '\n';
      } else {
        std::cout << j.dump(2) << std::endl;
      }
      return lb.violations == 0 ? 0 : 1;
    }
    if (*d_cmd) {
      SechStabilityReport sr =
          sech_stability_report(d_n, d_e0, d_alpha0, d_samples, cfg.mc.seed);
      nlohmann::json j{{"n", d_n},
                       {"e0", d_e0},
                       {"alpha0", d_alpha0},
                       {"samples", sr.samples},
                       {"max_ratio", sr.max_ratio},
                       {"bound", sr.bound},
                       {"pass", sr.pass}};
      if (!d_profile.empty()) {
        WeightFunction wf{parse_theta(d_profile), d_alpha0};
        RngStream rng(cfg.mc.seed, 0xCAFE);
        double worst = -1e300;
        std::vector<Vec3> pts(static_cast<std::size_t>(d_n));
        for (long s = 0; s < d_samples; ++s) {
          for (auto& p : pts) p = rng.normal3(1.0);
          worst = std::max(worst, laplacian_ratio(wf, pts));
        }
        j["profile_max_ratio"] = worst;
      }
      if (!g.out_path.empty()) {
        std::ofstream out(g.out_path);
        out << j.dump(2) << '\n';
      } else {
        std::cout << j.dump(2) << std::endl;
      }
      return sr.pass ? 0 : 1;
    }
    if (*s_cmd) {
      const auto id = parse_suite(suite_arg);
      if (!id) {
        std::cerr << "unknown suite: " << suite_arg << std::endl;
        return 2;
      }
      return run_and_emit(g, cfg, *id);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 2;
}
