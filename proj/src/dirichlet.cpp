#include "contactgas/dirichlet.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "contactgas/rng.hpp"

namespace contactgas {

namespace {
void require_smooth(const WeightFunction& wf) {
  if (!wf.theta.differentiable())
    throw std::domain_error("weight function: theta not differentiable");
}

double pair_sum(const WeightFunction& wf, std::span<const Vec3> config,
                int order) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < config.size(); ++k) {
    for (std::size_t l = k + 1; l < config.size(); ++l) {
      const double r = dist(config[k], config[l]);
      if (!(r > 0.0))
        throw std::domain_error("weight function: coincident configuration");
      acc += wf.theta.eval(r, order) / r;
    }
  }
  return acc;
}
}  // namespace

double weight_phi(const WeightFunction& wf, std::span<const Vec3> config) {
  require_smooth(wf);
  return pair_sum(wf, config, 0) + wf.offset();
}

double weight_phi_laplacian(const WeightFunction& wf,
                            std::span<const Vec3> config) {
  require_smooth(wf);
  return 2.0 * pair_sum(wf, config, 2);
}

double laplacian_ratio(const WeightFunction& wf,
                       std::span<const Vec3> config) {
  return weight_phi_laplacian(wf, config) / weight_phi(wf, config);
}

double weight_phi_fd_laplacian(const WeightFunction& wf,
                               std::span<const Vec3> config, double h) {
  std::vector<Vec3> pts(config.begin(), config.end());
  const double center = weight_phi(wf, pts);
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int d = 0; d < 3; ++d) {
      double* coord = d == 0 ? &pts[i].x : (d == 1 ? &pts[i].y : &pts[i].z);
      const double saved = *coord;
      *coord = saved + h;
      const double up = weight_phi(wf, pts);
      *coord = saved - h;
      const double dn = weight_phi(wf, pts);
      *coord = saved;
      acc += (up + dn - 2.0 * center) / (h * h);
    }
  }
  return acc;
}

AlphaLimitResult alpha_limit_check(const WeightFunction& wf, const Vec3& z,
                                   std::span<const Vec3> ys,
                                   std::span<const double> r_grid,
                                   double tol) {
  require_smooth(wf);
  AlphaLimitResult out;
  out.r_grid.assign(r_grid.begin(), r_grid.end());
  const Vec3 dir{1.0, 0.0, 0.0};
  for (double r : r_grid) {
    // the singular pair contributes (theta(r) - 1)/r + 1/r; subtracting the
    // pure 1/r leaves the stable difference quotient
    double acc = wf.theta.theta_minus_one_over_r(r) + wf.offset();
    const Vec3 xp = z + 0.5 * r * dir;
    const Vec3 xm = z - 0.5 * r * dir;
    for (const Vec3& y : ys) {
      const double rp = dist(y, xp);
      const double rm = dist(y, xm);
      if (!(rp > 0.0) || !(rm > 0.0))
        throw std::domain_error("alpha_limit_check: spectator on the pair");
      acc += wf.theta.eval(rp) / rp + wf.theta.eval(rm) / rm;
    }
    for (std::size_t k = 0; k + 1 < ys.size(); ++k)
      for (std::size_t l = k + 1; l < ys.size(); ++l) {
        const double r_kl = dist(ys[k], ys[l]);
        acc += wf.theta.eval(r_kl) / r_kl;
      }
    out.estimates.push_back(acc);
  }
  const std::size_t m = out.estimates.size();
  if (m >= 2) {
    const double r1 = out.r_grid[m - 2], r2 = out.r_grid[m - 1];
    const double rho = r1 / r2;  // first-order Richardson
    out.extrapolated =
        (rho * out.estimates[m - 1] - out.estimates[m - 2]) / (rho - 1.0);
  } else {
    out.extrapolated = out.estimates.back();
  }
  SystemParams p;
  p.n_particles = static_cast<int>(ys.size()) + 2;
  p.alpha0 = wf.alpha0;
  p.gamma = 2.0;
  p.theta = wf.theta;
  out.alpha_eff_target = alpha_eff(p, z, ys);
  out.pass = std::abs(out.extrapolated - out.alpha_eff_target) <=
             tol * std::max(1.0, std::abs(out.alpha_eff_target));
  return out;
}

SechStabilityReport sech_stability_report(int n_particles, double e0,
                                          double alpha0, long sample_count,
                                          std::uint64_t seed) {
  if (alpha0 < 0.0)
    throw std::invalid_argument(
        "sech_stability_report: bound derived for alpha0 >= 0");
  if (e0 < 0.0) throw std::invalid_argument("sech_stability_report: e0 < 0");
  WeightFunction wf{ThetaProfile::sech(std::sqrt(0.5 * n_particles * e0)),
                    alpha0};
  SechStabilityReport out;
  out.bound = n_particles * e0;
  out.samples = sample_count;
  RngStream rng(seed, 0xD1);
  std::vector<Vec3> pts(static_cast<std::size_t>(n_particles));
  const double strata[4] = {1e-1, 1e-2, 1e-3, 1e-4};
  double worst = -std::numeric_limits<double>::infinity();
  for (long s = 0; s < sample_count; ++s) {
    for (auto& p : pts) p = rng.normal3(1.0);
    if (s % 4 == 3) {
      // stress the singular regime with one near-coincident pair
      const double d = strata[(s / 4) % 4];
      pts[1] = pts[0] + d * rng.unit_vector();
    }
    worst = std::max(worst, laplacian_ratio(wf, pts));
  }
  out.max_ratio = worst;
  out.pass = out.max_ratio <= out.bound * (1.0 + 1e-9) + 1e-12;
  return out;
}

SystemParams albeverio_mapping(double m, int n_particles, double lambda) {
  if (m < 0.0) throw std::invalid_argument("albeverio_mapping: m must be >= 0");
  SystemParams p;
  p.n_particles = n_particles;
  p.alpha0 = -m;
  p.gamma = 2.0;
  p.lambda = lambda;
  p.theta = ThetaProfile::exp_scaled(m);
  p.b = m > 0.0 ? 1.0 / m : std::numeric_limits<double>::infinity();
  return p;
}

double dirichlet_reg_integrand(const WeightFunction& wf, const Vec3& x,
                               std::span<const Vec3> others) {
  double acc = wf.alpha0;
  for (const Vec3& y : others) {
    const double r = dist(x, y);
    acc += 2.0 * wf.theta.eval(r) / r;
  }
  for (std::size_t k = 0; k + 1 < others.size(); ++k)
    for (std::size_t l = k + 1; l < others.size(); ++l) {
      const double r = dist(others[k], others[l]);
      acc += wf.theta.eval(r) / r;
    }
  return acc;
}

DirichletRegCrosscheck dirichlet_reg_crosscheck(const WeightFunction& wf,
                                                const Charge& charge,
                                                const SystemParams& params,
                                                const McSpec& mc) {
  if (params.gamma != 2.0)
    throw std::invalid_argument("dirichlet_reg_crosscheck: requires gamma = 2");
  DirichletRegCrosscheck out;
  const int slots = charge.slots();
  PositionDensitySampler sampler(charge);
  auto draw = [&](RngStream& rng) -> std::complex<double> {
    thread_local std::vector<Vec3> xs;
    xs.resize(static_cast<std::size_t>(slots));
    const std::complex<double> w = sampler.sample(rng, xs);
    return w * dirichlet_reg_integrand(
                   wf, xs[0], std::span<const Vec3>(xs).subspan(1));
  };
  out.dirichlet_reg_term = integrate_mc_draws_adaptive(draw, mc);

  RegParts reg = phi_reg(charge, params, mc.with_seed_offset(0x5EC));
  out.phi_reg_total = reg.reg2.value + reg.reg3.mean.real() +
                      reg.reg4.mean.real();
  out.phi_reg_error = std::sqrt(reg.reg3.stderr_re * reg.reg3.stderr_re +
                                reg.reg4.stderr_re * reg.reg4.stderr_re);
  const double combined =
      std::sqrt(out.phi_reg_error * out.phi_reg_error +
                out.dirichlet_reg_term.stderr_re * out.dirichlet_reg_term.stderr_re);
  out.sigma = std::abs(out.dirichlet_reg_term.mean.real() - out.phi_reg_total) /
              std::max(combined, 1e-300);
  out.pass = out.sigma <= 3.0;
  return out;
}

}  // namespace contactgas
