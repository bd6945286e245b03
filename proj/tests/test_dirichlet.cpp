#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "contactgas/dirichlet.hpp"

using namespace contactgas;

TEST_CASE("weight function values and symmetry") {
  WeightFunction wf{ThetaProfile::exp_scaled(0.9), -0.9};
  // theta = e^{-m r}, alpha0 = -m: offset cancels and phi is the bare pair sum
  std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 2, 0}};
  double expect = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double r = dist(pts[i], pts[j]);
      expect += std::exp(-0.9 * r) / r;
    }
  CHECK(weight_phi(wf, pts) == doctest::Approx(expect).epsilon(1e-13));

  std::swap(pts[0], pts[2]);
  CHECK(weight_phi(wf, pts) == doctest::Approx(expect).epsilon(1e-13));
  for (auto& x : pts) x += Vec3{0.4, -0.1, 2.0};
  CHECK(weight_phi(wf, pts) == doctest::Approx(expect).epsilon(1e-12));

  std::vector<Vec3> bad{{0, 0, 0}, {0, 0, 0}, {1, 1, 1}};
  CHECK_THROWS_AS(weight_phi(wf, bad), std::domain_error);
  WeightFunction ball{ThetaProfile::ball_indicator(1.0), 0.0};
  CHECK_THROWS_AS(weight_phi(ball, pts), std::domain_error);
}

TEST_CASE("laplacian closed form against central differences") {
  RngStream rng(21, 0);
  WeightFunction wf{ThetaProfile::sech(1.2), 0.5};
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<Vec3> pts{rng.normal3(1.0), rng.normal3(1.0), rng.normal3(1.0),
                          rng.normal3(1.0)};
    const double closed = weight_phi_laplacian(wf, pts);
    const double fd = weight_phi_fd_laplacian(wf, pts, 1e-4);
    CHECK(fd == doctest::Approx(closed).epsilon(1e-5));
  }
}

TEST_CASE("exponential weight eigenrelation") {
  const double m = 1.1;
  WeightFunction wf{ThetaProfile::exp_scaled(m), -m};
  RngStream rng(22, 0);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<Vec3> pts{rng.normal3(1.0), rng.normal3(1.0), rng.normal3(1.0)};
    const double lhs = weight_phi_laplacian(wf, pts);
    const double rhs = 2.0 * m * m * weight_phi(wf, pts);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    // the generic decomposition with arbitrary alpha0
    WeightFunction wf2{ThetaProfile::exp_scaled(m), 0.7};
    const double lhs2 = weight_phi_laplacian(wf2, pts);
    const double rhs2 =
        2.0 * m * m * (weight_phi(wf2, pts) - wf2.offset());
    CHECK(lhs2 == doctest::Approx(rhs2).epsilon(1e-8));
  }
}

TEST_CASE("sech stability report") {
  SechStabilityReport r = sech_stability_report(3, 1.0, 0.0, 3000, 7);
  CHECK(r.pass);
  CHECK(r.max_ratio <= 3.0 * (1.0 + 1e-9));
  SechStabilityReport r2 = sech_stability_report(5, 0.7, 1.0, 3000, 8);
  CHECK(r2.pass);
  CHECK(r2.bound == doctest::Approx(3.5));
  SechStabilityReport r0 = sech_stability_report(4, 0.0, 0.3, 100, 9);
  CHECK(r0.max_ratio == doctest::Approx(0.0));
  CHECK_THROWS_AS(sech_stability_report(3, 1.0, -0.2, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("alpha limit recovers the boundary coefficient") {
  WeightFunction wf{ThetaProfile::exp_scaled(1.3), -0.4};
  const Vec3 z{0.1, 0.0, 0.2};
  std::vector<Vec3> ys{z + Vec3{1.7, 0.0, 0.0}, z + Vec3{0.0, -1.1, 0.6}};
  std::vector<double> grid{1e-2, 1e-3, 1e-4, 1e-5};
  AlphaLimitResult r = alpha_limit_check(wf, z, ys, grid);
  CHECK(r.pass);
  CHECK(r.extrapolated ==
        doctest::Approx(r.alpha_eff_target)
            .epsilon(1e-4 / std::max(1.0, std::abs(r.alpha_eff_target))));
  // bare pair: the limit is alpha0
  std::vector<Vec3> none;
  AlphaLimitResult r0 = alpha_limit_check(wf, z, none, grid);
  CHECK(r0.extrapolated == doctest::Approx(wf.alpha0).epsilon(1e-8));
  // sech profile has theta'(0) = 0 so the offset is alpha0 itself
  WeightFunction ws{ThetaProfile::sech(1.0), 0.8};
  AlphaLimitResult rs = alpha_limit_check(ws, z, ys, grid);
  CHECK(rs.pass);
}

TEST_CASE("parameter mapping") {
  SystemParams p = albeverio_mapping(1.0, 3);
  CHECK(p.alpha0 == -1.0);
  CHECK(p.gamma == 2.0);
  CHECK(p.theta.eval(0.7) == doctest::Approx(std::exp(-0.7)).epsilon(1e-14));
  CHECK(p.b == doctest::Approx(1.0));
  for (int n = 3; n <= 8; ++n)
    CHECK(2.0 > critical_gamma(n));

  SystemParams p0 = albeverio_mapping(0.0, 4);
  CHECK(compute_constants(p0).spectral_lower_bound == 0.0);
  CHECK(p0.theta.eval(3.0) == 1.0);  // the trivial profile
  CHECK_THROWS_AS(albeverio_mapping(-0.5), std::invalid_argument);
}

TEST_CASE("regularizer integrand identity") {
  WeightFunction wf{ThetaProfile::exp_scaled(0.8), 0.25};
  SystemParams p;
  p.n_particles = 5;
  p.gamma = 2.0;
  p.alpha0 = wf.alpha0;
  p.theta = wf.theta;
  RngStream rng(23, 0);
  for (int i = 0; i < 50; ++i) {
    const Vec3 x = rng.normal3(1.0);
    std::vector<Vec3> others{rng.normal3(1.0), rng.normal3(1.0),
                             rng.normal3(1.0)};
    CHECK(dirichlet_reg_integrand(wf, x, others) ==
          doctest::Approx(alpha_eff(p, x, others)).epsilon(1e-12));
  }
}

TEST_CASE("dirichlet regularizer crosscheck") {
  WeightFunction wf{ThetaProfile::exp_scaled(0.8), 0.25};
  McSpec mc;
  mc.samples = 150000;
  mc.workers = 2;
  for (int n : {3, 5}) {
    SystemParams p;
    p.n_particles = n;
    p.gamma = 2.0;
    p.alpha0 = wf.alpha0;
    p.theta = wf.theta;
    p.b = 1.0 / 0.8;
    ChargeComponentSpec spec;
    spec.widths.assign(n - 1, 1.0);
    spec.widths.back() = 0.8;
    Charge xi = make_gaussian_charge(std::span{&spec, 1}, n);
    DirichletRegCrosscheck cc = dirichlet_reg_crosscheck(wf, xi, p, mc);
    CHECK(cc.pass);
  }
  // gamma != 2 rejected
  SystemParams p3;
  p3.n_particles = 3;
  p3.gamma = 1.9;
  ChargeComponentSpec spec{{1.0, 1.0}, {}, 1.0};
  Charge xi = make_gaussian_charge(std::span{&spec, 1}, 3);
  CHECK_THROWS_AS(dirichlet_reg_crosscheck(wf, xi, p3, mc),
                  std::invalid_argument);
}
