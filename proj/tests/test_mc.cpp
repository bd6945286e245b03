#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "contactgas/mc.hpp"

using namespace contactgas;

TEST_CASE("gaussian normalization benchmark") {
  // int e^{-|x|^2} d^3x = pi^{3/2}
  GaussianBlockProposal prop({Vec3{}}, {1.0});
  McSpec mc;
  mc.samples = 100000;
  auto f = [](std::span<const double> x) -> std::complex<double> {
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return std::exp(-r2);
  };
  EstimateWithError est = integrate_mc(f, prop, mc, 1.0);
  const double expect = std::pow(M_PI, 1.5);
  CHECK(std::abs(est.mean.real() - expect) < 3.0 * est.stderr_re);
  CHECK(est.stderr_re / expect < 0.02);
}

TEST_CASE("radial proposal neutralizes the coulomb factor") {
  // int e^{-r}/r d^3x = 4 pi
  RadialProposal prop(3, 1.0, 1.2);
  McSpec mc;
  mc.samples = 200000;
  auto f = [](std::span<const double> x) -> std::complex<double> {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    return std::exp(-r) / r;
  };
  EstimateWithError est = integrate_mc(f, prop, mc, 1.0);
  CHECK(std::abs(est.mean.real() - 4.0 * M_PI) < 4.0 * est.stderr_re);
  CHECK(est.stderr_re < 0.05 * 4.0 * M_PI);
}

TEST_CASE("determinism and worker independence") {
  auto draw = [](RngStream& rng) -> std::complex<double> {
    const double x = rng.normal();
    return x * x;
  };
  EstimateWithError a = integrate_mc_draws(draw, 50000, 42, 1);
  EstimateWithError b = integrate_mc_draws(draw, 50000, 42, 1);
  EstimateWithError c = integrate_mc_draws(draw, 50000, 42, 4);
  CHECK(a.mean.real() == b.mean.real());  // bit identical
  CHECK(a.mean.real() == c.mean.real());  // reduction order fixed by chunk
  CHECK(a.stderr_re == c.stderr_re);
  EstimateWithError d = integrate_mc_draws(draw, 50000, 43, 1);
  CHECK(a.mean.real() != d.mean.real());
}

TEST_CASE("stderr scales like one over sqrt of budget") {
  auto draw = [](RngStream& rng) -> std::complex<double> {
    return rng.normal() * rng.normal();
  };
  std::vector<double> budgets{20000, 80000, 320000, 1280000};
  std::vector<double> errs;
  for (double n : budgets)
    errs.push_back(
        integrate_mc_draws(draw, static_cast<std::int64_t>(n), 7, 2).stderr_re);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int m = static_cast<int>(budgets.size());
  for (int i = 0; i < m; ++i) {
    const double lx = std::log(budgets[i]), ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-0.5).epsilon(0.12));
}

TEST_CASE("nonfinite guard") {
  auto draw = [](RngStream& rng) -> std::complex<double> {
    const double u = rng.uniform();
    return u < 0.01 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  CHECK_THROWS_AS(integrate_mc_draws(draw, 20000, 5, 1), std::runtime_error);
}

TEST_CASE("budget floor enforced") {
  auto draw = [](RngStream&) -> std::complex<double> { return 1.0; };
  CHECK_THROWS_AS(integrate_mc_draws(draw, 100, 5, 1), std::invalid_argument);
  McSpec mc;
  mc.samples = 10;  // clamped up by effective_samples
  CHECK(mc.effective_samples() == 1000);
}

TEST_CASE("escalation flag") {
  // high-variance integrand at a tiny base budget escalates
  auto draw = [](RngStream& rng) -> std::complex<double> {
    const double x = rng.normal();
    return std::exp(2.0 * x);
  };
  McSpec mc;
  mc.samples = 1000;
  EstimateWithError est = integrate_mc_draws_adaptive(draw, mc, 0.001);
  CHECK(est.escalated);
  CHECK(est.samples_used == 10000);
}

TEST_CASE("proposal log pdfs normalize") {
  // MC check: E_q[1/q] over a box by importance sampling equals box volume
  RngStream rng(11, 3);
  for (int variant = 0; variant < 3; ++variant) {
    std::shared_ptr<Proposal> p;
    if (variant == 0)
      p = std::make_shared<RadialProposal>(5, 1.0, 0.8);
    else if (variant == 1)
      p = std::make_shared<RadialExpProposal>(4, 1.7);
    else
      p = std::make_shared<MixtureProposal>(
          std::vector<double>{0.5, 0.5},
          std::vector<std::shared_ptr<Proposal>>{
              std::make_shared<RadialProposal>(3, 0.0, 1.0),
              std::make_shared<RadialProposal>(3, 2.0, 2.0)});
    const int d = p->dim();
    // E[exp(-|x|^2/2) / q(x)] = int exp(-|x|^2/2) = (2 pi)^{d/2}
    double acc = 0.0;
    const int n = 400000;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
      p->sample(rng, x);
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      acc += std::exp(-0.5 * r2 - p->log_pdf(x));
    }
    acc /= n;
    const double expect = std::pow(2.0 * M_PI, 0.5 * d);
    CHECK(acc == doctest::Approx(expect).epsilon(0.05));
  }
}
