#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "contactgas/green.hpp"

using namespace contactgas;

TEST_CASE("kernel golden value and symmetry") {
  // (2 pi)^{-9/2} K_{7/2}(1): independent arbitrary-precision reference
  CHECK(green_kernel_dist(1.0, 1.0, 3) ==
        doctest::Approx(0.0043667444110119068).epsilon(1e-11));
  std::vector<Vec3> x{{0.1, 0.2, 0.3}, {1.0, -0.4, 0.0}, {0.0, 0.7, -0.2}};
  std::vector<Vec3> y{{0.5, 0.1, 0.0}, {0.2, 0.2, 0.9}, {-0.3, 0.0, 0.1}};
  CHECK(green_kernel(2.0, x, y) == green_kernel(2.0, y, x));
  CHECK_THROWS_AS(green_kernel(1.0, x, x), std::domain_error);
}

TEST_CASE("kernel monotonicity and scaling") {
  double prev = 1e300;
  for (double d : {0.2, 0.5, 1.0, 2.0, 5.0}) {
    const double g = green_kernel_dist(1.0, d, 4);
    CHECK(g > 0.0);
    CHECK(g < prev);
    prev = g;
  }
  prev = 1e300;
  for (double lam : {0.5, 1.0, 3.0}) {
    const double g = green_kernel_dist(lam, 0.7, 4);
    CHECK(g < prev);
    prev = g;
  }
  // G^{lambda/s^2}(s d) = s^{-(3N-2)} G^lambda(d)
  for (int n : {3, 4, 6}) {
    const double s = 2.0, lam = 1.3, d = 0.9;
    CHECK(green_kernel_dist(lam / (s * s), s * d, n) ==
          doctest::Approx(std::pow(s, -(3.0 * n - 2.0)) *
                          green_kernel_dist(lam, d, n))
              .epsilon(1e-12));
  }
}

TEST_CASE("contracted kernel closed form") {
  std::vector<Vec3> none;
  const Vec3 xi{0.5, 0, 0}, xj{-0.5, 0, 0};
  const auto v = green_contracted(2.0, xi, xj, Vec3{}, none, none);
  CHECK(v.real() == doctest::Approx(std::exp(-1.0) / (8.0 * M_PI)).epsilon(1e-14));
  CHECK(v.imag() == 0.0);
  CHECK_THROWS_AS(green_contracted(1.0, xi, xi, Vec3{}, none, none),
                  std::domain_error);
  // modulus independent of the phase positions
  const Vec3 q{0.3, 0.1, -0.2};
  std::vector<Vec3> Q{Vec3{0.2, 0.0, 0.4}};
  std::vector<Vec3> X1{Vec3{3.0, 1.0, 0.0}}, X2{Vec3{-2.0, 5.0, 1.0}};
  CHECK(std::abs(green_contracted(1.0, xi, xj, q, Q, X1)) ==
        doctest::Approx(std::abs(green_contracted(1.0, xi, xj, q, Q, X2)))
            .epsilon(1e-14));
}

TEST_CASE("contracted kernel against the integral") {
  const Vec3 a{0.35, 0, 0}, b{-0.35, 0, 0};
  std::vector<Vec3> spectators{Vec3{0.5, -0.2, 0.1}};
  std::vector<Vec3> phases{Vec3{}};
  McSpec mc;
  mc.samples = 300000;
  mc.workers = 2;
  EstimateWithError est =
      green_contracted_mc(1.0, 3, a, b, Vec3{}, phases, spectators, mc);
  const double closed =
      green_contracted(1.0, a, b, Vec3{}, phases, spectators).real();
  CHECK(std::abs(est.mean.real() - closed) < 3.0 * est.stderr_re);
  CHECK(est.stderr_re < 0.01 * std::abs(closed));
  // spectator-count contract
  std::vector<Vec3> none;
  CHECK_THROWS_AS(green_contracted_mc(1.0, 3, a, b, Vec3{}, none, none, mc),
                  std::invalid_argument);
}

TEST_CASE("potential fourier form") {
  ChargeComponentSpec spec{{1.0, 1.0}, {}, 1.0};
  Charge xi = make_gaussian_charge(std::span{&spec, 1}, 3);
  SystemParams p;
  p.n_particles = 3;
  p.lambda = 1.0;
  std::vector<Vec3> momenta{{0.3, 0, 0}, {0.1, 0.2, 0}, {0, 0, -0.4}};
  const auto v1 = potential_fourier(xi, p, momenta, {0, 1});
  // symmetric under exchanging the pair momenta
  std::swap(momenta[0], momenta[1]);
  const auto v2 = potential_fourier(xi, p, momenta, {0, 1});
  CHECK(v1.real() == doctest::Approx(v2.real()).epsilon(1e-14));
  // large lambda suppression
  SystemParams pl = p;
  pl.lambda = 1e8;
  const auto v3 = potential_fourier(xi, pl, momenta, {0, 1});
  CHECK(std::abs(v3) < 1e-6 * std::abs(v1));
}

TEST_CASE("position potential near-diagonal asymptotics") {
  ChargeComponentSpec spec{{1.0, 1.0}, {}, 1.0};
  Charge xi = make_gaussian_charge(std::span{&spec, 1}, 3);
  SystemParams p;
  p.n_particles = 3;
  p.lambda = 1.0;
  McSpec mc;
  mc.samples = 300000;
  mc.workers = 2;
  const Vec3 x{0.2, 0.1, 0.0};
  const Vec3 spectator{0.8, -0.3, 0.4};
  std::vector<Vec3> charge_args{x, spectator};
  const double target = xi.position(charge_args).real();
  double prev_gap = 1e300;
  int step = 0;
  for (double r : {1e-1, 1e-2, 1e-3}) {
    std::vector<Vec3> config{x + Vec3{0.5 * r, 0, 0}, x - Vec3{0.5 * r, 0, 0},
                             spectator};
    EstimateWithError est =
        potential_position(xi, p, config, {0, 1}, mc.with_seed_offset(step++));
    const double scaled = r * est.mean.real();
    const double gap = std::abs(scaled - target);
    CHECK(gap < prev_gap + 3.0 * r * est.stderr_re + 0.05 * target);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.02 * std::abs(target));
}

TEST_CASE("position potential linearity") {
  ChargeComponentSpec s1{{1.0, 1.0}, {}, 1.0};
  ChargeComponentSpec s2{{0.8, 1.2}, {}, 1.0};
  Charge a = make_gaussian_charge(std::span{&s1, 1}, 3);
  Charge b = make_gaussian_charge(std::span{&s2, 1}, 3);
  std::vector<ChargeComponentSpec> both{s1, s2};
  Charge ab = make_gaussian_charge(both, 3);
  SystemParams p;
  p.n_particles = 3;
  p.lambda = 1.5;
  McSpec mc;
  mc.samples = 120000;
  std::vector<Vec3> config{{0.4, 0, 0}, {-0.2, 0.1, 0}, {0.0, 0.9, -0.3}};
  const auto ea = potential_position(a, p, config, {0, 1}, mc);
  const auto eb = potential_position(b, p, config, {0, 1}, mc);
  const auto es = potential_position(ab, p, config, {0, 1}, mc);
  const double err = std::sqrt(ea.stderr_re * ea.stderr_re +
                               eb.stderr_re * eb.stderr_re +
                               es.stderr_re * es.stderr_re);
  CHECK(std::abs(es.mean.real() - ea.mean.real() - eb.mean.real()) <
        3.5 * err);
  CHECK_THROWS_AS(
      potential_position(a, p,
                         std::vector<Vec3>{{0.1, 0, 0}, {0.1, 0, 0}, {1, 1, 1}},
                         {0, 1}, mc),
      std::domain_error);
}

TEST_CASE("distributional equation of the potential") {
  // <(-Delta + lambda) phi, G_sigma xi> = 8 pi <phi|_pi, xi> for a Gaussian
  // phi on R^9; the left side by momentum MC through the transform of the
  // potential, the right side in closed form
  ChargeComponentSpec spec{{1.0, 0.8}, {}, 1.0};
  Charge xi = make_gaussian_charge(std::span{&spec, 1}, 3);
  SystemParams p;
  p.n_particles = 3;
  p.lambda = 1.4;
  const double W = 1.3, w0 = 1.0, w1 = 0.8;

  const double rhs_closed =
      8.0 * M_PI *
      std::pow(M_PI / (1.0 / (W * W) + 0.5 / (w0 * w0)), 1.5) *
      std::pow(2.0 * M_PI * W * W * w1 * w1 / (W * W + w1 * w1), 1.5);

  GaussianBlockProposal prop({Vec3{}, Vec3{}, Vec3{}},
                             {1.3 / W, 1.3 / W, 1.3 / W});
  McSpec mc;
  mc.samples = 200000;
  mc.workers = 2;
  auto f = [&](std::span<const double> x) -> std::complex<double> {
    std::vector<Vec3> momenta{Vec3{x[0], x[1], x[2]}, Vec3{x[3], x[4], x[5]},
                              Vec3{x[6], x[7], x[8]}};
    double psq = 0.0;
    for (const auto& q : momenta) psq += q.norm_sq();
    const double phi_hat = std::pow(W, 9.0) * std::exp(-0.5 * W * W * psq);
    return (psq + p.lambda) * phi_hat *
           potential_fourier(xi, p, momenta, {0, 1});
  };
  EstimateWithError lhs = integrate_mc(f, prop, mc);
  CHECK(std::abs(lhs.mean.real() - rhs_closed) < 3.0 * lhs.stderr_re);
  CHECK(lhs.stderr_re < 0.01 * rhs_closed);
}

TEST_CASE("plancherel pairing of the potential") {
  // <f, G_sigma xi> in momentum space vs the position-space double integral
  ChargeComponentSpec spec{{1.0, 0.8}, {}, 1.0};
  Charge xi = make_gaussian_charge(std::span{&spec, 1}, 3);
  SystemParams p;
  p.n_particles = 3;
  p.lambda = 1.0;
  const double W = 1.2;  // pairing Gaussian width
  McSpec mc;
  mc.samples = 300000;
  mc.workers = 2;

  // momentum side: int conj(f_hat) sqrt(8/pi) xi_hat(p0+p1, p2)/(p^2+lambda)
  GaussianBlockProposal mom_prop({Vec3{}, Vec3{}, Vec3{}},
                                 {1.3 / W, 1.3 / W, 1.3 / W});
  auto f_mom = [&](std::span<const double> x) -> std::complex<double> {
    std::vector<Vec3> momenta{Vec3{x[0], x[1], x[2]}, Vec3{x[3], x[4], x[5]},
                              Vec3{x[6], x[7], x[8]}};
    double psq = 0.0;
    for (const auto& q : momenta) psq += q.norm_sq();
    const double f_hat = std::pow(W, 9.0) * std::exp(-0.5 * W * W * psq);
    return f_hat * potential_fourier(xi, p, momenta, {0, 1});
  };
  EstimateWithError mom = integrate_mc(f_mom, mom_prop, mc);

  // position side: 8 pi int conj f(x1,x2,x3) xi(y,Y) G(x1,x2,x3; y,y,Y);
  // variables (x1, x2, x3) from the f envelope, then zeta = (y - mid, Y - x3)
  // with the kernel-neutralizing radial mixture
  std::vector<std::shared_ptr<Proposal>> parts;
  parts.push_back(std::make_shared<GaussianBlockProposal>(
      std::vector<Vec3>{Vec3{}, Vec3{}, Vec3{}},
      std::vector<double>{1.2 * W, 1.2 * W, 1.2 * W}));
  parts.push_back(std::make_shared<MixtureProposal>(
      std::vector<double>{0.6, 0.4},
      std::vector<std::shared_ptr<Proposal>>{
          std::make_shared<RadialProposal>(6, 1.0, 1.3),
          std::make_shared<RadialProposal>(6, 1.0, 3.0)}));
  ProductProposal pos_prop(std::move(parts));
  auto f_pos = [&](std::span<const double> v) -> std::complex<double> {
    const Vec3 x1{v[0], v[1], v[2]}, x2{v[3], v[4], v[5]}, x3{v[6], v[7], v[8]};
    const Vec3 mid = 0.5 * (x1 + x2);
    const Vec3 y = mid + Vec3{v[9], v[10], v[11]};
    const Vec3 Y = x3 + Vec3{v[12], v[13], v[14]};
    const double dsq =
        (x1 - y).norm_sq() + (x2 - y).norm_sq() + (x3 - Y).norm_sq();
    if (!(dsq > 0.0)) return {0.0, 0.0};
    const double fv = std::exp(
        -0.5 * (x1.norm_sq() + x2.norm_sq() + x3.norm_sq()) / (W * W));
    std::vector<Vec3> args{y, Y};
    const double g = green_kernel_log(p.lambda, std::sqrt(dsq), 3);
    return 8.0 * M_PI * fv * xi.position(args) * std::exp(g);
  };
  EstimateWithError pos = integrate_mc(f_pos, pos_prop, mc);

  const double err = std::hypot(mom.stderr_re, pos.stderr_re);
  CHECK(std::abs(mom.mean.real() - pos.mean.real()) < 3.0 * err);
}

TEST_CASE("yukawa identity") {
  for (auto [a, x] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
    const auto [quad, closed] = yukawa_identity(a, x);
    CHECK(quad == doctest::Approx(closed).epsilon(1e-4));
  }
}
