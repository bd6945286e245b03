#include "contactgas/green.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "contactgas/quadrature.hpp"

namespace contactgas {

namespace {
constexpr double kPi = 3.14159265358979323846;

double pair_reduced_norm(const Vec3& q, std::span<const Vec3> Q,
                         double lambda) {
  double acc = 0.5 * q.norm_sq() + lambda;
  for (const auto& v : Q) acc += v.norm_sq();
  return std::sqrt(acc);
}
}  // namespace

double green_kernel_log(double lambda, double d, int n_particles) {
  if (!(lambda > 0.0)) throw std::domain_error("green_kernel: lambda must be > 0");
  if (!(d > 0.0))
    throw std::domain_error("green_kernel: evaluated on the singular diagonal");
  const double mu = 1.5 * n_particles - 1.0;
  const double sl = std::sqrt(lambda);
  return -1.5 * n_particles * std::log(2.0 * kPi) +
         mu * (std::log(sl) - std::log(d)) + bessel_k_log(mu, sl * d);
}

double green_kernel_dist(double lambda, double d, int n_particles) {
  return std::exp(green_kernel_log(lambda, d, n_particles));
}

double green_kernel(double lambda, std::span<const Vec3> x,
                    std::span<const Vec3> y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("green_kernel: point size mismatch");
  double dsq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dsq += (x[i] - y[i]).norm_sq();
  return green_kernel_dist(lambda, std::sqrt(dsq),
                           static_cast<int>(x.size()));
}

std::complex<double> green_contracted(double lambda, const Vec3& xi,
                                      const Vec3& xj, const Vec3& q,
                                      std::span<const Vec3> Q,
                                      std::span<const Vec3> X) {
  const double r = dist(xi, xj);
  if (!(r > 0.0))
    throw std::domain_error("green_contracted: coincident pair");
  const double s = pair_reduced_norm(q, Q, lambda);
  const double mod = std::exp(-s * r / std::sqrt(2.0)) / (8.0 * kPi * r);
  double phase = -0.5 * q.dot(xi + xj);
  for (std::size_t k = 0; k < Q.size(); ++k) phase -= Q[k].dot(X[k]);
  return std::polar(mod, phase);
}

std::complex<double> potential_fourier(const Charge& charge,
                                       const SystemParams& params,
                                       std::span<const Vec3> momenta,
                                       std::pair<int, int> pair) {
  const int n = charge.n_particles();
  if (static_cast<int>(momenta.size()) != n)
    throw std::invalid_argument("potential_fourier: need N momenta");
  double denom = params.lambda;
  for (const auto& p : momenta) denom += p.norm_sq();
  thread_local std::vector<Vec3> args;
  args.clear();
  args.push_back(momenta[pair.first] + momenta[pair.second]);
  for (int k = 0; k < n; ++k)
    if (k != pair.first && k != pair.second) args.push_back(momenta[k]);
  return std::sqrt(8.0 / kPi) * charge.fourier(args) / denom;
}

EstimateWithError potential_position(const Charge& charge,
                                     const SystemParams& params,
                                     std::span<const Vec3> config,
                                     std::pair<int, int> pair,
                                     const McSpec& mc) {
  const int n = charge.n_particles();
  if (static_cast<int>(config.size()) != n)
    throw std::invalid_argument("potential_position: need N positions");
  const Vec3& xi = config[pair.first];
  const Vec3& xj = config[pair.second];
  const double r0 = dist(xi, xj);
  if (!(r0 > 0.0))
    throw std::domain_error("potential_position: configuration on the hyperplane");
  const Vec3 mid = 0.5 * (xi + xj);
  std::vector<Vec3> spectators;
  for (int k = 0; k < n; ++k)
    if (k != pair.first && k != pair.second) spectators.push_back(config[k]);

  const int dim = 3 * (n - 1);
  const double w = charge.max_width();
  // zeta = (y - mid, Y - X); kernel concentrates at |zeta| ~ r0, the charge
  // at y ~ 0, so mix a kernel-scale radial component with charge-matched
  // Gaussians expressed in zeta coordinates
  std::vector<double> charge_center(dim, 0.0);
  charge_center[0] = -mid.x;
  charge_center[1] = -mid.y;
  charge_center[2] = -mid.z;
  for (std::size_t s = 0; s < spectators.size(); ++s) {
    charge_center[3 * s + 3] = -spectators[s].x + 0.0;
    charge_center[3 * s + 4] = -spectators[s].y;
    charge_center[3 * s + 5] = -spectators[s].z;
  }
  // note: charge slots are centered at the origin, so in zeta coordinates the
  // charge envelope sits at -(mid, X)
  auto mix = std::make_shared<MixtureProposal>(
      std::vector<double>{0.4, 0.3, 0.3},
      std::vector<std::shared_ptr<Proposal>>{
          std::make_shared<RadialProposal>(dim, 1.0, std::max(r0, 1e-6)),
          std::make_shared<RadialProposal>(
              dim, 1.0, std::max(1.0 / std::sqrt(params.lambda), w)),
          std::make_shared<RadialProposal>(dim, 1.0, 2.0 * w, charge_center)});

  const double lambda = params.lambda;
  auto f = [&, lambda, r0](std::span<const double> zeta) -> std::complex<double> {
    thread_local std::vector<Vec3> args;
    args.resize(static_cast<std::size_t>(n - 1));
    args[0] = mid + Vec3{zeta[0], zeta[1], zeta[2]};
    double dsq = 2.0 * Vec3{zeta[0], zeta[1], zeta[2]}.norm_sq() +
                 0.5 * r0 * r0;
    for (std::size_t s = 0; s + 1 < args.size(); ++s) {
      const Vec3 dz{zeta[3 * s + 3], zeta[3 * s + 4], zeta[3 * s + 5]};
      args[s + 1] = spectators[s] + dz;
      dsq += dz.norm_sq();
    }
    const std::complex<double> xi_val = charge.position(args);
    if (xi_val == std::complex<double>(0.0, 0.0)) return xi_val;
    const double g = green_kernel_log(lambda, std::sqrt(dsq), n);
    return 8.0 * kPi * xi_val * std::exp(g);
  };
  return integrate_mc(f, *mix, mc);
}

EstimateWithError green_contracted_mc(double lambda, int n_particles,
                                      const Vec3& xi, const Vec3& xj,
                                      const Vec3& q, std::span<const Vec3> Q,
                                      std::span<const Vec3> X,
                                      const McSpec& mc) {
  const double r0 = dist(xi, xj);
  if (!(r0 > 0.0)) throw std::domain_error("green_contracted_mc: coincident pair");
  if (static_cast<int>(X.size()) != n_particles - 2 || Q.size() != X.size())
    throw std::invalid_argument(
        "green_contracted_mc: need N-2 spectators and matching phases");
  const Vec3 mid = 0.5 * (xi + xj);
  const int dim = 3 * (n_particles - 1);
  std::vector<Vec3> Xc(X.begin(), X.end());
  std::vector<Vec3> Qc(Q.begin(), Q.end());
  // zeta = (y - mid, Y - X); the kernel decays like e^{-sqrt(lambda) d}
  auto mix = std::make_shared<MixtureProposal>(
      std::vector<double>{0.5, 0.5},
      std::vector<std::shared_ptr<Proposal>>{
          std::make_shared<RadialProposal>(dim, 1.0, std::max(r0, 0.3)),
          std::make_shared<RadialExpProposal>(
              dim, 0.7 * std::sqrt(2.0 * lambda))});
  auto f = [=](std::span<const double> zeta) -> std::complex<double> {
    const Vec3 dy{zeta[0], zeta[1], zeta[2]};
    const Vec3 y = mid + dy;
    double dsq = 2.0 * dy.norm_sq() + 0.5 * r0 * r0;
    double phase = -q.dot(y);
    for (std::size_t s = 0; s < Xc.size(); ++s) {
      const Vec3 dz{zeta[3 * s + 3], zeta[3 * s + 4], zeta[3 * s + 5]};
      dsq += dz.norm_sq();
      phase -= Qc[s].dot(Xc[s] + dz);
    }
    const double g = green_kernel_log(lambda, std::sqrt(dsq), n_particles);
    return std::polar(std::exp(g), phase);
  };
  return integrate_mc(f, *mix, mc);
}

std::pair<double, double> yukawa_identity(double a, double x, double tol) {
  // angular part integrates to 4 pi sin(kx)/(kx); split k/(k^2+a^2) as
  // 1/k - a^2/(k (k^2+a^2)) so the oscillatory piece is exact
  const double closed = 2.0 * kPi * kPi * std::exp(-a * x) / x;
  auto f = [a, x](double k) {
    return std::sin(k * x) / (k * (k * k + a * a));
  };
  const double cut = 60.0 / x;
  QuadResult q = integrate_adaptive(f, 1e-12, cut, tol, 52);
  // tail of the absolutely convergent remainder is below |a^2/x| k^-3
  const double value = (4.0 * kPi / x) * (0.5 * kPi - a * a * q.value);
  return {value, closed};
}

}  // namespace contactgas
