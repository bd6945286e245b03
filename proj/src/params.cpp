#include "contactgas/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace contactgas {

namespace {
const long double kPiL = 3.14159265358979323846264338327950288L;
const long double kInvSqrt3L = 0.57735026918962576450914878050195746L;

long double slope(int n) {
  // (N-2) pi (1/sqrt(3) + (N-3)/8), the factor multiplying (gamma - gamma_c)
  return (n - 2) * kPiL * (kInvSqrt3L + (n - 3) / 8.0L);
}
}  // namespace

void SystemParams::validate() const {
  if (n_particles < 3)
    throw std::invalid_argument("params: n_particles must be >= 3");
  if (!(b > 0.0)) throw std::invalid_argument("params: b must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("params: lambda must be > 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("params: gamma must be > 0");
}

double critical_gamma(int n_particles) {
  if (n_particles < 3)
    throw std::invalid_argument("critical_gamma: N must be >= 3");
  return static_cast<double>(2.0L - 1.0L / slope(n_particles));
}

double lambda_cap(int n_particles, double gamma) {
  // 1 - slope (gamma - gamma_c) simplifies exactly to slope (2 - gamma),
  // which makes the clamp at gamma = 2 exact in floating point
  long double v = slope(n_particles) * (2.0L - static_cast<long double>(gamma));
  if (v < 0.0L) v = 0.0L;
  if (v > 1.0L) v = 1.0L;  // only reachable for gamma < gamma_c
  return static_cast<double>(v);
}

StabilityConstants compute_constants(const SystemParams& params) {
  params.validate();
  const int n = params.n_particles;
  StabilityConstants out;
  out.gamma_c = critical_gamma(n);
  out.coercivity_guaranteed = params.gamma > out.gamma_c;
  out.lambda_cap = lambda_cap(n, params.gamma);

  const long double cap = out.lambda_cap;
  const long double one_minus_sq = 1.0L - cap * cap;
  const long double c =
      std::isinf(params.b)
          ? 0.0L
          : (n + 1.0L) * (n - 2.0L) * params.gamma / (4.0L * params.b);
  const long double alpha_minus = std::max<long double>(0.0L, -params.alpha0);
  const long double num0 = std::max<long double>(0.0L, -params.alpha0 + c);

  if (one_minus_sq > 0.0L) {
    out.lambda0 = static_cast<double>(2.0L * num0 * num0 / one_minus_sq);
    out.spectral_lower_bound =
        (params.alpha0 >= static_cast<double>(c))
            ? 0.0
            : static_cast<double>(-2.0L * (c - params.alpha0) *
                                  (c - params.alpha0) / one_minus_sq);
  } else {
    out.lambda0 = num0 > 0.0L ? std::numeric_limits<double>::infinity() : 0.0;
    out.spectral_lower_bound = params.alpha0 >= static_cast<double>(c)
                                   ? 0.0
                                   : -std::numeric_limits<double>::infinity();
  }
  const long double one_minus = 1.0L - cap;
  if (one_minus > 0.0L) {
    const long double s = alpha_minus + c;
    out.lambda0_star = static_cast<double>(2.0L * s * s / (one_minus * one_minus));
  } else {
    out.lambda0_star = (alpha_minus + c) > 0.0L
                           ? std::numeric_limits<double>::infinity()
                           : 0.0;
  }
  return out;
}

double alpha_eff(const SystemParams& params, const Vec3& z,
                 std::span<const Vec3> ys) {
  double acc = params.alpha0;
  const auto coulomb = [&](const Vec3& a, const Vec3& b) {
    const double r = dist(a, b);
    if (r <= 0.0)
      throw std::domain_error("alpha_eff: configuration on coincidence manifold");
    return params.theta.eval(r) / r;
  };
  for (const Vec3& y : ys) acc += params.gamma * coulomb(y, z);
  for (std::size_t k = 0; k + 1 < ys.size(); ++k)
    for (std::size_t l = k + 1; l < ys.size(); ++l)
      acc += 0.5 * params.gamma * coulomb(ys[k], ys[l]);
  return acc;
}

}  // namespace contactgas
