#pragma once

#include <span>

#include "contactgas/theta.hpp"
#include "contactgas/vec.hpp"

namespace contactgas {

struct SystemParams {
  int n_particles = 3;      // N >= 3
  double alpha0 = 0.0;      // inverse-length, -1/(scattering length)
  double gamma = 2.0;       // dimensionless coupling, > 0
  double b = 1.0;           // length scale of theta, > 0 (may be +inf)
  double lambda = 1.0;      // spectral shift, > 0
  ThetaProfile theta = ThetaProfile::exponential(1.0);

  void validate() const;  // throws std::invalid_argument on violation
};

struct StabilityConstants {
  double gamma_c = 0.0;
  double lambda_cap = 0.0;            // Lambda_N in [0,1)
  double lambda0 = 0.0;               // coercivity threshold
  double lambda0_star = 0.0;          // the coarser threshold, >= lambda0
  double spectral_lower_bound = 0.0;  // inf spec(H) estimate, <= 0
  bool coercivity_guaranteed = true;  // false when gamma <= gamma_c
};

double critical_gamma(int n_particles);
double lambda_cap(int n_particles, double gamma);

// All closed-form constants.  gamma <= gamma_c is flagged, not rejected; in
// that regime lambda_cap/lambda0/lower bound are reported for Lambda_N
// clamped into [0,1] and have no coercivity meaning.
StabilityConstants compute_constants(const SystemParams& params);

// Effective boundary coefficient
//   alpha0 + gamma sum_k theta(|y_k - z|)/|y_k - z|
//          + (gamma/2) sum_{k<l} theta(|y_k - y_l|)/|y_k - y_l|
// Throws std::domain_error if any distance in a denominator vanishes.
double alpha_eff(const SystemParams& params, const Vec3& z,
                 std::span<const Vec3> ys);

}  // namespace contactgas
