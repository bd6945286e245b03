#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "contactgas/charge.hpp"
#include "contactgas/forms.hpp"
#include "contactgas/params.hpp"

namespace contactgas {

// Pointwise Fourier-space action of the diagonal multiplier
//   (1/sqrt(2)) sqrt(k^2/2 + sum p^2 + lambda) xi_hat(k, ps).
std::complex<double> gamma_diag_apply(const Charge& charge,
                                      const SystemParams& params,
                                      const Vec3& k,
                                      std::span<const Vec3> ps);

struct GammaEval {
  std::complex<double> value{0.0, 0.0};
  double inner_quadrature_error = 0.0;
  bool converged = true;
};

struct InnerQuadSpec {
  int nodes = 20;        // Gauss-Hermite points per axis
  int max_nodes = 32;    // escalation cap
  double tol = 5e-4;     // the rational factor limits spectral convergence
};

// -(2/pi^2) sum_i int xi_hat(k - q + p_i, q, ...) / (|k-q|^2 + q^2 + sum p^2
// + lambda) dq, by per-term recentered Gauss-Hermite cubature.
GammaEval gamma_off1_apply(const Charge& charge, const SystemParams& params,
                           const Vec3& k, std::span<const Vec3> ps,
                           const InnerQuadSpec& quad = {});

// -(1/pi^2) sum_{i<j} int xi_hat(p_i + p_j, k - q, q, ...) / (...) dq.
GammaEval gamma_off0_apply(const Charge& charge, const SystemParams& params,
                           const Vec3& k, std::span<const Vec3> ps,
                           const InnerQuadSpec& quad = {});

// Position-space multiplication by the effective boundary coefficient.
std::complex<double> gamma_reg_apply(const Charge& charge,
                                     const SystemParams& params, const Vec3& z,
                                     std::span<const Vec3> ys);

// ||Gamma_off1 xi||^2 and ||Gamma_off0 xi||^2 by direct MC of the expanded
// double-q integrals (used for the operator-norm bounds).
EstimateWithError gamma_off1_norm_sq(const Charge& charge,
                                     const SystemParams& params,
                                     const McSpec& mc);
EstimateWithError gamma_off0_norm_sq(const Charge& charge,
                                     const SystemParams& params,
                                     const McSpec& mc);

// <xi, Gamma_off1 xi> and <xi, Gamma_off0 xi> (momentum-space MC); these must
// reproduce the corresponding quadratic-form components.
EstimateWithError gamma_off1_pairing(const Charge& charge,
                                     const SystemParams& params,
                                     const McSpec& mc);
EstimateWithError gamma_off0_pairing(const Charge& charge,
                                     const SystemParams& params,
                                     const McSpec& mc);
// <eta, Gamma_diag xi> sampled against an arbitrary second charge.
EstimateWithError gamma_diag_pairing(const Charge& eta, const Charge& xi,
                                     const SystemParams& params,
                                     const McSpec& mc);

struct QOperatorResult {
  std::vector<double> rayleigh;  // one quotient per trial profile
  double max_rayleigh = 0.0;
  double bound = 0.0;  // 2 pi^2
  bool pass = false;
};

// Rayleigh quotients 4 pi int g(p) g(k) sqrt(pk)/(p^2+k^2) / int g^2 for
// radial profiles g; the operator bound is 2 pi^2.
QOperatorResult q_operator_check(
    std::span<const std::function<double(double)>> trial_profiles);

// int_0^inf x^2 / ((x^2+a^2)(x^2+b^2)) dx = pi / (2 (|a| + |b|)).
double explicit_integral(double a, double b);
// numeric quadrature of the same integrand (cross-check route)
double explicit_integral_quad(double a, double b, double tol = 1e-10);

// Boundary-condition residual
//   int [ (e^{-(r/sqrt2) s} - 1)/r + s/sqrt2 ]^2 |xi_hat|^2,
// s = sqrt(p^2/2 + P^2 + lambda); tensor radial quadrature for centered
// charges (N <= 6), |xi_hat|^2-mixture MC otherwise.
ValueWithError bc_residual_diag(const Charge& charge,
                                const SystemParams& params, double r,
                                const McSpec& mc = {});

}  // namespace contactgas
