#pragma once

#include <vector>

#include "contactgas/charge.hpp"
#include "contactgas/forms.hpp"
#include "contactgas/params.hpp"
#include "contactgas/theta.hpp"

namespace contactgas {

// Weight function  phi(x_1..x_N) = sum_{k<l} theta(r_kl)/r_kl + alpha0
// - theta'(0); theta must be twice differentiable with theta(0) = 1.
struct WeightFunction {
  ThetaProfile theta;
  double alpha0 = 0.0;

  double offset() const { return alpha0 - theta.eval(0.0, 1); }
};

double weight_phi(const WeightFunction& wf, std::span<const Vec3> config);

// Delta phi = 2 sum_{k<l} theta''(r_kl)/r_kl   (closed form)
double weight_phi_laplacian(const WeightFunction& wf,
                            std::span<const Vec3> config);

double laplacian_ratio(const WeightFunction& wf, std::span<const Vec3> config);

// central-difference Laplacian over all 3N coordinates (oracle)
double weight_phi_fd_laplacian(const WeightFunction& wf,
                               std::span<const Vec3> config, double h);

struct AlphaLimitResult {
  std::vector<double> r_grid;
  std::vector<double> estimates;   // phi(.., z + r/2, z - r/2) - 1/r
  double extrapolated = 0.0;       // two-level Richardson (first order)
  double alpha_eff_target = 0.0;   // gamma = 2 coefficient
  bool pass = false;
};

// The r -> 0 limit of phi minus the pair singularity recovers the gamma = 2
// effective coefficient.
AlphaLimitResult alpha_limit_check(const WeightFunction& wf, const Vec3& z,
                                   std::span<const Vec3> ys,
                                   std::span<const double> r_grid,
                                   double tol = 1e-4);

struct SechStabilityReport {
  double max_ratio = 0.0;
  double bound = 0.0;  // N e0
  long samples = 0;
  bool pass = false;
};

// theta = sech(sqrt(N e0 / 2) r), alpha0 >= 0: Delta phi / phi <= N e0 on
// stratified random configurations (Gaussian cloud plus near-coincident
// pairs at separations 1e-1 .. 1e-4).
SechStabilityReport sech_stability_report(int n_particles, double e0,
                                          double alpha0, long sample_count,
                                          std::uint64_t seed);

// Parameter triple under which the quadratic forms represent the classical
// exponential-weight Hamiltonian: alpha0 = -m, gamma = 2, theta = e^{-m r}.
SystemParams albeverio_mapping(double m, int n_particles = 3,
                               double lambda = 1.0);

struct DirichletRegCrosscheck {
  EstimateWithError dirichlet_reg_term;  // int [A_theta + alpha0] |xi|^2
  double phi_reg_total = 0.0;            // reg2 + reg3 + reg4
  double phi_reg_error = 0.0;
  double sigma = 0.0;                    // |difference| / combined error
  bool pass = false;
};

// The boundary-expansion regularizer equals Phi_reg at gamma = 2; both sides
// by independent MC estimators.
DirichletRegCrosscheck dirichlet_reg_crosscheck(const WeightFunction& wf,
                                                const Charge& charge,
                                                const SystemParams& params,
                                                const McSpec& mc);

// Pointwise identity between A_theta + alpha0 and the gamma = 2 boundary
// coefficient (exact up to roundoff).
double dirichlet_reg_integrand(const WeightFunction& wf, const Vec3& x,
                               std::span<const Vec3> others);

}  // namespace contactgas
