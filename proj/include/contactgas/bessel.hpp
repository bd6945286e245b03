#pragma once

namespace contactgas {

enum class BesselRegime { series, asymptotic, closed_half_integer };

struct KernelEval {
  double value = 0.0;
  BesselRegime regime = BesselRegime::series;
};

// Macdonald function K_mu(z) for integer or half-integer order mu >= 0.
// Half-integer orders use the exact finite sum; integer orders use upward
// recurrence from K0/K1 (series for z <= 2, Chebyshev-fitted scaled values
// above) and switch to the direct large-z expansion for z > max(30, 2 mu).
// Throws std::domain_error for z <= 0 or unsupported order, and
// std::overflow_error when K_mu(z) exceeds the double range.
KernelEval bessel_k(double mu, double z);

// log K_mu(z), stable for arguments where K_mu itself would overflow.
double bessel_k_log(double mu, double z);

// Branch diagnostics for integer orders, used by the regime-stitching
// checks: the recurrence route (valid everywhere), the direct large-z
// expansion (valid above the crossover), and the argument where evaluation
// switches between them.
double bessel_k_log_recurrence(double mu, double z);
double bessel_k_log_asymptotic(double mu, double z);
double bessel_k_asymptotic_crossover(double mu);

}  // namespace contactgas
