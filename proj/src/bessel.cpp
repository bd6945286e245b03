#include "contactgas/bessel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace contactgas {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr double kLogDblMax = 709.0;

// Chebyshev coefficients for K_nu(z) * sqrt(z) * e^z on z in [2, inf),
// t = 4/z - 1.  Fitted to 34 terms (max relative error ~2.5e-22 against an
// arbitrary-precision reference).
const double kChebK0[34] = {
    2.44030308206595545468,    -0.0314481013119645005427,
    0.00156988388573005337491, -0.000128495495816278026384,
    1.39498137188764993641e-5, -1.83175552271911948478e-6,
    2.76681363944501507614e-7, -4.66048989768794766556e-8,
    8.57403401741422608582e-9, -1.69753450938906151564e-9,
    3.57739728140032844716e-10, -7.95748924447739703772e-11,
    1.85594911495492655495e-11, -4.51459788337451917444e-12,
    1.14034058820734423326e-12, -2.98009692314817832032e-13,
    8.03289077506837355392e-14, -2.2275133267462944225e-14,
    6.34007647627659964484e-15, -1.8485933779207957864e-15,
    5.51205599940163854541e-16, -1.67823112574833935619e-16,
    5.21039177748275791491e-17, -1.64758059358755186569e-17,
    5.30043376132194737758e-18, -1.73317117592364038131e-18,
    5.75510858137079547742e-19, -1.93909402687840565091e-19,
    6.62457013173512571234e-20, -2.293115457472076902e-20,
    8.03601924620421951842e-21, -2.84481231831265210052e-21,
    1.00460265993238709919e-21, -3.20911047685624297126e-22};

const double kChebK1[34] = {
    2.72062619048444266945,    0.103923736576817238437,
    -0.0028578168596227793868, 0.000195215518471351631108,
    -1.93619797416608296002e-5, 2.40648494783721711706e-6,
    -3.5019606030878125421e-7, 5.74108412545004929231e-8,
    -1.03457624656780970267e-8, 2.01504975519703461615e-9,
    -4.19035475934192558424e-10, 9.21831518760531412581e-11,
    -2.12996783842779102152e-11, 5.13963967348234353974e-12,
    -1.28917396094982293366e-12, 3.34841966605224308392e-13,
    -8.97670518201014521383e-14, 2.47715442421959664749e-14,
    -7.01983708921472020503e-15, 2.03870316623974382441e-15,
    -6.05704727064018370773e-16, 1.83809357523613980071e-16,
    -5.68946284902428136761e-17, 1.79405104746816160071e-17,
    -5.75674447167543480108e-18, 1.87786516412376886017e-18,
    -6.22164463045659668304e-19, 2.09191085709192373577e-19,
    -7.13267012226248168785e-20, 2.46446461760276617823e-20,
    -8.62160282990335514667e-21, 3.04719144785994292991e-21,
    -1.07450018700395443776e-21, 3.42849315129197636591e-22};

double cheb_eval(const double* c, int n, double t) {
  double b0 = 0.0, b1 = 0.0;
  for (int k = n - 1; k >= 1; --k) {
    double tmp = 2.0 * t * b0 - b1 + c[k];
    b1 = b0;
    b0 = tmp;
  }
  return t * b0 - b1 + 0.5 * c[0];
}

// scaled K~_nu(z) := K_nu(z) * sqrt(z) * e^z for nu = 0, 1 and z >= 2
double k01_scaled_large(int nu, double z) {
  const double t = 4.0 / z - 1.0;
  return cheb_eval(nu == 0 ? kChebK0 : kChebK1, 34, t);
}

// K0, K1 by the exact logarithmic series, z <= 2
void k01_series(double z, double& k0, double& k1) {
  const double q = 0.25 * z * z;
  const double lg = std::log(0.5 * z);
  // I0, I1
  double i0 = 1.0, i1 = 0.5 * z;
  {
    double term0 = 1.0, term1 = 0.5 * z;
    for (int k = 1; k <= 40; ++k) {
      term0 *= q / (static_cast<double>(k) * k);
      term1 *= q / (static_cast<double>(k) * (k + 1.0));
      i0 += term0;
      i1 += term1;
      if (term0 < 1e-19 * i0 && term1 < 1e-19 * i1) break;
    }
  }
  // K0 = -(log(z/2)+gamma) I0 + sum_{k>=1} H_k q^k / (k!)^2
  double s0 = 0.0, hk = 0.0, pk = 1.0;
  for (int k = 1; k <= 40; ++k) {
    pk *= q / (static_cast<double>(k) * k);
    hk += 1.0 / k;
    const double term = hk * pk;
    s0 += term;
    if (term < 1e-19 * (std::abs(s0) + 1.0)) break;
  }
  k0 = -(lg + kEulerGamma) * i0 + s0;
  // K1 = 1/z + log(z/2) I1 - (z/4) sum_k [psi(k+1)+psi(k+2)] q^k/(k!(k+1)!)
  double s1 = 0.0, pk1 = 1.0, hk0 = 0.0, hk1 = 1.0;
  for (int k = 0; k <= 40; ++k) {
    const double psi_sum = -2.0 * kEulerGamma + hk0 + hk1;
    const double term = psi_sum * pk1;
    s1 += term;
    if (k > 2 && std::abs(term) < 1e-19 * (std::abs(s1) + 1.0)) break;
    pk1 *= q / ((k + 1.0) * (k + 2.0));
    hk0 += 1.0 / (k + 1.0);
    hk1 += 1.0 / (k + 2.0);
  }
  k1 = 1.0 / z + lg * i1 - 0.25 * z * s1;
}

// direct large-z expansion at order mu; accurate to ~1e-18 for
// z >= max(30, mu^2) (optimal truncation)
double k_asymptotic_scaled(double mu, double z) {
  // K_mu(z) = sqrt(pi/(2z)) e^{-z} sum_k a_k / z^k; returns the bracket sum
  double sum = 1.0, term = 1.0;
  const double mu4 = 4.0 * mu * mu;
  for (int k = 1; k <= 80; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu4 - odd * odd) / (8.0 * k * z);
    if (std::abs(next) > std::abs(term)) break;  // divergence onset
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

bool is_half_integer(double mu) {
  const double two_mu = 2.0 * mu;
  return std::abs(two_mu - std::round(two_mu)) < 1e-12 &&
         std::abs(mu - std::round(mu)) > 0.25;
}

bool is_integer(double mu) { return std::abs(mu - std::round(mu)) < 1e-12; }

// log K_{n+1/2}(z) by log-sum-exp over the exact finite sum
double half_integer_log(int n, double z) {
  // sum_{k=0}^{n} (n+k)! / (k! (n-k)!) (2z)^{-k}
  std::vector<double> log_terms(n + 1);
  double lf = 0.0;  // log k! running pieces via lgamma
  (void)lf;
  for (int k = 0; k <= n; ++k) {
    log_terms[k] = std::lgamma(n + k + 1.0) - std::lgamma(k + 1.0) -
                   std::lgamma(n - k + 1.0) - k * std::log(2.0 * z);
  }
  double m = log_terms[0];
  for (double t : log_terms) m = std::max(m, t);
  double acc = 0.0;
  for (double t : log_terms) acc += std::exp(t - m);
  return 0.5 * std::log(kPi / (2.0 * z)) - z + m + std::log(acc);
}

// log K_n(z) for integer n >= 0 via scaled upward recurrence
double integer_log(int n, double z) {
  double k0s, k1s;  // scaled by sqrt(2z/pi) e^z
  if (z <= 2.0) {
    double k0, k1;
    k01_series(z, k0, k1);
    const double s = std::sqrt(2.0 * z / kPi) * std::exp(z);
    k0s = k0 * s;
    k1s = k1 * s;
  } else {
    const double c = std::sqrt(2.0 / kPi);
    k0s = k01_scaled_large(0, z) * c;
    k1s = k01_scaled_large(1, z) * c;
  }
  double log_scale = 0.0;
  double prev = k0s, cur = k1s;
  if (n == 0) cur = prev;
  for (int m = 1; m < n; ++m) {
    double next = prev + (2.0 * m / z) * cur;
    prev = cur;
    cur = next;
    if (cur > 1e250) {
      prev *= 1e-250;
      cur *= 1e-250;
      log_scale += std::log(1e250);
    }
  }
  return std::log(cur) + log_scale + 0.5 * std::log(kPi / (2.0 * z)) - z;
}

}  // namespace

double bessel_k_asymptotic_crossover(double mu) {
  // the plain large-argument expansion needs z of order mu^2 before its
  // optimal truncation reaches double precision
  return std::max(30.0, mu * mu);
}

double bessel_k_log_recurrence(double mu, double z) {
  return integer_log(static_cast<int>(std::round(mu)), z);
}

double bessel_k_log_asymptotic(double mu, double z) {
  return 0.5 * std::log(kPi / (2.0 * z)) - z +
         std::log(k_asymptotic_scaled(mu, z));
}

double bessel_k_log(double mu, double z) {
  if (!(z > 0.0)) throw std::domain_error("bessel_k: argument must be > 0");
  if (mu < 0.0 || !(is_integer(mu) || is_half_integer(mu)))
    throw std::domain_error("bessel_k: order must be a nonnegative integer or half-integer");
  if (is_half_integer(mu)) {
    return half_integer_log(static_cast<int>(std::round(mu - 0.5)), z);
  }
  if (z > bessel_k_asymptotic_crossover(mu))
    return bessel_k_log_asymptotic(mu, z);
  return bessel_k_log_recurrence(mu, z);
}

KernelEval bessel_k(double mu, double z) {
  const double lk = bessel_k_log(mu, z);
  if (lk > kLogDblMax)
    throw std::overflow_error("bessel_k: value exceeds double range");
  KernelEval out;
  out.value = std::exp(lk);
  if (is_half_integer(mu))
    out.regime = BesselRegime::closed_half_integer;
  else if (z <= 2.0)
    out.regime = BesselRegime::series;
  else
    out.regime = BesselRegime::asymptotic;
  return out;
}

}  // namespace contactgas
