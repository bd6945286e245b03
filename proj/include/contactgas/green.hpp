#pragma once

#include <complex>
#include <span>
#include <utility>

#include "contactgas/bessel.hpp"
#include "contactgas/charge.hpp"
#include "contactgas/mc.hpp"
#include "contactgas/params.hpp"
#include "contactgas/vec.hpp"

namespace contactgas {

// Resolvent kernel of -Delta + lambda on R^{3N} as a function of the point
// separation:  (2 pi)^{-3N/2} (sqrt(lambda)/d)^{3N/2-1} K_{3N/2-1}(sqrt(lambda) d).
double green_kernel_log(double lambda, double d, int n_particles);
double green_kernel_dist(double lambda, double d, int n_particles);

// Full-argument form; x and y hold N points each.
double green_kernel(double lambda, std::span<const Vec3> x,
                    std::span<const Vec3> y);

// Closed form of the partially Fourier-transformed Green kernel contracted
// over the pair diagonal:
//   int e^{-i q.y - i Q.Y} G^lambda(x_i, x_j, X; y, y, Y) dy dY
//     = e^{-sqrt(q^2/2 + Q^2 + lambda) |x_i - x_j| / sqrt(2)}
//       / (8 pi |x_i - x_j|) * e^{-i q.(x_i+x_j)/2 - i Q.X}
std::complex<double> green_contracted(double lambda, const Vec3& xi,
                                      const Vec3& xj, const Vec3& q,
                                      std::span<const Vec3> Q,
                                      std::span<const Vec3> X);

// Fourier transform of the potential generated by a charge on the pair
// (i, j):  sqrt(8/pi) xi_hat(p_i + p_j, P_sigma) / (p^2 + lambda).
std::complex<double> potential_fourier(const Charge& charge,
                                       const SystemParams& params,
                                       std::span<const Vec3> momenta,
                                       std::pair<int, int> pair);

// Monte Carlo estimate of the position-space potential
//   8 pi int xi(y, Y) G^lambda(x_i, x_j, X_sigma; y, y, Y) dy dY
// at a configuration off the coincidence hyperplane of the pair.
EstimateWithError potential_position(const Charge& charge,
                                     const SystemParams& params,
                                     std::span<const Vec3> config,
                                     std::pair<int, int> pair,
                                     const McSpec& mc);

// MC estimate of the left-hand side of the contracted-kernel identity, used
// to cross-check green_contracted.
EstimateWithError green_contracted_mc(double lambda, int n_particles,
                                      const Vec3& xi, const Vec3& xj,
                                      const Vec3& q, std::span<const Vec3> Q,
                                      std::span<const Vec3> X,
                                      const McSpec& mc);

// Yukawa transform check: int e^{i k.x} / (k^2 + a^2) d^3k vs the closed
// form (2 pi^2 / |x|) e^{-a |x|}; returns {quadrature value, closed form}.
std::pair<double, double> yukawa_identity(double a, double x,
                                          double tol = 1e-10);

}  // namespace contactgas
