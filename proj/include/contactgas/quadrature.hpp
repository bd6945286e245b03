#pragma once

#include <functional>
#include <vector>

namespace contactgas {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;   // absolute error estimate
  long evaluations = 0;
  bool converged = true;
};

// Adaptive Gauss-Kronrod 15(7) on [a,b], relative tolerance tol.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double tol = 1e-10,
                              int max_depth = 48);

// Adaptive quadrature over (0, inf); splits at `knee` and maps the tail
// through x -> knee/t.
QuadResult integrate_half_line(const std::function<double(double)>& f,
                               double tol = 1e-10, double knee = 1.0);

// Adaptive tensor quadrature of f(r1, r2) over (0,inf)^2 (outer adaptive in
// r1, inner adaptive in r2).
QuadResult quadrature_radial(const std::function<double(double, double)>& f,
                             double tol = 1e-8, double knee1 = 1.0,
                             double knee2 = 1.0);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule: integrates g -> int g(x) e^{-x^2} dx exactly for
// polynomials of degree 2n-1.
const GaussRule& gauss_hermite(int n);

// Generalized Gauss-Laguerre with weight x^alpha e^{-x} on (0,inf).
const GaussRule& gauss_laguerre(int n, double alpha);

}  // namespace contactgas
