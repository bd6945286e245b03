#include "contactgas/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace contactgas {

namespace {

// Gauss-Kronrod 15-point nodes/weights on [-1,1] with the embedded 7-point
// Gauss rule (standard QUADPACK values).
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkOut {
  double kronrod, gauss;
};

GkOut gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double v = f(c - dx) + f(c + dx);
    resk += kWgk[j] * v;
    if (j % 2 == 1) resg += kWg[j / 2] * v;
  }
  return {resk * h, resg * h};
}

void adapt(const std::function<double(double)>& f, double a, double b,
           double tol_abs, int depth, int max_depth, QuadResult& out) {
  GkOut r = gk15(f, a, b);
  out.evaluations += 15;
  double err = std::abs(r.kronrod - r.gauss);
  err = std::pow(200.0 * err, 1.5);  // QUADPACK-style sharpened estimate
  if (err <= tol_abs || depth >= max_depth) {
    out.value += r.kronrod;
    out.error += err;
    if (depth >= max_depth && err > tol_abs) out.converged = false;
    return;
  }
  const double c = 0.5 * (a + b);
  adapt(f, a, c, tol_abs * 0.5, depth + 1, max_depth, out);
  adapt(f, c, b, tol_abs * 0.5, depth + 1, max_depth, out);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double tol, int max_depth) {
  QuadResult out;
  if (a == b) return out;
  GkOut coarse = gk15(f, a, b);
  out.evaluations = 15;
  const double scale = std::max(std::abs(coarse.kronrod), 1e-300);
  QuadResult fine;
  adapt(f, a, b, tol * scale, 0, max_depth, fine);
  fine.evaluations += out.evaluations;
  return fine;
}

QuadResult integrate_half_line(const std::function<double(double)>& f,
                               double tol, double knee) {
  QuadResult head = integrate_adaptive(f, 0.0, knee, tol);
  auto tail_f = [&](double t) {
    const double x = knee / t;
    return f(x) * x / t;
  };
  QuadResult tail = integrate_adaptive(tail_f, 1e-14, 1.0, tol);
  QuadResult out;
  out.value = head.value + tail.value;
  out.error = head.error + tail.error;
  out.evaluations = head.evaluations + tail.evaluations;
  out.converged = head.converged && tail.converged;
  return out;
}

QuadResult quadrature_radial(const std::function<double(double, double)>& f,
                             double tol, double knee1, double knee2) {
  QuadResult out;
  bool inner_ok = true;
  long inner_evals = 0;
  auto outer = [&](double r1) {
    QuadResult in = integrate_half_line([&](double r2) { return f(r1, r2); },
                                        tol * 0.1, knee2);
    inner_ok = inner_ok && in.converged;
    inner_evals += in.evaluations;
    return in.value;
  };
  QuadResult o = integrate_half_line(outer, tol, knee1);
  o.converged = o.converged && inner_ok;
  o.evaluations += inner_evals;
  return o;
}

namespace {

// Golub-Welsch: eigenvalues/first components of the symmetric tridiagonal
// Jacobi matrix, via QL with implicit shifts.
void tridiag_eigen(std::vector<double>& d, std::vector<double>& e,
                   std::vector<double>& first_comp) {
  const int n = static_cast<int>(d.size());
  first_comp.assign(n, 0.0);
  std::vector<std::vector<double>> z(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) z[i][i] = 1.0;
  e.push_back(0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-15 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw std::runtime_error("tridiag_eigen: no convergence");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (int i = m - 1; i >= l; --i) {
          double fi = s * e[i], b = c * e[i];
          r = std::hypot(fi, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = fi / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            fi = z[k][i + 1];
            z[k][i + 1] = s * z[k][i] + c * fi;
            z[k][i] = c * z[k][i] - s * fi;
          }
        }
        if (r == 0.0 && m - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  // selection-sort ascending, carrying the first row of z
  for (int i = 0; i < n; ++i) first_comp[i] = z[0][i];
  for (int i = 0; i < n - 1; ++i) {
    int k = i;
    for (int j = i + 1; j < n; ++j)
      if (d[j] < d[k]) k = j;
    std::swap(d[i], d[k]);
    std::swap(first_comp[i], first_comp[k]);
  }
}

GaussRule build_hermite(int n) {
  // Jacobi matrix for weight e^{-x^2}: a_k = 0, b_k = sqrt(k/2)
  std::vector<double> d(n, 0.0), e(n - 1);
  for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(0.5 * k);
  std::vector<double> q0;
  tridiag_eigen(d, e, q0);
  const double mu0 = std::sqrt(3.14159265358979323846);  // int e^{-x^2}
  GaussRule r;
  r.nodes = d;
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) r.weights[i] = mu0 * q0[i] * q0[i];
  return r;
}

GaussRule build_laguerre(int n, double alpha) {
  // weight x^alpha e^{-x}: a_k = 2k + alpha + 1, b_k = sqrt(k (k + alpha))
  std::vector<double> d(n), e(n - 1);
  for (int k = 0; k < n; ++k) d[k] = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(k * (k + alpha));
  std::vector<double> q0;
  tridiag_eigen(d, e, q0);
  const double mu0 = std::tgamma(alpha + 1.0);
  GaussRule r;
  r.nodes = d;
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) r.weights[i] = mu0 * q0[i] * q0[i];
  return r;
}

std::mutex g_rule_mutex;

}  // namespace

const GaussRule& gauss_hermite(int n) {
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_hermite(n)).first;
  return it->second;
}

const GaussRule& gauss_laguerre(int n, double alpha) {
  static std::map<std::pair<int, int>, GaussRule> cache;
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  auto key = std::make_pair(n, static_cast<int>(alpha * 1000.0 + 0.5));
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, build_laguerre(n, alpha)).first;
  return it->second;
}

}  // namespace contactgas
