#include "contactgas/theta.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace contactgas {

ThetaProfile::ThetaProfile(ThetaKind kind, double param)
    : kind_(kind), param_(param) {
  if (param < 0.0) throw std::invalid_argument("theta: parameter must be >= 0");
  if (kind == ThetaKind::BallIndicator && param == 0.0)
    throw std::invalid_argument("theta: ball indicator needs radius > 0");
}

double ThetaProfile::eval(double r, int order) const {
  if (r < 0.0) throw std::domain_error("theta: r must be >= 0");
  if (order < 0 || order > 2) throw std::invalid_argument("theta: order in {0,1,2}");
  const double a = param_;
  switch (kind_) {
    case ThetaKind::Exponential:
    case ThetaKind::ExpScaled: {
      const double e = std::exp(-a * r);
      if (order == 0) return e;
      if (order == 1) return -a * e;
      return a * a * e;
    }
    case ThetaKind::BallIndicator:
      if (order != 0)
        throw std::domain_error("theta: ball indicator not differentiable");
      return r <= a ? 1.0 : 0.0;
    case ThetaKind::Sech: {
      const double s = 1.0 / std::cosh(a * r);
      if (order == 0) return s;
      if (order == 1) return -a * s * std::tanh(a * r);
      return a * a * s * (1.0 - 2.0 * s * s);
    }
  }
  throw std::logic_error("theta: unknown kind");
}

double ThetaProfile::theta_minus_one_over_r(double r) const {
  const double a = param_;
  if (r == 0.0) {
    if (kind_ == ThetaKind::BallIndicator) return 0.0;
    return eval(0.0, 1);
  }
  switch (kind_) {
    case ThetaKind::Exponential:
    case ThetaKind::ExpScaled:
      return std::expm1(-a * r) / r;
    case ThetaKind::BallIndicator:
      return r <= a ? 0.0 : -1.0 / r;
    case ThetaKind::Sech: {
      // sech(x) - 1 = -2 sinh^2(x/2) / cosh(x)
      const double x = a * r;
      const double sh = std::sinh(0.5 * x);
      return -2.0 * sh * sh / (std::cosh(x) * r);
    }
  }
  throw std::logic_error("theta: unknown kind");
}

bool ThetaProfile::admissible(double b) const {
  if (!(b > 0.0)) return false;
  if (std::isinf(b)) {
    // the two-sided band degenerates to theta == 1
    for (double r : {1e-6, 1e-3, 1.0, 1e3})
      if (std::abs(eval(r) - 1.0) > 1e-12) return false;
    return true;
  }
  const double lo = 1e-6 * b, hi = 1e3 * b;
  const double ratio = std::pow(hi / lo, 1.0 / 199.0);
  double r = lo;
  for (int i = 0; i < 200; ++i, r *= ratio) {
    const double t = eval(r);
    if (t < 1.0 - r / b - 1e-12 || t > 1.0 + r / b + 1e-12) return false;
  }
  return true;
}

double ThetaProfile::max_admissible_b() const {
  // b must satisfy b <= r / (1 - theta(r)) wherever theta(r) < 1 and
  // b <= r / (theta(r) - 1) wherever theta(r) > 1
  double b = std::numeric_limits<double>::infinity();
  double r = 1e-6;
  for (int i = 0; i < 400; ++i, r *= 1.12) {
    const double dev = std::abs(eval(r) - 1.0);
    if (dev > 1e-14) b = std::min(b, r / dev);
  }
  return b;
}

std::string ThetaProfile::describe() const {
  switch (kind_) {
    case ThetaKind::Exponential: return "exp:" + std::to_string(param_);
    case ThetaKind::BallIndicator: return "ball:" + std::to_string(param_);
    case ThetaKind::Sech: return "sech:" + std::to_string(param_);
    case ThetaKind::ExpScaled: return "expscaled:" + std::to_string(param_);
  }
  return "?";
}

ThetaProfile parse_theta(const std::string& spec) {
  auto pos = spec.find(':');
  if (pos == std::string::npos)
    throw std::invalid_argument("theta spec must be kind:param");
  const std::string kind = spec.substr(0, pos);
  const double param = std::stod(spec.substr(pos + 1));
  if (kind == "exp") return ThetaProfile::exponential(param);
  if (kind == "ball") return ThetaProfile::ball_indicator(param);
  if (kind == "sech") return ThetaProfile::sech(param);
  if (kind == "expscaled") return ThetaProfile::exp_scaled(param);
  throw std::invalid_argument("unknown theta kind: " + kind);
}

}  // namespace contactgas
