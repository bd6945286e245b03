#pragma once

#include <string>

namespace contactgas {

enum class ThetaKind { Exponential, BallIndicator, Sech, ExpScaled };

// Repulsion-shape function theta with theta(0+) = 1.  Exponential/Sech take a
// decay rate, BallIndicator a radius, ExpScaled the parameter m >= 0 of
// e^{-m r} (m = 0 gives theta == 1).
class ThetaProfile {
 public:
  ThetaProfile(ThetaKind kind, double param);

  static ThetaProfile exponential(double rate) {
    return {ThetaKind::Exponential, rate};
  }
  static ThetaProfile ball_indicator(double radius) {
    return {ThetaKind::BallIndicator, radius};
  }
  static ThetaProfile sech(double rate) { return {ThetaKind::Sech, rate}; }
  static ThetaProfile exp_scaled(double m) { return {ThetaKind::ExpScaled, m}; }

  ThetaKind kind() const { return kind_; }
  double param() const { return param_; }
  bool differentiable() const { return kind_ != ThetaKind::BallIndicator; }

  // theta(r), theta'(r) or theta''(r); order in {0,1,2}
  double eval(double r, int order = 0) const;

  // (theta(r) - 1)/r without cancellation for small r
  double theta_minus_one_over_r(double r) const;

  // numeric check of 1 - r/b <= theta(r) <= 1 + r/b on a geometric grid
  // r in [1e-6 b, 1e3 b] (200 points)
  bool admissible(double b) const;

  // largest b for which the profile stays admissible (grid search); used to
  // match a length scale to profiles like sech
  double max_admissible_b() const;

  std::string describe() const;

 private:
  ThetaKind kind_;
  double param_;
};

// parse "exp:1.0", "ball:0.5", "sech:2.0", "expscaled:1.0"
ThetaProfile parse_theta(const std::string& spec);

}  // namespace contactgas
