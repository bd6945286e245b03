#pragma once

#include <complex>
#include <span>
#include <vector>

#include "contactgas/mc.hpp"
#include "contactgas/vec.hpp"

namespace contactgas {

// One Gaussian component of a charge on R^3 x R^{3(N-2)}.  Slot 0 is the
// pair-center coordinate, slots 1..N-2 the remaining bosons.  In momentum
// space each slot contributes w^3 e^{-w^2 |kappa - mu|^2 / 2}; in position
// space e^{-|x|^2/(2 w^2)} e^{i mu . x}.
struct GaussSlot {
  double width = 1.0;
  Vec3 shift{};  // momentum shift
};

struct ChargeTerm {
  std::complex<double> amp{1.0, 0.0};
  std::vector<GaussSlot> slots;  // size N-1
};

struct ChargeComponentSpec {
  std::vector<double> widths;           // size N-1
  std::vector<Vec3> shifts;             // empty or size N-1
  std::complex<double> amplitude{1.0, 0.0};
};

class Charge {
 public:
  Charge() = default;
  Charge(int n_particles, std::vector<ChargeTerm> terms, bool symmetrized);

  int n_particles() const { return n_particles_; }
  int slots() const { return n_particles_ - 1; }
  bool symmetrized() const { return symmetrized_; }
  const std::vector<ChargeTerm>& terms() const { return terms_; }

  std::complex<double> fourier(std::span<const Vec3> kappas) const;
  std::complex<double> position(std::span<const Vec3> xs) const;
  bool centered() const;

  // L^2-preserving dilation: xi_s(kappa) = s^{-3(N-1)/2} xi_hat(kappa / s)
  Charge dilated(double s) const;

  // broadest momentum-space envelope width per slot (min Gaussian width),
  // and the largest position-space width; used to match MC proposals
  double min_width(int slot) const;
  double max_width() const;

 private:
  int n_particles_ = 0;
  std::vector<ChargeTerm> terms_;
  bool symmetrized_ = false;
};

// Builds the bosonic-symmetric charge by averaging every component over all
// (N-2)! permutations of the boson slots; identical permutations are merged.
// Rejects nonpositive widths and N > 8.
Charge make_gaussian_charge(std::span<const ChargeComponentSpec> components,
                            int n_particles);

struct ChargeNorms {
  double l2 = 0.0;      // ||xi||^2
  double h_half = 0.0;  // int (1 + |kappa|) |xi_hat|^2
  double h1 = 0.0;      // int (1 + kappa^2) |xi_hat|^2
};

ChargeNorms charge_norms(const Charge& charge);

// Weighted spectral moments of |xi_hat|^2 against s = sqrt(sum_s a_s
// |kappa_s|^2 + lambda).  Closed-form Laplace transform of the quadratic
// form plus 1D subordination quadratures; exact for the whole Gaussian
// family, shifted terms included.
class ChargeMoments {
 public:
  ChargeMoments(const Charge& charge, std::span<const double> slot_weights,
                double lambda);

  double l2() const { return l2_; }
  double lambda() const { return lambda_; }
  // int e^{-u (sum a_s kappa_s^2 + lambda)} |xi_hat|^2
  double laplace(double u) const;
  // int (sum a_s kappa_s^2 + lambda)^k |xi_hat|^2 for k <= 6
  double power_moment(int k) const;
  // int s |xi_hat|^2
  double sqrt_moment() const;
  // int e^{-c s} |xi_hat|^2
  double exp_moment(double c) const;
  // int s e^{-c s} |xi_hat|^2
  double sexp_moment(double c) const;

 private:
  struct PairSlot {
    double quad;   // (w1^2 + w2^2)/2
    Vec3 lin;      // (w1^2 mu1 + w2^2 mu2)/2
    double offset; // (w1^2 mu1^2 + w2^2 mu2^2)/2
    double wcube;  // w1^3 w2^3
  };
  struct Pair {
    double coeff;  // Re[conj(a) a'], doubled off the diagonal
    std::vector<PairSlot> slots;
  };

  double bracket(double u) const;  // l2 - e^{-lambda u} laplace-part(u)

  std::vector<Pair> pairs_;
  std::vector<double> weights_;
  double lambda_ = 0.0;
  double l2_ = 0.0;
  double u_taylor_ = 0.0;              // Taylor branch threshold
  std::vector<double> taylor_;         // series of e^{-lambda u} L(u) at 0
};

// Diagonal-form weights (1/2 on the pair slot, 1 on boson slots).
ChargeMoments diag_moments(const Charge& charge, double lambda);

// Samples positions (all N-1 slots) from the normalized |xi|^2 mixture, with
// a complex sign/phase weight; returns the total mass factor so that
// E[w * h(x)] estimates int h |xi|^2.
class PositionDensitySampler {
 public:
  explicit PositionDensitySampler(const Charge& charge);
  int dim() const { return slots_ * 3; }
  // fills xs (slots_ entries) and the weight (mass * phase / |phase-mass|)
  std::complex<double> sample(RngStream& rng, std::span<Vec3> xs) const;

 private:
  struct Component {
    double prob;                    // selection probability
    std::complex<double> coeff;     // conj(a_t) a_t'
    std::vector<double> sigma;      // per-slot stddev
    std::vector<Vec3> phase;        // per-slot phase vector
  };
  std::vector<Component> comps_;
  double total_mass_ = 0.0;
  int slots_ = 0;
};

// Same construction in momentum space: samples kappas from |xi_hat|^2.
class MomentumDensitySampler {
 public:
  explicit MomentumDensitySampler(const Charge& charge);
  int dim() const { return slots_ * 3; }
  std::complex<double> sample(RngStream& rng, std::span<Vec3> ks) const;

 private:
  struct Component {
    double prob;
    std::complex<double> coeff;  // includes the Gaussian-product mass
    std::vector<double> sigma;
    std::vector<Vec3> mean;
  };
  std::vector<Component> comps_;
  double total_mass_ = 0.0;
  int slots_ = 0;
};

}  // namespace contactgas
