#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "contactgas/charge.hpp"
#include "contactgas/mc.hpp"
#include "contactgas/params.hpp"

namespace contactgas {

struct ValueWithError {
  double value = 0.0;
  double error = 0.0;  // 1-sigma; 0 for exact/quadrature values
  bool exact = true;
};

struct FormBreakdown {
  ValueWithError diag, off0, off1, reg2, reg3, reg4;
  ValueWithError total;     // includes the 4 pi N (N-1) prefactor
  double worst_imag_sigma = 0.0;  // largest |Im|/stderr over MC components
};

// Phi_diag by deterministic subordination quadrature (exact for the whole
// Gaussian family).
double phi_diag(const Charge& charge, const SystemParams& params);

// Momentum-space off-diagonal components (MC).  Real parts are the
// estimates; imaginary parts must vanish within errors.
EstimateWithError phi_off1(const Charge& charge, const SystemParams& params,
                           const McSpec& mc);
EstimateWithError phi_off0(const Charge& charge, const SystemParams& params,
                           const McSpec& mc);

struct RegParts {
  ValueWithError reg2;          // alpha0 ||xi||^2, exact
  EstimateWithError reg3, reg4; // position-space MC
};
RegParts phi_reg(const Charge& charge, const SystemParams& params,
                 const McSpec& mc);

FormBreakdown phi_total(const Charge& charge, const SystemParams& params,
                        const McSpec& mc);

// Yukawa-weighted negative term and Green-weighted positive remainder of the
// off-diagonal splits.
struct SplitParts {
  EstimateWithError negative_part;
  EstimateWithError positive_part;
};
SplitParts phi_split_off1(const Charge& charge, const SystemParams& params,
                          const McSpec& mc);
SplitParts phi_split_off0(const Charge& charge, const SystemParams& params,
                          const McSpec& mc);

// Independent position-space representations (MC oracles).
EstimateWithError phi_diag_pos(const Charge& charge, const SystemParams& params,
                               const McSpec& mc);
EstimateWithError phi_off1_pos(const Charge& charge, const SystemParams& params,
                               const McSpec& mc);
EstimateWithError phi_off0_pos(const Charge& charge, const SystemParams& params,
                               const McSpec& mc);

// Finite-separation expressions whose r -> 0 limits recover the components.
double phi_diag_limit_expr(const Charge& charge, const SystemParams& params,
                           double r);
EstimateWithError phi_off1_limit_expr(const Charge& charge,
                                      const SystemParams& params, double r,
                                      const McSpec& mc);
EstimateWithError phi_off0_limit_expr(const Charge& charge,
                                      const SystemParams& params, double r,
                                      const McSpec& mc);

struct LowerBoundCase {
  FormBreakdown breakdown;
  double l2 = 0.0;
  double bound_norm = 0.0;       // closed-form bound times ||xi||^2
  double bound_diag_factor = 0.0;  // diag-relative bound factor
  double bound_diag = 0.0;       // that factor times 4 pi N (N-1) Phi_diag
  double margin_sigma = 0.0;     // (total - bound_norm) / stderr
  bool pass = false;
};
struct LowerBoundReport {
  std::vector<LowerBoundCase> cases;
  int violations = 0;
  double worst_margin_sigma = 0.0;
};

// Checks the coercivity lower bound on each charge; refuses when
// gamma <= gamma_c.
LowerBoundReport verify_lower_bound(std::span<const Charge> charges,
                                    const SystemParams& params,
                                    const McSpec& mc);

// Centered isotropic Gaussian regular part w(x) = amp e^{-|x|^2/(2 width^2)}
// on R^{3N}.
struct RegularPart {
  double width = 1.0;
  double amp = 1.0;
};

// Total energy form Q[psi] for psi = w + G^lambda xi.
EstimateWithError energy_form(const RegularPart& w, const Charge& charge,
                              const SystemParams& params, const McSpec& mc);

struct HardyRellichResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};
// Radial Gaussian mixture sum_i c_i e^{-x^2/(2 w_i^2)} on R^3, both sides by
// radial quadrature.
HardyRellichResult hardy_rellich_check(
    std::span<const std::pair<double, double>> mixture);  // (c_i, w_i)

// ---- shared momentum-space machinery ---------------------------------------

enum class PairClass { same, share1, share0 };

// MC estimate of the 3N-dimensional pair integral
//   int weight(p^2_total) xi-pair-product d^{3N}p
// where the product couples the charge with itself in the given overlap class
// and r_factor (if nonzero) inserts cos(r.(pa - pb)/2) as in the
// small-separation expressions.
EstimateWithError momentum_pair_integral(
    const Charge& charge, const SystemParams& params, PairClass cls,
    const std::function<double(double)>& weight, const Vec3& r_factor,
    const McSpec& mc);

// Full pair-sum assembly sum_{sigma,nu} (8/pi) int weight(p^2) xi_sigma
// xi_nu over R^{3N}, with the bosonic multiplicities of the three overlap
// classes.
EstimateWithError potential_pair_assembly(
    const Charge& charge, const SystemParams& params,
    const std::function<double(double)>& weight, const McSpec& mc);

// ||G^lambda xi||^2 assembled from the three overlap classes.
EstimateWithError potential_norm_sq(const Charge& charge,
                                    const SystemParams& params,
                                    const McSpec& mc);

// Difference of the energy form between the matched decompositions of the
// same state at two spectral shifts:
//   Q_{lambda1}[G^{l1} xi] - Q_{lambda2}[w_2 + G^{l2} xi]
//     with w_2 = (G^{l1} - G^{l2}) xi
// reduces to -(l2 - l1) <G^{l1} xi, G^{l2} xi>; returned so that
// Q_{l1} = Q_{l2} + correction can be tested.
EstimateWithError lambda_shift_correction(const Charge& charge,
                                          const SystemParams& p1,
                                          const SystemParams& p2,
                                          const McSpec& mc);

}  // namespace contactgas
