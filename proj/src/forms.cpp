#include "contactgas/forms.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "contactgas/green.hpp"
#include "contactgas/quadrature.hpp"

namespace contactgas {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 block(std::span<const double> x, int b) {
  return {x[3 * b], x[3 * b + 1], x[3 * b + 2]};
}

struct SlotStats {
  std::vector<double> min_width;   // broadest momentum envelope
  std::vector<double> max_width;   // broadest position envelope
  std::vector<Vec3> mean_shift;
};

SlotStats slot_stats(const Charge& charge) {
  SlotStats st;
  const int s = charge.slots();
  st.min_width.assign(s, 1e300);
  st.max_width.assign(s, 0.0);
  st.mean_shift.assign(s, Vec3{});
  double total = 0.0;
  for (const auto& t : charge.terms()) {
    const double w = std::abs(t.amp);
    total += w;
    for (int i = 0; i < s; ++i) {
      st.min_width[i] = std::min(st.min_width[i], t.slots[i].width);
      st.max_width[i] = std::max(st.max_width[i], t.slots[i].width);
      st.mean_shift[i] += w * t.slots[i].shift;
    }
  }
  for (int i = 0; i < s; ++i) st.mean_shift[i] = st.mean_shift[i] / total;
  return st;
}

std::shared_ptr<Proposal> widened(std::vector<Vec3> means,
                                  std::vector<double> sigmas,
                                  double wide_factor = 2.5,
                                  double wide_weight = 0.2) {
  auto narrow = std::make_shared<GaussianBlockProposal>(means, sigmas);
  for (auto& s : sigmas) s *= wide_factor;
  auto wide = std::make_shared<GaussianBlockProposal>(std::move(means),
                                                      std::move(sigmas));
  return std::make_shared<MixtureProposal>(
      std::vector<double>{1.0 - wide_weight, wide_weight},
      std::vector<std::shared_ptr<Proposal>>{narrow, wide});
}

// Cholesky factor of a small SPD matrix (n <= 4)
struct SmallChol {
  double l[4][4] = {};
  int n = 0;
  double log_det = 0.0;  // log det of the original matrix

  void factor(const double m[4][4], int dim) {
    n = dim;
    log_det = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = m[i][j];
        for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
        if (i == j) {
          l[i][i] = std::sqrt(s);
          log_det += 2.0 * std::log(l[i][i]);
        } else {
          l[i][j] = s / l[j][j];
        }
      }
    }
  }
  // solve (L L^T) x = b in place
  void solve(double* b) const {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < i; ++k) b[i] -= l[i][k] * b[k];
      b[i] /= l[i][i];
    }
    for (int i = n - 1; i >= 0; --i) {
      for (int k = i + 1; k < n; ++k) b[i] -= l[k][i] * b[k];
      b[i] /= l[i][i];
    }
  }
  // x = mean-part + L^{-T} u  (sampling from N(mean, M^{-1}))
  void apply_inv_t(double* u) const {
    for (int i = n - 1; i >= 0; --i) {
      for (int k = i + 1; k < n; ++k) u[i] -= l[k][i] * u[k];
      u[i] /= l[i][i];
    }
  }
};

// Exact Gaussian-envelope sampler for the share1/share0 pair products: the
// integrand is a signed mixture of Gaussians in (p_1..p_N), so sampling the
// mixture leaves only the bounded rational weight.  Momentum order follows
// the integrand conventions of phi_off1 / phi_off0.
class PairProductSampler {
 public:
  PairProductSampler(const Charge& charge, PairClass cls) {
    const auto& terms = charge.terms();
    const int slots = charge.slots();
    coupled_ = cls == PairClass::share1 ? 3 : 4;
    spectators_ = slots - (cls == PairClass::share1 ? 2 : 3);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      for (std::size_t u = 0; u < terms.size(); ++u) {
        Comp c;
        c.coeff = std::conj(terms[t].amp) * terms[u].amp;
        if (std::abs(c.coeff) == 0.0) continue;
        double log_mass = 0.0;
        // w^3 prefactors of both factors
        for (int s = 0; s < slots; ++s)
          log_mass += 3.0 * std::log(terms[t].slots[s].width) +
                      3.0 * std::log(terms[u].slots[s].width);
        // coupled block quadratic form  (1/2) v^T (M x I3) v - l.v + C
        double m[4][4] = {};
        Vec3 lin[4];
        double offset = 0.0;
        auto add_factor = [&](double w, const Vec3& mu,
                              std::initializer_list<int> idx) {
          const double a = w * w;
          for (int i : idx)
            for (int j : idx) m[i][j] += a;
          for (int i : idx) lin[i] += a * mu;
          offset += 0.5 * a * mu.norm_sq();
        };
        if (cls == PairClass::share1) {
          // conj xi_t(p1+p2, p3, P) xi_u(p1+p3, p2, P)
          add_factor(terms[t].slots[0].width, terms[t].slots[0].shift, {0, 1});
          add_factor(terms[t].slots[1].width, terms[t].slots[1].shift, {2});
          add_factor(terms[u].slots[0].width, terms[u].slots[0].shift, {0, 2});
          add_factor(terms[u].slots[1].width, terms[u].slots[1].shift, {1});
        } else {
          // conj xi_t(p3+p4, p1, p2, P) xi_u(p1+p2, p3, p4, P)
          add_factor(terms[t].slots[0].width, terms[t].slots[0].shift, {2, 3});
          add_factor(terms[t].slots[1].width, terms[t].slots[1].shift, {0});
          add_factor(terms[t].slots[2].width, terms[t].slots[2].shift, {1});
          add_factor(terms[u].slots[0].width, terms[u].slots[0].shift, {0, 1});
          add_factor(terms[u].slots[1].width, terms[u].slots[1].shift, {2});
          add_factor(terms[u].slots[2].width, terms[u].slots[2].shift, {3});
        }
        c.chol.factor(m, coupled_);
        // mean = M^{-1} l, per dimension
        for (int d = 0; d < 3; ++d) {
          double b[4];
          for (int i = 0; i < coupled_; ++i)
            b[i] = d == 0 ? lin[i].x : (d == 1 ? lin[i].y : lin[i].z);
          c.chol.solve(b);
          for (int i = 0; i < coupled_; ++i) {
            if (d == 0) c.mean[i].x = b[i];
            if (d == 1) c.mean[i].y = b[i];
            if (d == 2) c.mean[i].z = b[i];
          }
        }
        double quad_at_mean = 0.0;
        for (int i = 0; i < coupled_; ++i) quad_at_mean += lin[i].dot(c.mean[i]);
        // int e^{-Q} = (2 pi)^{3 c/2} det(M)^{-3/2} e^{l.mean/2 - C}
        log_mass += 1.5 * coupled_ * std::log(2.0 * kPi) -
                    1.5 * c.chol.log_det + 0.5 * quad_at_mean - offset;
        // spectator slots: plain product Gaussians
        const int base_t = cls == PairClass::share1 ? 2 : 3;
        for (int s = 0; s < spectators_; ++s) {
          const auto& st = terms[t].slots[base_t + s];
          const auto& su = terms[u].slots[base_t + s];
          const double A = 0.5 * (st.width * st.width + su.width * su.width);
          const Vec3 v = 0.5 * (st.width * st.width * st.shift +
                                su.width * su.width * su.shift);
          const double C =
              0.5 * (st.width * st.width * st.shift.norm_sq() +
                     su.width * su.width * su.shift.norm_sq());
          c.spect_sigma.push_back(std::sqrt(0.5 / A));
          c.spect_mean.push_back(v / A);
          log_mass += 1.5 * std::log(kPi / A) + v.norm_sq() / A - C;
        }
        c.prob = std::abs(c.coeff) * std::exp(log_mass);
        total_mass_ += c.prob;
        comps_.push_back(std::move(c));
      }
    }
    for (auto& c : comps_) c.prob /= total_mass_;
  }

  int coupled() const { return coupled_; }
  int spectators() const { return spectators_; }

  // fills p (coupled + spectators entries); returns mass * phase
  std::complex<double> sample(RngStream& rng, std::span<Vec3> p) const {
    if (comps_.empty()) return {0.0, 0.0};  // identically zero charge
    double u = rng.uniform();
    std::size_t pick = comps_.size() - 1;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      if (u < comps_[i].prob) {
        pick = i;
        break;
      }
      u -= comps_[i].prob;
    }
    const Comp& c = comps_[pick];
    for (int d = 0; d < 3; ++d) {
      double g[4];
      for (int i = 0; i < coupled_; ++i) g[i] = rng.normal();
      c.chol.apply_inv_t(g);
      for (int i = 0; i < coupled_; ++i) {
        if (d == 0) p[i].x = c.mean[i].x + g[i];
        if (d == 1) p[i].y = c.mean[i].y + g[i];
        if (d == 2) p[i].z = c.mean[i].z + g[i];
      }
    }
    for (int s = 0; s < spectators_; ++s)
      p[coupled_ + s] = c.spect_mean[s] + rng.normal3(c.spect_sigma[s]);
    return total_mass_ * (c.coeff / std::abs(c.coeff));
  }

 private:
  struct Comp {
    double prob = 0.0;
    std::complex<double> coeff;
    SmallChol chol;
    Vec3 mean[4];
    std::vector<double> spect_sigma;
    std::vector<Vec3> spect_mean;
  };
  std::vector<Comp> comps_;
  double total_mass_ = 0.0;
  int coupled_ = 3;
  int spectators_ = 0;
};

// 3D Cauchy (multivariate t, 1 dof) for weight-induced power tails
class Cauchy3Proposal : public Proposal {
 public:
  explicit Cauchy3Proposal(double scale) : scale_(scale) {}
  int dim() const override { return 3; }
  void sample(RngStream& rng, std::span<double> out) const override {
    const double denom = std::abs(rng.normal());
    const double s = scale_ / std::max(denom, 1e-12);
    for (int i = 0; i < 3; ++i) out[i] = s * rng.normal();
  }
  double log_pdf(std::span<const double> x) const override {
    const double rho_sq =
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (scale_ * scale_);
    // Gamma(2) / (Gamma(1/2) pi^{3/2}) = 1/pi^2
    return -2.0 * std::log(kPi) - 3.0 * std::log(scale_) -
           2.0 * std::log1p(rho_sq);
  }

 private:
  double scale_;
};

}  // namespace

// ---- diagonal component -----------------------------------------------------

double phi_diag(const Charge& charge, const SystemParams& params) {
  return diag_moments(charge, params.lambda).sqrt_moment() / std::sqrt(2.0);
}

// ---- momentum-space pair integrals ------------------------------------------

EstimateWithError momentum_pair_integral(
    const Charge& charge, const SystemParams& params, PairClass cls,
    const std::function<double(double)>& weight, const Vec3& r_factor,
    const McSpec& mc) {
  const int n = charge.n_particles();
  const bool has_r = r_factor.norm_sq() > 0.0;

  if (cls == PairClass::same) {
    // variables: k = p1 + p2, rel = (p1 - p2)/2, p3..pN
    const SlotStats st = slot_stats(charge);
    std::vector<Vec3> means{st.mean_shift[0]};
    std::vector<double> sigmas{1.25 / st.min_width[0]};
    for (int i = 1; i < n - 1; ++i) {
      means.push_back(st.mean_shift[i]);
      sigmas.push_back(1.25 / st.min_width[i]);
    }
    auto base = widened(std::move(means), std::move(sigmas));
    const double cauchy_scale = std::sqrt(params.lambda) + 0.5;
    auto rel = std::make_shared<Cauchy3Proposal>(cauchy_scale);
    ProductProposal prop({base, rel});
    const double lambda = params.lambda;
    auto f = [&charge, weight, lambda, n](std::span<const double> x)
        -> std::complex<double> {
      thread_local std::vector<Vec3> args;
      args.resize(static_cast<std::size_t>(n - 1));
      double psq = 0.0;
      for (int i = 0; i < n - 1; ++i) args[i] = block(x, i);
      const Vec3 rel = block(x, n - 1);
      psq = 0.5 * args[0].norm_sq() + 2.0 * rel.norm_sq();
      for (int i = 1; i < n - 1; ++i) psq += args[i].norm_sq();
      const std::complex<double> v = charge.fourier(args);
      return std::norm(v) * weight(psq);
    };
    return integrate_mc(f, prop, mc);
  }

  // share1/share0: sample the exact signed Gaussian mixture of the pair
  // product; only the bounded rational weight remains, so the estimator
  // variance does not depend on widths or shifts
  PairProductSampler sampler(charge, cls);
  const int nv = sampler.coupled() + sampler.spectators();
  const int ca = cls == PairClass::share1 ? 0 : 2;  // cos factor pair
  auto draw = [&sampler, &weight, nv, ca, r_factor,
               has_r](RngStream& rng) -> std::complex<double> {
    thread_local std::vector<Vec3> p;
    p.resize(static_cast<std::size_t>(nv));
    std::complex<double> w = sampler.sample(rng, p);
    double psq = 0.0;
    for (const Vec3& v : p) psq += v.norm_sq();
    w *= weight(psq);
    if (has_r) w *= std::cos(0.5 * r_factor.dot(p[ca] - p[ca + 1]));
    return w;
  };
  return integrate_mc_draws_adaptive(draw, mc);
}

EstimateWithError phi_off1(const Charge& charge, const SystemParams& params,
                           const McSpec& mc) {
  const int n = charge.n_particles();
  const double lambda = params.lambda;
  EstimateWithError est = momentum_pair_integral(
      charge, params, PairClass::share1,
      [lambda](double psq) { return 1.0 / (psq + lambda); }, Vec3{}, mc);
  const double pref = -2.0 * (n - 2) / (kPi * kPi);
  est.mean *= pref;
  est.stderr_re *= std::abs(pref);
  est.stderr_im *= std::abs(pref);
  return est;
}

EstimateWithError phi_off0(const Charge& charge, const SystemParams& params,
                           const McSpec& mc) {
  const int n = charge.n_particles();
  if (n == 3) {
    EstimateWithError zero;
    zero.seed = mc.seed;
    return zero;  // (N-2)(N-3) = 0
  }
  const double lambda = params.lambda;
  EstimateWithError est = momentum_pair_integral(
      charge, params, PairClass::share0,
      [lambda](double psq) { return 1.0 / (psq + lambda); }, Vec3{}, mc);
  const double pref = -(n - 2.0) * (n - 3.0) / (2.0 * kPi * kPi);
  est.mean *= pref;
  est.stderr_re *= std::abs(pref);
  est.stderr_im *= std::abs(pref);
  return est;
}

// ---- position-space kernels -------------------------------------------------

namespace {

// int K(|x_a - x_b|) |xi|^2 over all slots.  Samples the exact |xi|^2
// position mixture except for the (a, b) relative coordinate, whose radial
// density is replaced by the neutralized rho e^{-rho^2/(2S)}; the Gaussian /
// neutralized ratio cancels the 1/rho of Coulomb-type kernels, so weights
// stay bounded for every charge in the family.
class SlotPairKernelSampler {
 public:
  SlotPairKernelSampler(const Charge& charge, int slot_a, int slot_b)
      : slot_a_(slot_a), slot_b_(slot_b), slots_(charge.slots()) {
    const auto& terms = charge.terms();
    for (std::size_t t = 0; t < terms.size(); ++t) {
      for (std::size_t u = 0; u < terms.size(); ++u) {
        Comp c;
        c.coeff = std::conj(terms[t].amp) * terms[u].amp;
        if (std::abs(c.coeff) == 0.0) continue;
        double log_mass = 0.0;
        c.sigma.resize(slots_);
        c.phase.resize(slots_);
        for (int s = 0; s < slots_; ++s) {
          const double w1 = terms[t].slots[s].width;
          const double w2 = terms[u].slots[s].width;
          const double beta = 0.5 / (w1 * w1) + 0.5 / (w2 * w2);
          c.sigma[s] = std::sqrt(0.5 / beta);
          c.phase[s] = terms[u].slots[s].shift - terms[t].slots[s].shift;
          log_mass += 1.5 * std::log(kPi / beta);
        }
        const double sa = c.sigma[slot_a_], sb = c.sigma[slot_b_];
        c.rel_var = sa * sa + sb * sb;
        c.cond_slope = (sa * sa - sb * sb) / (2.0 * c.rel_var);
        c.cond_sigma = sa * sb / std::sqrt(c.rel_var);
        c.prob = std::abs(c.coeff) * std::exp(log_mass);
        total_mass_ += c.prob;
        comps_.push_back(std::move(c));
      }
    }
    for (auto& c : comps_) c.prob /= total_mass_;
  }

  // draws the full position set; returns weight such that E[w K(rho)]
  // estimates the integral (the returned rho is |x_a - x_b|)
  std::complex<double> sample(RngStream& rng, std::span<Vec3> xs,
                              double& rho) const {
    if (comps_.empty()) {
      rho = 1.0;
      return {0.0, 0.0};
    }
    double u = rng.uniform();
    std::size_t pick = comps_.size() - 1;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      if (u < comps_[i].prob) {
        pick = i;
        break;
      }
      u -= comps_[i].prob;
    }
    const Comp& c = comps_[pick];
    const double S = c.rel_var;
    // neutralized radius: p(r) = r e^{-r^2/(2S)} / S
    const double g = rng.gamma_variate(1.0);
    const double r = std::sqrt(2.0 * S * g);
    const Vec3 rel = r * rng.unit_vector();
    // center conditional on rel, then the exact Gaussians elsewhere
    const Vec3 center = c.cond_slope * rel + rng.normal3(c.cond_sigma);
    xs[slot_a_] = center + 0.5 * rel;
    xs[slot_b_] = center - 0.5 * rel;
    double phase = c.phase[slot_a_].dot(xs[slot_a_]) +
                   c.phase[slot_b_].dot(xs[slot_b_]);
    for (int s = 0; s < slots_; ++s) {
      if (s == slot_a_ || s == slot_b_) continue;
      xs[s] = rng.normal3(c.sigma[s]);
      phase += c.phase[s].dot(xs[s]);
    }
    rho = r;
    // gaussian-to-neutralized density ratio: r sqrt(2 / (pi S))
    const double ratio = r * std::sqrt(2.0 / (kPi * S));
    return total_mass_ * ratio * (c.coeff / std::abs(c.coeff)) *
           std::polar(1.0, phase);
  }

 private:
  struct Comp {
    double prob = 0.0;
    std::complex<double> coeff;
    std::vector<double> sigma;
    std::vector<Vec3> phase;
    double rel_var = 1.0, cond_slope = 0.0, cond_sigma = 1.0;
  };
  int slot_a_, slot_b_, slots_;
  std::vector<Comp> comps_;
  double total_mass_ = 0.0;
};

EstimateWithError slot_pair_kernel_integral(
    const Charge& charge, int slot_a, int slot_b,
    const std::function<double(double)>& kernel, const McSpec& mc) {
  SlotPairKernelSampler sampler(charge, slot_a, slot_b);
  const int slots = charge.slots();
  auto draw = [&sampler, &kernel, slots](RngStream& rng)
      -> std::complex<double> {
    thread_local std::vector<Vec3> xs;
    xs.resize(static_cast<std::size_t>(slots));
    double rho = 0.0;
    const std::complex<double> w = sampler.sample(rng, xs, rho);
    if (w == std::complex<double>(0.0, 0.0)) return w;
    return w * kernel(rho);
  };
  return integrate_mc_draws_adaptive(draw, mc);
}

}  // namespace

RegParts phi_reg(const Charge& charge, const SystemParams& params,
                 const McSpec& mc) {
  const int n = charge.n_particles();
  RegParts out;
  std::vector<double> unit(charge.slots(), 1.0);
  ChargeMoments m(charge, unit, 0.0);
  out.reg2.value = params.alpha0 * m.l2();
  out.reg2.error = 0.0;
  out.reg2.exact = true;

  const ThetaProfile& theta = params.theta;
  if (params.gamma == 0.0) {
    out.reg3 = EstimateWithError{};
    out.reg4 = EstimateWithError{};
    return out;
  }
  auto kern = [&theta](double rho) { return theta.eval(rho) / rho; };
  out.reg3 = slot_pair_kernel_integral(charge, 0, 1, kern, mc);
  const double pref3 = (n - 2.0) * params.gamma;
  out.reg3.mean *= pref3;
  out.reg3.stderr_re *= pref3;
  out.reg3.stderr_im *= pref3;
  if (n >= 4) {
    out.reg4 = slot_pair_kernel_integral(charge, 1, 2, kern,
                                         mc.with_seed_offset(7));
    const double pref4 = 0.25 * (n - 2.0) * (n - 3.0) * params.gamma;
    out.reg4.mean *= pref4;
    out.reg4.stderr_re *= pref4;
    out.reg4.stderr_im *= pref4;
  } else {
    out.reg4 = EstimateWithError{};  // exact zero prefactor
  }
  return out;
}

FormBreakdown phi_total(const Charge& charge, const SystemParams& params,
                        const McSpec& mc) {
  const int n = charge.n_particles();
  FormBreakdown fb;
  fb.diag.value = phi_diag(charge, params);
  fb.diag.error = 0.0;
  fb.diag.exact = true;

  auto track = [&fb](const EstimateWithError& e) {
    if (e.stderr_im > 0.0)
      fb.worst_imag_sigma = std::max(fb.worst_imag_sigma,
                                     std::abs(e.mean.imag()) / e.stderr_im);
  };
  EstimateWithError o1 = phi_off1(charge, params, mc.with_seed_offset(1));
  EstimateWithError o0 = phi_off0(charge, params, mc.with_seed_offset(2));
  RegParts reg = phi_reg(charge, params, mc.with_seed_offset(3));
  track(o1);
  track(o0);
  track(reg.reg3);
  track(reg.reg4);

  fb.off1 = {o1.mean.real(), o1.stderr_re, false};
  fb.off0 = {o0.mean.real(), o0.stderr_re, n == 3};
  fb.reg2 = reg.reg2;
  fb.reg3 = {reg.reg3.mean.real(), reg.reg3.stderr_re, params.gamma == 0.0};
  fb.reg4 = {reg.reg4.mean.real(), reg.reg4.stderr_re,
             n == 3 || params.gamma == 0.0};

  const double pref = 4.0 * kPi * n * (n - 1.0);
  fb.total.value = pref * (fb.diag.value + fb.off0.value + fb.off1.value +
                           fb.reg2.value + fb.reg3.value + fb.reg4.value);
  fb.total.error = pref * std::sqrt(fb.off0.error * fb.off0.error +
                                    fb.off1.error * fb.off1.error +
                                    fb.reg3.error * fb.reg3.error +
                                    fb.reg4.error * fb.reg4.error);
  fb.total.exact = false;
  return fb;
}

// ---- position-space representations ----------------------------------------

EstimateWithError phi_diag_pos(const Charge& charge, const SystemParams& params,
                               const McSpec& mc) {
  const int n = charge.n_particles();
  const int slots = charge.slots();
  const SlotStats st = slot_stats(charge);
  const double w = charge.max_width();

  std::vector<std::shared_ptr<Proposal>> parts;
  {
    std::vector<Vec3> means(slots, Vec3{});
    std::vector<double> sigmas;
    for (int s = 0; s < slots; ++s) sigmas.push_back(1.15 * st.max_width[s]);
    parts.push_back(std::make_shared<GaussianBlockProposal>(
        std::move(means), std::move(sigmas)));
  }
  // the difference form leaves a |xi(a)|^2 term with only the exponential
  // kernel tail in zeta, so the mixture needs an exponential component
  const int zdim = 3 * slots;
  parts.push_back(std::make_shared<MixtureProposal>(
      std::vector<double>{0.55, 0.25, 0.2},
      std::vector<std::shared_ptr<Proposal>>{
          std::make_shared<RadialProposal>(zdim, 0.0, 1.2 * w),
          std::make_shared<RadialProposal>(zdim, 0.0, 3.0 * w),
          std::make_shared<RadialExpProposal>(
              zdim, 0.65 * std::sqrt(params.lambda))}));
  ProductProposal prop(std::move(parts));

  const double lambda = params.lambda;
  auto f = [&charge, lambda, n, slots](std::span<const double> x)
      -> std::complex<double> {
    thread_local std::vector<Vec3> a, b;
    a.resize(static_cast<std::size_t>(slots));
    b.resize(static_cast<std::size_t>(slots));
    double dsq = 0.0;
    for (int s = 0; s < slots; ++s) {
      a[s] = block(x, s);
      const Vec3 z = block(x, slots + s);
      b[s] = a[s] + z;
      dsq += (s == 0 ? 2.0 : 1.0) * z.norm_sq();
    }
    if (!(dsq > 0.0)) return {0.0, 0.0};
    const std::complex<double> diff =
        charge.position(b) - charge.position(a);
    const double g = green_kernel_log(lambda, std::sqrt(dsq), n);
    return std::norm(diff) * std::exp(g);
  };
  EstimateWithError est = integrate_mc(f, prop, mc);
  std::vector<double> unit(slots, 1.0);
  ChargeMoments m(charge, unit, 0.0);
  est.mean = 4.0 * kPi * est.mean + std::sqrt(0.5 * lambda) * m.l2();
  est.stderr_re *= 4.0 * kPi;
  est.stderr_im *= 4.0 * kPi;
  return est;
}

namespace {

// shared machinery for the off-diagonal position representations: free block
// plus a radially neutralized relative block eta with d = |eta|
EstimateWithError off_pos_integral(
    const Charge& charge, const SystemParams& params, bool share1,
    bool difference_form, const McSpec& mc) {
  const int n = charge.n_particles();
  const int slots = charge.slots();
  const SlotStats st = slot_stats(charge);
  const double w = charge.max_width();
  const double lambda = params.lambda;

  // share1: free (x, X[2..]); eta = (r1, r1 - s, r3, R), dim 3N
  // share0: free (x, y, X[3..]); eta = (a1, a2, a3, a4, R), dim 3N
  const int free_blocks = share1 ? 1 + (slots - 2) : 2 + (slots - 3);
  const int eta_dim = 3 * n;

  std::vector<std::shared_ptr<Proposal>> parts;
  {
    std::vector<Vec3> means(free_blocks, Vec3{});
    std::vector<double> sigmas;
    sigmas.push_back(1.15 * st.max_width[0]);
    if (!share1) sigmas.push_back(1.15 * st.max_width[0]);
    for (int s = share1 ? 2 : 3; s < slots; ++s)
      sigmas.push_back(1.15 * st.max_width[s]);
    parts.push_back(std::make_shared<GaussianBlockProposal>(
        std::move(means), std::move(sigmas)));
  }
  parts.push_back(std::make_shared<MixtureProposal>(
      std::vector<double>{0.65, 0.35},
      std::vector<std::shared_ptr<Proposal>>{
          std::make_shared<RadialProposal>(eta_dim, 1.0, 1.6 * w),
          std::make_shared<RadialProposal>(eta_dim, 1.0, 3.2 * w)}));
  ProductProposal prop(std::move(parts));

  auto f = [&charge, lambda, n, slots, share1, difference_form,
            free_blocks](std::span<const double> x) -> std::complex<double> {
    thread_local std::vector<Vec3> left, right;
    left.resize(static_cast<std::size_t>(slots));
    right.resize(static_cast<std::size_t>(slots));
    const int eo = 3 * free_blocks;  // eta offset in doubles
    auto eta = [&](int b) {
      return Vec3{x[eo + 3 * b], x[eo + 3 * b + 1], x[eo + 3 * b + 2]};
    };
    double dsq = 0.0;
    for (int b = 0; b < n; ++b) dsq += eta(b).norm_sq();
    if (!(dsq > 0.0)) return {0.0, 0.0};

    if (share1) {
      const Vec3 xx = block(x, 0);
      const Vec3 r1 = eta(0);
      const Vec3 s = r1 - eta(1);
      const Vec3 r3 = eta(2);
      // left = xi(x, x + s, X), right = xi(x + r1, x + r3, X + R)
      left[0] = xx;
      left[1] = xx + s;
      right[0] = xx + r1;
      right[1] = xx + r3;
      for (int k = 2; k < slots; ++k) {
        const Vec3 Xk = block(x, 1 + (k - 2));
        left[k] = Xk;
        right[k] = Xk + eta(3 + (k - 2));
      }
    } else {
      const Vec3 xx = block(x, 0);
      const Vec3 yy = block(x, 1);
      // left = xi(x, y + a1, y + a2, X), right = xi(y, x + a3, x + a4, X + R)
      left[0] = xx;
      left[1] = yy + eta(0);
      left[2] = yy + eta(1);
      right[0] = yy;
      right[1] = xx + eta(2);
      right[2] = xx + eta(3);
      for (int k = 3; k < slots; ++k) {
        const Vec3 Xk = block(x, 2 + (k - 3));
        left[k] = Xk;
        right[k] = Xk + eta(4 + (k - 3));
      }
    }
    const double g = green_kernel_log(lambda, std::sqrt(dsq), n);
    if (difference_form) {
      const std::complex<double> diff =
          charge.position(right) - charge.position(left);
      return std::norm(diff) * std::exp(g);
    }
    return std::conj(charge.position(left)) * charge.position(right) *
           std::exp(g);
  };
  return integrate_mc(f, prop, mc);
}

}  // namespace

EstimateWithError phi_off1_pos(const Charge& charge, const SystemParams& params,
                               const McSpec& mc) {
  const int n = charge.n_particles();
  EstimateWithError est = off_pos_integral(charge, params, true, false, mc);
  const double pref = -16.0 * kPi * (n - 2.0);
  est.mean *= pref;
  est.stderr_re *= std::abs(pref);
  est.stderr_im *= std::abs(pref);
  return est;
}

EstimateWithError phi_off0_pos(const Charge& charge, const SystemParams& params,
                               const McSpec& mc) {
  const int n = charge.n_particles();
  if (n == 3) return {};
  EstimateWithError est = off_pos_integral(charge, params, false, false, mc);
  const double pref = -4.0 * kPi * (n - 2.0) * (n - 3.0);
  est.mean *= pref;
  est.stderr_re *= std::abs(pref);
  est.stderr_im *= std::abs(pref);
  return est;
}

// ---- splits -----------------------------------------------------------------

SplitParts phi_split_off1(const Charge& charge, const SystemParams& params,
                          const McSpec& mc) {
  const int n = charge.n_particles();
  const double rate = std::sqrt(0.5 * params.lambda);
  SplitParts out;
  out.negative_part = slot_pair_kernel_integral(
      charge, 0, 1,
      [rate](double rho) { return std::exp(-rate * rho) / rho; }, mc);
  const double pref_neg = -2.0 * (n - 2.0);
  out.negative_part.mean *= pref_neg;
  out.negative_part.stderr_re *= std::abs(pref_neg);
  out.negative_part.stderr_im *= std::abs(pref_neg);

  out.positive_part =
      off_pos_integral(charge, params, true, true, mc.with_seed_offset(11));
  const double pref_pos = 8.0 * kPi * (n - 2.0);
  out.positive_part.mean *= pref_pos;
  out.positive_part.stderr_re *= pref_pos;
  out.positive_part.stderr_im *= pref_pos;
  return out;
}

SplitParts phi_split_off0(const Charge& charge, const SystemParams& params,
                          const McSpec& mc) {
  const int n = charge.n_particles();
  SplitParts out;
  if (n == 3) return out;
  const double rate = std::sqrt(0.5 * params.lambda);
  out.negative_part = slot_pair_kernel_integral(
      charge, 1, 2,
      [rate](double rho) { return std::exp(-rate * rho) / rho; }, mc);
  const double pref_neg = -0.5 * (n - 2.0) * (n - 3.0);
  out.negative_part.mean *= pref_neg;
  out.negative_part.stderr_re *= std::abs(pref_neg);
  out.negative_part.stderr_im *= std::abs(pref_neg);

  out.positive_part =
      off_pos_integral(charge, params, false, true, mc.with_seed_offset(11));
  const double pref_pos = 2.0 * kPi * (n - 2.0) * (n - 3.0);
  out.positive_part.mean *= pref_pos;
  out.positive_part.stderr_re *= pref_pos;
  out.positive_part.stderr_im *= pref_pos;
  return out;
}

// ---- small-separation expressions -------------------------------------------

double phi_diag_limit_expr(const Charge& charge, const SystemParams& params,
                           double r) {
  if (!(r > 0.0)) throw std::domain_error("phi_diag_limit_expr: r must be > 0");
  ChargeMoments m = diag_moments(charge, params.lambda);
  return (m.l2() - m.exp_moment(r / std::sqrt(2.0))) / r;
}

EstimateWithError phi_off1_limit_expr(const Charge& charge,
                                      const SystemParams& params, double r,
                                      const McSpec& mc) {
  const int n = charge.n_particles();
  const double lambda = params.lambda;
  EstimateWithError est = momentum_pair_integral(
      charge, params, PairClass::share1,
      [lambda](double psq) { return 1.0 / (psq + lambda); },
      Vec3{r, 0.0, 0.0}, mc);
  const double pref = -2.0 * (n - 2.0) / (kPi * kPi);
  est.mean *= pref;
  est.stderr_re *= std::abs(pref);
  est.stderr_im *= std::abs(pref);
  return est;
}

EstimateWithError phi_off0_limit_expr(const Charge& charge,
                                      const SystemParams& params, double r,
                                      const McSpec& mc) {
  const int n = charge.n_particles();
  if (n == 3) return {};
  const double lambda = params.lambda;
  EstimateWithError est = momentum_pair_integral(
      charge, params, PairClass::share0,
      [lambda](double psq) { return 1.0 / (psq + lambda); },
      Vec3{r, 0.0, 0.0}, mc);
  const double pref = -(n - 2.0) * (n - 3.0) / (2.0 * kPi * kPi);
  est.mean *= pref;
  est.stderr_re *= std::abs(pref);
  est.stderr_im *= std::abs(pref);
  return est;
}

// ---- bounds -----------------------------------------------------------------

LowerBoundReport verify_lower_bound(std::span<const Charge> charges,
                                    const SystemParams& params,
                                    const McSpec& mc) {
  const StabilityConstants sc = compute_constants(params);
  if (!sc.coercivity_guaranteed)
    throw std::invalid_argument(
        "verify_lower_bound: coercivity not guaranteed below gamma_c");
  const int n = params.n_particles;
  const double pref = 4.0 * kPi * n * (n - 1.0);
  const double cap = sc.lambda_cap;
  const double c_b =
      std::isinf(params.b)
          ? 0.0
          : (n + 1.0) * (n - 2.0) * params.gamma / (4.0 * params.b);

  LowerBoundReport report;
  std::uint64_t idx = 0;
  for (const Charge& xi : charges) {
    LowerBoundCase lc;
    lc.breakdown = phi_total(xi, params, mc.with_seed_offset(100 + idx));
    std::vector<double> unit(xi.slots(), 1.0);
    lc.l2 = ChargeMoments(xi, unit, 0.0).l2();
    lc.bound_norm =
        pref *
        (std::sqrt(0.5 * params.lambda) * std::sqrt(1.0 - cap * cap) +
         params.alpha0 - c_b) *
        lc.l2;
    const double alpha_minus = std::max(0.0, -params.alpha0);
    lc.bound_diag_factor = 1.0 - cap -
                           std::sqrt(2.0 / params.lambda) * alpha_minus -
                           c_b * std::sqrt(2.0 / params.lambda);
    lc.bound_diag = pref * lc.bound_diag_factor * lc.breakdown.diag.value;
    const double err = std::max(lc.breakdown.total.error, 1e-300);
    lc.margin_sigma = (lc.breakdown.total.value - lc.bound_norm) / err;
    lc.pass = lc.breakdown.total.value >= lc.bound_norm - 3.0 * err;
    if (!lc.pass) ++report.violations;
    if (report.cases.empty() || lc.margin_sigma < report.worst_margin_sigma)
      report.worst_margin_sigma = lc.margin_sigma;
    report.cases.push_back(std::move(lc));
    ++idx;
  }
  return report;
}

// ---- energy form ------------------------------------------------------------

namespace {

// <w, G^lambda xi> in momentum space for the centered Gaussian regular part
EstimateWithError regular_potential_pairing(const RegularPart& w,
                                            const Charge& charge,
                                            const SystemParams& params,
                                            const McSpec& mc) {
  const int n = charge.n_particles();
  const SlotStats st = slot_stats(charge);
  std::vector<Vec3> means(n, Vec3{});
  std::vector<double> sigmas(n, 1.25 / w.width);
  // tighten the first two blocks toward the charge envelope of p1 + p2
  for (int i = 2; i < n; ++i)
    sigmas[i] = std::min(sigmas[i], 1.25 / st.min_width[i - 1]);
  auto prop = widened(std::move(means), std::move(sigmas));
  const double lambda = params.lambda;
  const double pairs = 0.5 * n * (n - 1.0);
  const double wamp = w.amp;
  const double wwidth = w.width;
  auto f = [&charge, lambda, n, wamp, wwidth,
            pairs](std::span<const double> x) -> std::complex<double> {
    thread_local std::vector<Vec3> args;
    args.resize(static_cast<std::size_t>(n - 1));
    double psq = 0.0;
    for (int i = 0; i < n; ++i) psq += block(x, i).norm_sq();
    args[0] = block(x, 0) + block(x, 1);
    for (int i = 2; i < n; ++i) args[i - 1] = block(x, i);
    const double what =
        wamp * std::pow(wwidth, 3.0 * n) * std::exp(-0.5 * wwidth * wwidth * psq);
    return pairs * std::sqrt(8.0 / kPi) * what * charge.fourier(args) /
           (psq + lambda);
  };
  return integrate_mc(f, *prop, mc);
}

}  // namespace

EstimateWithError potential_pair_assembly(
    const Charge& charge, const SystemParams& params,
    const std::function<double(double)>& wfun, const McSpec& mc) {
  const int n = charge.n_particles();
  EstimateWithError same = momentum_pair_integral(
      charge, params, PairClass::same, wfun, Vec3{}, mc);
  EstimateWithError sh1 = momentum_pair_integral(
      charge, params, PairClass::share1, wfun, Vec3{}, mc.with_seed_offset(5));
  EstimateWithError sh0;
  if (n >= 4)
    sh0 = momentum_pair_integral(charge, params, PairClass::share0, wfun,
                                 Vec3{}, mc.with_seed_offset(6));
  const double pairs = 0.5 * n * (n - 1.0);
  const double c_same = pairs;
  const double c_sh1 = pairs * 2.0 * (n - 2.0);
  const double c_sh0 = pairs * 0.5 * (n - 2.0) * (n - 3.0);
  EstimateWithError out;
  out.mean = (8.0 / kPi) * (c_same * same.mean + c_sh1 * sh1.mean +
                            c_sh0 * sh0.mean);
  out.stderr_re =
      (8.0 / kPi) * std::sqrt(c_same * c_same * same.stderr_re * same.stderr_re +
                              c_sh1 * c_sh1 * sh1.stderr_re * sh1.stderr_re +
                              c_sh0 * c_sh0 * sh0.stderr_re * sh0.stderr_re);
  out.stderr_im =
      (8.0 / kPi) * std::sqrt(c_same * c_same * same.stderr_im * same.stderr_im +
                              c_sh1 * c_sh1 * sh1.stderr_im * sh1.stderr_im +
                              c_sh0 * c_sh0 * sh0.stderr_im * sh0.stderr_im);
  out.samples_used = same.samples_used + sh1.samples_used + sh0.samples_used;
  out.seed = mc.seed;
  return out;
}

EstimateWithError potential_norm_sq(const Charge& charge,
                                    const SystemParams& params,
                                    const McSpec& mc) {
  const double lambda = params.lambda;
  return potential_pair_assembly(
      charge, params,
      [lambda](double psq) {
        const double d = psq + lambda;
        return 1.0 / (d * d);
      },
      mc);
}

EstimateWithError lambda_shift_correction(const Charge& charge,
                                          const SystemParams& p1,
                                          const SystemParams& p2,
                                          const McSpec& mc) {
  const double l1 = p1.lambda, l2 = p2.lambda;
  EstimateWithError cross = potential_pair_assembly(
      charge, p1,
      [l1, l2](double psq) { return 1.0 / ((psq + l1) * (psq + l2)); }, mc);
  cross.mean *= -(l2 - l1);
  cross.stderr_re *= std::abs(l2 - l1);
  cross.stderr_im *= std::abs(l2 - l1);
  return cross;
}

EstimateWithError energy_form(const RegularPart& w, const Charge& charge,
                              const SystemParams& params, const McSpec& mc) {
  const int n = charge.n_particles();
  const double lambda = params.lambda;
  // ||w||^2 and ||grad w||^2 in closed form
  const double norm_w =
      w.amp * w.amp * std::pow(std::sqrt(kPi) * w.width, 3.0 * n);
  const double grad_w = norm_w * 1.5 * n / (w.width * w.width);

  FormBreakdown fb = phi_total(charge, params, mc);
  EstimateWithError pairing =
      regular_potential_pairing(w, charge, params, mc.with_seed_offset(21));
  EstimateWithError gnorm =
      potential_norm_sq(charge, params, mc.with_seed_offset(22));

  // Q = ||grad w||^2 - 2 lambda Re<w, G xi> - lambda ||G xi||^2 + Phi[xi]
  EstimateWithError out;
  out.mean = grad_w - 2.0 * lambda * pairing.mean.real() -
             lambda * gnorm.mean.real() + fb.total.value;
  out.stderr_re = std::sqrt(
      4.0 * lambda * lambda * pairing.stderr_re * pairing.stderr_re +
      lambda * lambda * gnorm.stderr_re * gnorm.stderr_re +
      fb.total.error * fb.total.error);
  out.seed = mc.seed;
  out.samples_used =
      pairing.samples_used + gnorm.samples_used;
  return out;
}

// ---- Hardy-Rellich ----------------------------------------------------------

HardyRellichResult hardy_rellich_check(
    std::span<const std::pair<double, double>> mixture) {
  auto u_val = [&](double r) {
    double acc = 0.0;
    for (const auto& [c, w] : mixture)
      acc += c * std::exp(-0.5 * r * r / (w * w));
    return acc;
  };
  auto u_hat = [&](double k) {
    double acc = 0.0;
    for (const auto& [c, w] : mixture)
      acc += c * w * w * w * std::exp(-0.5 * w * w * k * k);
    return acc;
  };
  double wmax = 0.0;
  for (const auto& [c, w] : mixture) wmax = std::max(wmax, w);
  HardyRellichResult out;
  QuadResult lhs = integrate_half_line(
      [&](double r) {
        const double u = u_val(r);
        return 4.0 * kPi * r * u * u;
      },
      1e-10, wmax);
  QuadResult rhs = integrate_half_line(
      [&](double k) {
        const double uh = u_hat(k);
        return 0.5 * kPi * 4.0 * kPi * k * k * k * uh * uh;
      },
      1e-10, 1.0 / wmax);
  out.lhs = lhs.value;
  out.rhs = rhs.value;
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-6);
  return out;
}

}  // namespace contactgas
