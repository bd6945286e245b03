#include "contactgas/charge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <stdexcept>

#include "contactgas/quadrature.hpp"

namespace contactgas {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kJetOrder = 10;

using Jet = std::array<double, kJetOrder + 1>;

Jet jet_zero() {
  Jet j{};
  return j;
}

void jet_add(Jet& a, const Jet& b) {
  for (int k = 0; k <= kJetOrder; ++k) a[k] += b[k];
}

// log(A + a u) as a series in u
Jet jet_log_linear(double A, double a) {
  Jet j = jet_zero();
  j[0] = std::log(A);
  const double r = a / A;
  double p = 1.0;
  for (int k = 1; k <= kJetOrder; ++k) {
    p *= -r;
    j[k] = -p / k;
  }
  return j;
}

// 1/(A + a u) as a series in u
Jet jet_recip_linear(double A, double a) {
  Jet j = jet_zero();
  const double r = -a / A;
  double p = 1.0 / A;
  for (int k = 0; k <= kJetOrder; ++k) {
    j[k] = p;
    p *= r;
  }
  return j;
}

// exp of a jet, standard recurrence
Jet jet_exp(const Jet& f) {
  Jet g = jet_zero();
  g[0] = std::exp(f[0]);
  for (int k = 1; k <= kJetOrder; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += j * f[j] * g[k - j];
    g[k] = acc / k;
  }
  return g;
}

}  // namespace

Charge::Charge(int n_particles, std::vector<ChargeTerm> terms, bool symmetrized)
    : n_particles_(n_particles), terms_(std::move(terms)),
      symmetrized_(symmetrized) {
  if (n_particles_ < 3)
    throw std::invalid_argument("charge: n_particles must be >= 3");
  for (const auto& t : terms_) {
    if (static_cast<int>(t.slots.size()) != slots())
      throw std::invalid_argument("charge: term slot count mismatch");
    for (const auto& s : t.slots)
      if (!(s.width > 0.0))
        throw std::invalid_argument("charge: widths must be positive");
  }
}

std::complex<double> Charge::fourier(std::span<const Vec3> kappas) const {
  std::complex<double> acc{0.0, 0.0};
  for (const auto& t : terms_) {
    double log_v = 0.0;
    for (std::size_t s = 0; s < t.slots.size(); ++s) {
      const double w = t.slots[s].width;
      const Vec3 d = kappas[s] - t.slots[s].shift;
      log_v += 3.0 * std::log(w) - 0.5 * w * w * d.norm_sq();
    }
    acc += t.amp * std::exp(log_v);
  }
  return acc;
}

std::complex<double> Charge::position(std::span<const Vec3> xs) const {
  std::complex<double> acc{0.0, 0.0};
  for (const auto& t : terms_) {
    double log_env = 0.0;
    double phase = 0.0;
    for (std::size_t s = 0; s < t.slots.size(); ++s) {
      const double w = t.slots[s].width;
      log_env += -0.5 * xs[s].norm_sq() / (w * w);
      phase += t.slots[s].shift.dot(xs[s]);
    }
    acc += t.amp * std::polar(std::exp(log_env), phase);
  }
  return acc;
}

bool Charge::centered() const {
  for (const auto& t : terms_)
    for (const auto& s : t.slots)
      if (s.shift.norm_sq() != 0.0) return false;
  return true;
}

Charge Charge::dilated(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("dilated: s must be > 0");
  std::vector<ChargeTerm> out = terms_;
  const double amp_factor = std::pow(s, 1.5 * slots());
  for (auto& t : out) {
    t.amp *= amp_factor;
    for (auto& sl : t.slots) {
      sl.width /= s;
      sl.shift = sl.shift * s;
    }
  }
  return Charge(n_particles_, std::move(out), symmetrized_);
}

double Charge::min_width(int slot) const {
  double w = terms_[0].slots[slot].width;
  for (const auto& t : terms_) w = std::min(w, t.slots[slot].width);
  return w;
}

double Charge::max_width() const {
  double w = 0.0;
  for (const auto& t : terms_)
    for (const auto& s : t.slots) w = std::max(w, s.width);
  return w;
}

Charge make_gaussian_charge(std::span<const ChargeComponentSpec> components,
                            int n_particles) {
  if (n_particles < 3)
    throw std::invalid_argument("make_gaussian_charge: N must be >= 3");
  if (n_particles > 8)
    throw std::invalid_argument(
        "make_gaussian_charge: N > 8, symmetrization too large");
  const int slots = n_particles - 1;
  std::vector<ChargeTerm> raw;
  for (const auto& comp : components) {
    if (static_cast<int>(comp.widths.size()) != slots)
      throw std::invalid_argument("make_gaussian_charge: widths size != N-1");
    if (!comp.shifts.empty() &&
        static_cast<int>(comp.shifts.size()) != slots)
      throw std::invalid_argument("make_gaussian_charge: shifts size != N-1");
    ChargeTerm base;
    base.amp = comp.amplitude;
    base.slots.resize(slots);
    for (int s = 0; s < slots; ++s) {
      if (!(comp.widths[s] > 0.0))
        throw std::invalid_argument("make_gaussian_charge: width <= 0");
      base.slots[s].width = comp.widths[s];
      base.slots[s].shift = comp.shifts.empty() ? Vec3{} : comp.shifts[s];
    }
    // average over all permutations of the boson slots 1..N-2
    std::vector<int> perm(slots - 1);
    std::iota(perm.begin(), perm.end(), 1);
    std::vector<ChargeTerm> perms;
    do {
      ChargeTerm t = base;
      for (std::size_t i = 0; i < perm.size(); ++i)
        t.slots[i + 1] = base.slots[perm[i]];
      perms.push_back(std::move(t));
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (auto& t : perms) {
      t.amp /= static_cast<double>(perms.size());
      raw.push_back(std::move(t));
    }
  }
  // merge bitwise-identical slot layouts (permutations of equal slots)
  std::vector<ChargeTerm> merged;
  for (auto& t : raw) {
    bool found = false;
    for (auto& m : merged) {
      bool same = true;
      for (int s = 0; s < slots && same; ++s)
        same = m.slots[s].width == t.slots[s].width &&
               m.slots[s].shift.x == t.slots[s].shift.x &&
               m.slots[s].shift.y == t.slots[s].shift.y &&
               m.slots[s].shift.z == t.slots[s].shift.z;
      if (same) {
        m.amp += t.amp;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(std::move(t));
  }
  // canonical term order, so permuted component specs build the same charge
  std::sort(merged.begin(), merged.end(),
            [](const ChargeTerm& a, const ChargeTerm& b) {
              for (std::size_t s = 0; s < a.slots.size(); ++s) {
                const auto ta = std::make_tuple(
                    a.slots[s].width, a.slots[s].shift.x, a.slots[s].shift.y,
                    a.slots[s].shift.z);
                const auto tb = std::make_tuple(
                    b.slots[s].width, b.slots[s].shift.x, b.slots[s].shift.y,
                    b.slots[s].shift.z);
                if (ta != tb) return ta < tb;
              }
              return false;
            });
  return Charge(n_particles, std::move(merged), true);
}

// ---- moments ---------------------------------------------------------------

ChargeMoments::ChargeMoments(const Charge& charge,
                             std::span<const double> slot_weights,
                             double lambda)
    : weights_(slot_weights.begin(), slot_weights.end()), lambda_(lambda) {
  const auto& terms = charge.terms();
  const int slots = charge.slots();
  if (static_cast<int>(weights_.size()) != slots)
    throw std::invalid_argument("ChargeMoments: weight count mismatch");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (std::size_t u = t; u < terms.size(); ++u) {
      Pair p;
      const std::complex<double> c =
          std::conj(terms[t].amp) * terms[u].amp;
      p.coeff = (u == t ? 1.0 : 2.0) * c.real();
      if (p.coeff == 0.0) continue;
      p.slots.resize(slots);
      for (int s = 0; s < slots; ++s) {
        const auto& s1 = terms[t].slots[s];
        const auto& s2 = terms[u].slots[s];
        PairSlot& ps = p.slots[s];
        ps.quad = 0.5 * (s1.width * s1.width + s2.width * s2.width);
        ps.lin = 0.5 * (s1.width * s1.width * s1.shift +
                        s2.width * s2.width * s2.shift);
        ps.offset = 0.5 * (s1.width * s1.width * s1.shift.norm_sq() +
                           s2.width * s2.width * s2.shift.norm_sq());
        ps.wcube = std::pow(s1.width * s2.width, 3.0);
      }
      pairs_.push_back(std::move(p));
    }
  }
  // Taylor series of e^{-lambda u} L(u) around u = 0 (jet arithmetic)
  double r_min = lambda_ > 0.0 ? 1.0 / lambda_ : 1e300;
  for (const auto& p : pairs_)
    for (int s = 0; s < slots; ++s)
      if (weights_[s] > 0.0)
        r_min = std::min(r_min, p.slots[s].quad / weights_[s]);
  u_taylor_ = 0.05 * r_min;
  Jet total = jet_zero();
  for (const auto& p : pairs_) {
    Jet expo = jet_zero();
    expo[1] -= lambda_;
    double scalar = p.coeff;
    for (int s = 0; s < slots; ++s) {
      const PairSlot& ps = p.slots[s];
      scalar *= ps.wcube * std::pow(kPi, 1.5);
      Jet lg = jet_log_linear(ps.quad, weights_[s]);
      for (int k = 0; k <= kJetOrder; ++k) expo[k] -= 1.5 * lg[k];
      if (ps.lin.norm_sq() > 0.0) {
        Jet rc = jet_recip_linear(ps.quad, weights_[s]);
        for (int k = 0; k <= kJetOrder; ++k)
          expo[k] += ps.lin.norm_sq() * rc[k];
      }
      expo[0] -= ps.offset;
    }
    Jet val = jet_exp(expo);
    for (int k = 0; k <= kJetOrder; ++k) total[k] += scalar * val[k];
  }
  taylor_.assign(total.begin(), total.end());
  l2_ = taylor_[0];
}

double ChargeMoments::laplace(double u) const {
  double acc = 0.0;
  for (const auto& p : pairs_) {
    double log_v = 0.0;
    double sign = p.coeff;
    for (std::size_t s = 0; s < p.slots.size(); ++s) {
      const PairSlot& ps = p.slots[s];
      const double q = ps.quad + weights_[s] * u;
      log_v += 1.5 * std::log(kPi / q) + ps.lin.norm_sq() / q - ps.offset +
               std::log(ps.wcube);
    }
    acc += sign * std::exp(log_v);
  }
  return acc * std::exp(-lambda_ * u);
}

double ChargeMoments::bracket(double u) const {
  if (u < u_taylor_) {
    double acc = 0.0;
    double p = 1.0;
    for (int k = 1; k <= kJetOrder; ++k) {
      p *= u;
      acc += taylor_[k] * p;
    }
    return -acc;
  }
  return l2_ - laplace(u);
}

double ChargeMoments::power_moment(int k) const {
  if (k < 0 || k > kJetOrder)
    throw std::invalid_argument("power_moment: order out of range");
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return (k % 2 == 0 ? 1.0 : -1.0) * f * taylor_[k];
}

double ChargeMoments::sqrt_moment() const {
  const double knee = std::sqrt(20.0 * u_taylor_);
  auto f = [this](double x) { return bracket(x * x) / (x * x); };
  QuadResult q = integrate_half_line(f, 1e-11, knee);
  return q.value / std::sqrt(kPi);
}

double ChargeMoments::exp_moment(double c) const {
  if (c <= 0.0) return l2_;
  const double lam_eff = lambda_ + 1.0 / (20.0 * u_taylor_);
  const double u_star = 0.5 * c / std::sqrt(lam_eff);
  auto f = [this, c](double x) {
    const double u = x * x;
    return std::exp(-0.25 * c * c / u) * laplace(u) / u;
  };
  QuadResult q = integrate_half_line(f, 1e-11, std::sqrt(u_star));
  return q.value * c / std::sqrt(kPi);
}

double ChargeMoments::sexp_moment(double c) const {
  if (c <= 0.0) return sqrt_moment();
  const double lam_eff = lambda_ + 1.0 / (20.0 * u_taylor_);
  const double u_star = 0.5 * c / std::sqrt(lam_eff);
  auto f = [this, c](double x) {
    const double u = x * x;
    return (0.5 * c * c / u - 1.0) * std::exp(-0.25 * c * c / u) *
           laplace(u) / u;
  };
  QuadResult q = integrate_half_line(f, 1e-11, std::sqrt(u_star));
  return q.value / std::sqrt(kPi);
}

ChargeMoments diag_moments(const Charge& charge, double lambda) {
  std::vector<double> w(charge.slots(), 1.0);
  w[0] = 0.5;
  return ChargeMoments(charge, w, lambda);
}

ChargeNorms charge_norms(const Charge& charge) {
  std::vector<double> unit(charge.slots(), 1.0);
  ChargeMoments m(charge, unit, 0.0);
  ChargeNorms out;
  out.l2 = m.l2();
  out.h1 = m.l2() + m.power_moment(1);
  out.h_half = m.l2() + m.sqrt_moment();
  return out;
}

// ---- density samplers ------------------------------------------------------

PositionDensitySampler::PositionDensitySampler(const Charge& charge)
    : slots_(charge.slots()) {
  const auto& terms = charge.terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (std::size_t u = 0; u < terms.size(); ++u) {
      Component c;
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
      c.prob = std::abs(c.coeff) * std::exp(log_mass);
      total_mass_ += c.prob;
      comps_.push_back(std::move(c));
    }
  }
  for (auto& c : comps_) c.prob /= total_mass_;
}

std::complex<double> PositionDensitySampler::sample(RngStream& rng,
                                                    std::span<Vec3> xs) const {
  double u = rng.uniform();
  std::size_t pick = comps_.size() - 1;
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (u < comps_[i].prob) {
      pick = i;
      break;
    }
    u -= comps_[i].prob;
  }
  const Component& c = comps_[pick];
  double phase = 0.0;
  for (int s = 0; s < slots_; ++s) {
    xs[s] = rng.normal3(c.sigma[s]);
    phase += c.phase[s].dot(xs[s]);
  }
  return total_mass_ * (c.coeff / std::abs(c.coeff)) *
         std::polar(1.0, phase);
}

MomentumDensitySampler::MomentumDensitySampler(const Charge& charge)
    : slots_(charge.slots()) {
  const auto& terms = charge.terms();
  for (std::size_t t = 0; t < terms.size(); ++t) {
    for (std::size_t u = 0; u < terms.size(); ++u) {
      Component c;
      std::complex<double> amp2 = std::conj(terms[t].amp) * terms[u].amp;
      if (std::abs(amp2) == 0.0) continue;
      double log_mass = 0.0;
      c.sigma.resize(slots_);
      c.mean.resize(slots_);
      for (int s = 0; s < slots_; ++s) {
        const double w1 = terms[t].slots[s].width;
        const double w2 = terms[u].slots[s].width;
        const Vec3 m1 = terms[t].slots[s].shift;
        const Vec3 m2 = terms[u].slots[s].shift;
        const double A = 0.5 * (w1 * w1 + w2 * w2);
        const Vec3 v = 0.5 * (w1 * w1 * m1 + w2 * w2 * m2);
        const double C =
            0.5 * (w1 * w1 * m1.norm_sq() + w2 * w2 * m2.norm_sq());
        c.sigma[s] = std::sqrt(0.5 / A);
        c.mean[s] = v / A;
        log_mass += 3.0 * std::log(w1 * w2) + 1.5 * std::log(kPi / A) +
                    v.norm_sq() / A - C;
      }
      c.coeff = amp2;
      c.prob = std::abs(amp2) * std::exp(log_mass);
      total_mass_ += c.prob;
      comps_.push_back(std::move(c));
    }
  }
  for (auto& c : comps_) c.prob /= total_mass_;
}

std::complex<double> MomentumDensitySampler::sample(RngStream& rng,
                                                    std::span<Vec3> ks) const {
  double u = rng.uniform();
  std::size_t pick = comps_.size() - 1;
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (u < comps_[i].prob) {
      pick = i;
      break;
    }
    u -= comps_[i].prob;
  }
  const Component& c = comps_[pick];
  for (int s = 0; s < slots_; ++s)
    ks[s] = c.mean[s] + rng.normal3(c.sigma[s]);
  return total_mass_ * (c.coeff / std::abs(c.coeff));
}

}  // namespace contactgas
