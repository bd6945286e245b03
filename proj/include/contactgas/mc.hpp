#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "contactgas/rng.hpp"
#include "contactgas/vec.hpp"

namespace contactgas {

struct McSpec {
  std::int64_t samples = 200000;  // >= 1000
  std::uint64_t seed = 20240817ULL;
  int workers = 4;
  double budget_scale = 1.0;
  double target_rel = 0.01;  // escalation target for relative stderr

  std::int64_t effective_samples() const;
  McSpec with_seed_offset(std::uint64_t k) const {
    McSpec s = *this;
    s.seed = s.seed ^ (0x9e3779b97f4a7c15ULL * (k + 0x51ULL));
    return s;
  }
};

struct EstimateWithError {
  std::complex<double> mean{0.0, 0.0};
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  std::int64_t samples_used = 0;
  std::uint64_t seed = 0;
  bool converged = true;
  bool escalated = false;
  std::int64_t nonfinite = 0;

  double value() const { return mean.real(); }
  double err() const { return stderr_re; }
};

// One importance-sampled draw: the implementation samples its proposal from
// the stream and returns integrand/pdf.
using WeightedDraw = std::function<std::complex<double>(RngStream&)>;

// Chunked, deterministically reduced estimate of E[draw].  Chunk count
// depends only on the budget, chunks are seeded by (seed, chunk index) and
// reduced in index order, so the result is identical for any worker count.
EstimateWithError integrate_mc_draws(const WeightedDraw& draw,
                                     std::int64_t samples, std::uint64_t seed,
                                     int workers);

// Re-runs with 10x budget when the first pass misses the relative-error
// target (mc.target_rel unless overridden); the escalated run extends the
// same chunk sequence.
EstimateWithError integrate_mc_draws_adaptive(const WeightedDraw& draw,
                                              const McSpec& mc,
                                              double target_rel = 0.0);

// ---- generic proposal machinery ------------------------------------------

class Proposal {
 public:
  virtual ~Proposal() = default;
  virtual int dim() const = 0;
  virtual void sample(RngStream& rng, std::span<double> out) const = 0;
  virtual double log_pdf(std::span<const double> x) const = 0;
};

// Independent Gaussian 3-blocks with per-block mean and sigma.
class GaussianBlockProposal : public Proposal {
 public:
  GaussianBlockProposal(std::vector<Vec3> means, std::vector<double> sigmas);
  int dim() const override { return static_cast<int>(means_.size()) * 3; }
  void sample(RngStream& rng, std::span<double> out) const override;
  double log_pdf(std::span<const double> x) const override;

 private:
  std::vector<Vec3> means_;
  std::vector<double> sigmas_;
};

// Spherically symmetric with radial density ~ rho^power e^{-rho^2/(2 s^2)}.
class RadialProposal : public Proposal {
 public:
  RadialProposal(int dimension, double power, double scale,
                 std::vector<double> center = {});
  int dim() const override { return dimension_; }
  void sample(RngStream& rng, std::span<double> out) const override;
  double log_pdf(std::span<const double> x) const override;

 private:
  int dimension_;
  double power_, scale_, log_norm_;
  std::vector<double> center_;
};

// Spherically symmetric with radial density ~ rho^{dim-1} e^{-beta rho}
// (uniform-direction, exponential envelope in |x|).
class RadialExpProposal : public Proposal {
 public:
  RadialExpProposal(int dimension, double beta, std::vector<double> center = {});
  int dim() const override { return dimension_; }
  void sample(RngStream& rng, std::span<double> out) const override;
  double log_pdf(std::span<const double> x) const override;

 private:
  int dimension_;
  double beta_, log_norm_;
  std::vector<double> center_;
};

// Finite mixture of same-dimension proposals.
class MixtureProposal : public Proposal {
 public:
  MixtureProposal(std::vector<double> weights,
                  std::vector<std::shared_ptr<Proposal>> parts);
  int dim() const override { return parts_[0]->dim(); }
  void sample(RngStream& rng, std::span<double> out) const override;
  double log_pdf(std::span<const double> x) const override;

 private:
  std::vector<double> weights_;
  std::vector<std::shared_ptr<Proposal>> parts_;
};

// Concatenation of independent sub-proposals over consecutive blocks.
class ProductProposal : public Proposal {
 public:
  explicit ProductProposal(std::vector<std::shared_ptr<Proposal>> parts);
  int dim() const override { return total_dim_; }
  void sample(RngStream& rng, std::span<double> out) const override;
  double log_pdf(std::span<const double> x) const override;

 private:
  std::vector<std::shared_ptr<Proposal>> parts_;
  int total_dim_ = 0;
};

// Spec-facing entry point: importance-sampling estimate of int f.
EstimateWithError integrate_mc(
    const std::function<std::complex<double>(std::span<const double>)>& f,
    const Proposal& proposal, const McSpec& mc, double target_rel = 0.0);

}  // namespace contactgas
