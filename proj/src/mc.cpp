#include "contactgas/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace contactgas {

namespace {

constexpr std::int64_t kChunkSize = 4096;
constexpr int kMinChunks = 32;

struct ChunkStat {
  std::complex<double> sum{0.0, 0.0};
  double sum_sq_re = 0.0;
  double sum_sq_im = 0.0;
  std::int64_t n = 0;
  std::int64_t nonfinite = 0;
};

ChunkStat run_chunk(const WeightedDraw& draw, std::uint64_t seed,
                    std::int64_t chunk_index, std::int64_t count) {
  RngStream rng(seed, static_cast<std::uint64_t>(chunk_index));
  ChunkStat st;
  st.n = count;
  for (std::int64_t i = 0; i < count; ++i) {
    std::complex<double> v = draw(rng);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      ++st.nonfinite;
      continue;
    }
    st.sum += v;
    st.sum_sq_re += v.real() * v.real();
    st.sum_sq_im += v.imag() * v.imag();
  }
  return st;
}

EstimateWithError reduce(const std::vector<ChunkStat>& stats,
                         std::uint64_t seed) {
  EstimateWithError out;
  out.seed = seed;
  std::int64_t n = 0, bad = 0;
  std::complex<double> total{0.0, 0.0};
  for (const auto& st : stats) {  // fixed chunk-index order
    total += st.sum;
    n += st.n - st.nonfinite;
    bad += st.nonfinite;
  }
  out.nonfinite = bad;
  out.samples_used = n + bad;
  if (n == 0) {
    out.converged = false;
    return out;
  }
  out.mean = total / static_cast<double>(n);
  // variance of the mean from chunk-level means
  const std::size_t c = stats.size();
  double var_re = 0.0, var_im = 0.0;
  std::int64_t used_chunks = 0;
  for (const auto& st : stats) {
    const std::int64_t m = st.n - st.nonfinite;
    if (m <= 0) continue;
    ++used_chunks;
    const std::complex<double> cm = st.sum / static_cast<double>(m);
    var_re += (cm.real() - out.mean.real()) * (cm.real() - out.mean.real());
    var_im += (cm.imag() - out.mean.imag()) * (cm.imag() - out.mean.imag());
  }
  (void)c;
  if (used_chunks > 1) {
    var_re /= (used_chunks - 1.0) * used_chunks;
    var_im /= (used_chunks - 1.0) * used_chunks;
  }
  out.stderr_re = std::sqrt(var_re);
  out.stderr_im = std::sqrt(var_im);
  if (bad > 0 && 1000 * bad > out.samples_used)
    throw std::runtime_error("integrate_mc: more than 0.1% non-finite samples");
  out.converged = true;
  return out;
}

std::vector<ChunkStat> run_chunks(const WeightedDraw& draw,
                                  std::int64_t samples, std::uint64_t seed,
                                  int workers, std::int64_t first_chunk) {
  const std::int64_t chunks =
      std::max<std::int64_t>(kMinChunks, (samples + kChunkSize - 1) / kChunkSize);
  const std::int64_t per = samples / chunks;
  const std::int64_t extra = samples % chunks;
  std::vector<ChunkStat> stats(static_cast<std::size_t>(chunks));
  workers = std::max(1, workers);
  std::atomic<std::int64_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= chunks) break;
      const std::int64_t count = per + (i < extra ? 1 : 0);
      stats[static_cast<std::size_t>(i)] =
          run_chunk(draw, seed, first_chunk + i, count);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return stats;
}

}  // namespace

std::int64_t McSpec::effective_samples() const {
  auto s = static_cast<std::int64_t>(static_cast<double>(samples) * budget_scale);
  return std::max<std::int64_t>(1000, s);
}

EstimateWithError integrate_mc_draws(const WeightedDraw& draw,
                                     std::int64_t samples, std::uint64_t seed,
                                     int workers) {
  if (samples < 1000)
    throw std::invalid_argument("integrate_mc: budget must be >= 1000 samples");
  auto stats = run_chunks(draw, samples, seed, workers, 0);
  return reduce(stats, seed);
}

EstimateWithError integrate_mc_draws_adaptive(const WeightedDraw& draw,
                                              const McSpec& mc,
                                              double target_rel) {
  if (target_rel <= 0.0) target_rel = mc.target_rel;
  const std::int64_t base = mc.effective_samples();
  EstimateWithError est = integrate_mc_draws(draw, base, mc.seed, mc.workers);
  const double scale = std::abs(est.mean);
  const double err = std::max(est.stderr_re, est.stderr_im);
  if (scale > 0.0 && err > target_rel * scale) {
    // extend the chunk sequence to a 10x total budget
    const std::int64_t chunks =
        std::max<std::int64_t>(kMinChunks, (base + kChunkSize - 1) / kChunkSize);
    auto head = run_chunks(draw, base, mc.seed, mc.workers, 0);
    auto tail = run_chunks(draw, 9 * base, mc.seed, mc.workers, chunks);
    head.insert(head.end(), tail.begin(), tail.end());
    est = reduce(head, mc.seed);
    est.escalated = true;
  }
  return est;
}

// ---- proposals -------------------------------------------------------------

GaussianBlockProposal::GaussianBlockProposal(std::vector<Vec3> means,
                                             std::vector<double> sigmas)
    : means_(std::move(means)), sigmas_(std::move(sigmas)) {
  if (means_.size() != sigmas_.size() || means_.empty())
    throw std::invalid_argument("GaussianBlockProposal: size mismatch");
}

void GaussianBlockProposal::sample(RngStream& rng, std::span<double> out) const {
  for (std::size_t b = 0; b < means_.size(); ++b) {
    const Vec3 v = means_[b] + rng.normal3(sigmas_[b]);
    out[3 * b] = v.x;
    out[3 * b + 1] = v.y;
    out[3 * b + 2] = v.z;
  }
}

double GaussianBlockProposal::log_pdf(std::span<const double> x) const {
  constexpr double kLog2Pi = 1.8378770664093454836;
  double lp = 0.0;
  for (std::size_t b = 0; b < means_.size(); ++b) {
    const double s = sigmas_[b];
    const Vec3 d = Vec3{x[3 * b], x[3 * b + 1], x[3 * b + 2]} - means_[b];
    lp += -0.5 * d.norm_sq() / (s * s) - 1.5 * kLog2Pi - 3.0 * std::log(s);
  }
  return lp;
}

namespace {
double log_sphere_area(int n) {
  // area of S^{n-1} = 2 pi^{n/2} / Gamma(n/2)
  return std::log(2.0) + 0.5 * n * std::log(3.14159265358979323846) -
         std::lgamma(0.5 * n);
}
}  // namespace

RadialProposal::RadialProposal(int dimension, double power, double scale,
                               std::vector<double> center)
    : dimension_(dimension), power_(power), scale_(scale),
      center_(std::move(center)) {
  if (dimension_ < 1 || scale_ <= 0.0 || power_ < 0.0)
    throw std::invalid_argument("RadialProposal: bad parameters");
  // radial normalization: int rho^a e^{-rho^2/(2 s^2)} drho
  //   = 2^{(a-1)/2} s^{a+1} Gamma((a+1)/2)
  const double a = power_;
  const double log_radial_norm = 0.5 * (a - 1.0) * std::log(2.0) +
                                 (a + 1.0) * std::log(scale_) +
                                 std::lgamma(0.5 * (a + 1.0));
  log_norm_ = -log_radial_norm - log_sphere_area(dimension_);
}

void RadialProposal::sample(RngStream& rng, std::span<double> out) const {
  // rho^2/(2 s^2) ~ Gamma((a+1)/2)
  const double g = rng.gamma_variate(0.5 * (power_ + 1.0));
  const double rho = scale_ * std::sqrt(2.0 * g);
  // uniform direction from normalized Gaussians
  double nsq = 0.0;
  for (int i = 0; i < dimension_; ++i) {
    out[i] = rng.normal();
    nsq += out[i] * out[i];
  }
  const double r = std::sqrt(std::max(nsq, 1e-300));
  for (int i = 0; i < dimension_; ++i) {
    out[i] *= rho / r;
    if (!center_.empty()) out[i] += center_[i];
  }
}

double RadialProposal::log_pdf(std::span<const double> x) const {
  double nsq = 0.0;
  for (int i = 0; i < dimension_; ++i) {
    const double xi = center_.empty() ? x[i] : x[i] - center_[i];
    nsq += xi * xi;
  }
  const double rho = std::sqrt(nsq);
  if (rho <= 0.0) return -1e300;
  return log_norm_ + (power_ - (dimension_ - 1.0)) * std::log(rho) -
         0.5 * nsq / (scale_ * scale_);
}

RadialExpProposal::RadialExpProposal(int dimension, double beta,
                                     std::vector<double> center)
    : dimension_(dimension), beta_(beta), center_(std::move(center)) {
  if (dimension_ < 1 || beta_ <= 0.0)
    throw std::invalid_argument("RadialExpProposal: bad parameters");
  // radial density rho^{d-1} e^{-beta rho}: norm = Gamma(d)/beta^d
  const double log_radial_norm =
      std::lgamma(static_cast<double>(dimension_)) -
      dimension_ * std::log(beta_);
  log_norm_ = -log_radial_norm - log_sphere_area(dimension_);
}

void RadialExpProposal::sample(RngStream& rng, std::span<double> out) const {
  const double rho = rng.gamma_variate(static_cast<double>(dimension_)) / beta_;
  double nsq = 0.0;
  for (int i = 0; i < dimension_; ++i) {
    out[i] = rng.normal();
    nsq += out[i] * out[i];
  }
  const double r = std::sqrt(std::max(nsq, 1e-300));
  for (int i = 0; i < dimension_; ++i) {
    out[i] *= rho / r;
    if (!center_.empty()) out[i] += center_[i];
  }
}

double RadialExpProposal::log_pdf(std::span<const double> x) const {
  double nsq = 0.0;
  for (int i = 0; i < dimension_; ++i) {
    const double xi = center_.empty() ? x[i] : x[i] - center_[i];
    nsq += xi * xi;
  }
  const double rho = std::sqrt(nsq);
  return log_norm_ - beta_ * rho;
}

MixtureProposal::MixtureProposal(std::vector<double> weights,
                                 std::vector<std::shared_ptr<Proposal>> parts)
    : weights_(std::move(weights)), parts_(std::move(parts)) {
  if (weights_.size() != parts_.size() || parts_.empty())
    throw std::invalid_argument("MixtureProposal: size mismatch");
  double total = 0.0;
  for (double w : weights_) total += w;
  for (double& w : weights_) w /= total;
}

void MixtureProposal::sample(RngStream& rng, std::span<double> out) const {
  double u = rng.uniform();
  std::size_t pick = parts_.size() - 1;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (u < weights_[i]) {
      pick = i;
      break;
    }
    u -= weights_[i];
  }
  parts_[pick]->sample(rng, out);
}

double MixtureProposal::log_pdf(std::span<const double> x) const {
  double m = -1e300;
  std::vector<double> lps(parts_.size());
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    lps[i] = std::log(weights_[i]) + parts_[i]->log_pdf(x);
    m = std::max(m, lps[i]);
  }
  double acc = 0.0;
  for (double lp : lps) acc += std::exp(lp - m);
  return m + std::log(acc);
}

ProductProposal::ProductProposal(std::vector<std::shared_ptr<Proposal>> parts)
    : parts_(std::move(parts)) {
  for (const auto& p : parts_) total_dim_ += p->dim();
}

void ProductProposal::sample(RngStream& rng, std::span<double> out) const {
  int off = 0;
  for (const auto& p : parts_) {
    p->sample(rng, out.subspan(off, p->dim()));
    off += p->dim();
  }
}

double ProductProposal::log_pdf(std::span<const double> x) const {
  double lp = 0.0;
  int off = 0;
  for (const auto& p : parts_) {
    lp += p->log_pdf(x.subspan(off, p->dim()));
    off += p->dim();
  }
  return lp;
}

EstimateWithError integrate_mc(
    const std::function<std::complex<double>(std::span<const double>)>& f,
    const Proposal& proposal, const McSpec& mc, double target_rel) {
  const int d = proposal.dim();
  auto draw = [&f, &proposal, d](RngStream& rng) -> std::complex<double> {
    thread_local std::vector<double> x;
    x.resize(static_cast<std::size_t>(d));
    proposal.sample(rng, x);
    const std::complex<double> v = f(x);
    if (v == std::complex<double>(0.0, 0.0)) return v;
    return v * std::exp(-proposal.log_pdf(x));
  };
  return integrate_mc_draws_adaptive(draw, mc, target_rel);
}

}  // namespace contactgas
