#include "blbayes/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "blbayes/errors.hpp"

namespace blbayes {

double effective_sample_size(const Vector& x) {
  const Index n = x.size();
  if (n < 4) return static_cast<double>(n);
  const Vector c = x.array() - x.mean();
  const double var0 = c.squaredNorm() / static_cast<double>(n);
  if (!(var0 > 0.0)) return static_cast<double>(n);

  auto rho = [&](Index lag) {
    return c.head(n - lag).dot(c.tail(n - lag)) / (static_cast<double>(n) * var0);
  };
  // tau = -1 + 2 * sum of pair sums Gamma_k = rho(2k) + rho(2k+1), truncated at
  // the first non-positive pair and forced non-increasing.
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (Index k = 0; 2 * k + 1 < n; ++k) {
    double gamma = rho(2 * k) + rho(2 * k + 1);
    if (gamma <= 0.0) break;
    gamma = std::min(gamma, prev);
    prev = gamma;
    sum += gamma;
  }
  const double tau = std::max(-1.0 + 2.0 * sum, 1.0 / static_cast<double>(n));
  return static_cast<double>(n) / tau;
}

SplitHalfCheck split_half_check(const Matrix& draws, double threshold) {
  SplitHalfCheck out;
  const Index half = draws.rows() / 2;
  out.z = Vector::Zero(draws.cols());
  if (half < 4) return out;
  for (Index j = 0; j < draws.cols(); ++j) {
    const Vector a = draws.col(j).head(half);
    const Vector b = draws.col(j).tail(half);
    auto se2 = [](const Vector& v) {
      const double mean = v.mean();
      const double var = (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
      return var / effective_sample_size(v);
    };
    const double denom = std::sqrt(se2(a) + se2(b));
    const double diff = a.mean() - b.mean();
    out.z(j) = denom > 0.0 ? diff / denom : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
    if (!(std::abs(out.z(j)) < threshold)) out.pass = false;
  }
  return out;
}

void check_chain_lengths(long iterations, long burn) {
  if (burn < 0 || iterations <= burn) {
    throw ParameterError(fmt::format("need iterations > burn >= 0, got iterations = {}, burn = {}", iterations, burn));
  }
}

ChainRecorder::ChainRecorder(Index n, long iterations, long burn)
    : iterations_(iterations),
      burn_(burn),
      mu_draws_(std::max(iterations - burn, 0L), n),
      sigma_sum_(Matrix::Zero(n, n)) {
  check_chain_lengths(iterations, burn);
}

void ChainRecorder::record(long t, const Vector& mu, const Matrix& sigma, int accepted) {
  if (accepted >= 0) has_mh_ = true;
  if (t < burn_) {
    accepted_burn_ += accepted > 0 ? 1 : 0;
    return;
  }
  mu_draws_.row(kept_) = mu.transpose();
  sigma_sum_ += sigma;
  accepted_post_ += accepted > 0 ? 1 : 0;
  ++kept_;
}

PosteriorSummary ChainRecorder::finish(std::string model, std::uint64_t seed) const {
  if (kept_ != iterations_ - burn_) {
    throw std::logic_error("ChainRecorder::finish called before the chain completed");
  }
  PosteriorSummary s;
  s.model = std::move(model);
  s.seed = seed;
  s.iterations = iterations_;
  s.burn = burn_;
  s.mu_trace = mu_draws_;
  s.mu_post = mu_draws_.colwise().mean().transpose();
  s.Sigma_post = sigma_sum_ / static_cast<double>(kept_);
  s.Sigma_post = 0.5 * (s.Sigma_post + s.Sigma_post.transpose().eval());
  const Index n = mu_draws_.cols();
  s.posterior_sd.resize(n);
  s.n_eff.resize(n);
  s.mc_se.resize(n);
  for (Index j = 0; j < n; ++j) {
    const Vector col = mu_draws_.col(j);
    const double var = kept_ > 1 ? (col.array() - s.mu_post(j)).square().sum() / static_cast<double>(kept_ - 1) : 0.0;
    s.posterior_sd(j) = std::sqrt(var);
    s.n_eff(j) = effective_sample_size(col);
    s.mc_se(j) = s.posterior_sd(j) / std::sqrt(s.n_eff(j));
  }
  if (has_mh_) {
    s.acceptance_rate = static_cast<double>(accepted_post_) / static_cast<double>(kept_);
    s.burn_acceptance_rate = burn_ > 0 ? static_cast<double>(accepted_burn_) / static_cast<double>(burn_) : 0.0;
  }
  s.stationarity = split_half_check(mu_draws_);
  return s;
}

}  // namespace blbayes
