#pragma once

// Chain summaries shared by every sampler: posterior means, effective sample
// size, Monte-Carlo error and a split-half stationarity check.

#include <cstdint>
#include <functional>
#include <string>

#include "blbayes/linalg.hpp"

namespace blbayes {

/// Effective sample size from Geyer's initial monotone positive sequence of
/// autocorrelation pair sums. A constant series returns its length.
double effective_sample_size(const Vector& x);

struct SplitHalfCheck {
  Vector z;       ///< (mean first half - mean second half) / combined standard error
  bool pass = true;
};

/// Per-column split-half comparison of a draw matrix (rows are iterations).
/// Each half's standard error uses its own effective sample size; a column
/// fails when |z| >= threshold.
SplitHalfCheck split_half_check(const Matrix& draws, double threshold = 4.0);

struct PosteriorSummary {
  std::string model;
  Vector mu_post;           ///< post-burn mean of mu draws
  Matrix Sigma_post;        ///< post-burn mean of Sigma draws
  Vector posterior_sd;      ///< per-coordinate sd of mu draws
  Vector n_eff;             ///< per-coordinate effective sample size
  Vector mc_se;             ///< posterior_sd / sqrt(n_eff)
  double acceptance_rate = 1.0;       ///< post-burn (1 for pure Gibbs)
  double burn_acceptance_rate = 1.0;  ///< during burn-in
  SplitHalfCheck stationarity;
  Matrix mu_trace;          ///< post-burn mu draws, one row per iteration
  long iterations = 0;
  long burn = 0;
  std::uint64_t seed = 0;
  long scale_floor_hits = 0;     ///< Inverse-Gamma scale floors applied (log-Sigma model)
  double omega_repair_shift = 0.0;  ///< identity shift applied to Omega* (augmented model)
};

/// Streams one row per iteration: (iteration, mu, log det Sigma, accepted).
/// `accepted` is -1 for samplers without a Metropolis step.
using TraceSink = std::function<void(long iteration, const Vector& mu, double log_det_sigma, int accepted)>;

/// Accumulates post-burn draws and produces a PosteriorSummary.
class ChainRecorder {
 public:
  ChainRecorder(Index n, long iterations, long burn);

  /// Call once per iteration t = 0..iterations-1; only t >= burn is kept.
  void record(long t, const Vector& mu, const Matrix& sigma, int accepted);

  PosteriorSummary finish(std::string model, std::uint64_t seed) const;

 private:
  long iterations_;
  long burn_;
  Matrix mu_draws_;
  Matrix sigma_sum_;
  long kept_ = 0;
  long accepted_post_ = 0;
  long accepted_burn_ = 0;
  bool has_mh_ = false;
};

/// Validates chain lengths (iterations > burn >= 0); throws ParameterError.
void check_chain_lengths(long iterations, long burn);

}  // namespace blbayes
