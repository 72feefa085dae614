#pragma once

// Gibbs samplers for the Inverse-Wishart model: the augmented variant runs in
// view space after transforming by P*, the non-square variant in asset space.

#include <cstdint>
#include <optional>

#include "blbayes/data.hpp"
#include "blbayes/diagnostics.hpp"
#include "blbayes/linalg.hpp"
#include "blbayes/sampling.hpp"
#include "blbayes/views.hpp"

namespace blbayes {

/// Lowest view variance accepted by any model.
inline constexpr double kOmegaHardFloor = 1e-12;
inline constexpr double kOmegaFloorAugmented = 1e-6;
inline constexpr double kOmegaFloorNonsquare = 1e-9;

struct IwConfig {
  std::optional<double> nu;         ///< default n + 2
  std::optional<SpdMatrix> Sigma0;  ///< asset-space scale; default (nu - n - 1) * Sigma_hist
  long iterations = 11000;
  long burn = 1000;
  std::uint64_t seed = 1;
  std::optional<double> omega_floor;  ///< overrides the per-variant floor (logged)
  /// Hold Sigma fixed at this asset-space value and sample only mu.
  std::optional<SpdMatrix> fixed_sigma;
  /// Treat Omega^-1 as exactly zero: the views carry no information.
  bool vague_views = false;
};

/// Rejects view variances below the hard floor, and below `default_floor`
/// unless an override is set.
void check_omega_floor(const Vector& omega, double default_floor, const std::optional<double>& override_floor);

/// The view contribution to the mu precision: P^T Omega^-1 P and P^T Omega^-1 q.
struct ViewPrecision {
  Matrix PtOinvP;
  Vector PtOinvq;

  static ViewPrecision from_views(const ViewSet& views);
  static ViewPrecision from_dense(const Matrix& p_eff, const Vector& q_eff, const SpdMatrix& omega_eff);
  /// Omega^-1 == 0.
  static ViewPrecision vague(Index n);
};

struct GaussianConditional {
  Vector mean;
  SpdMatrix cov;
};

/// cov  = (m Sigma^-1 + P^T Omega^-1 P)^-1
/// mean = cov (m Sigma^-1 rbar + P^T Omega^-1 q)
GaussianConditional mu_conditional(const Vector& rbar, const SpdMatrix& Sigma, const ViewPrecision& vp, Index m);

/// One draw from mu_conditional without forming the covariance.
Vector sample_mu_conditional(const Vector& rbar, const SpdMatrix& Sigma, const ViewPrecision& vp, Index m,
                             RngStream& rng);

struct IwParams {
  double dof;
  SpdMatrix scale;
};

/// Sigma | mu, r ~ IW(nu + m, Sigma0 + scatter).
IwParams sigma_conditional(const SymmetricMatrix& residual_scatter, double nu, const SpdMatrix& Sigma0, Index m);

/// Algorithm with an augmented, invertible P*: data r* = P* r, prior
/// mu* ~ N(q*, Omega*), Sigma* ~ IW(nu, P* Sigma0 P*^T). Draws are mapped back
/// to asset space before summarising.
PosteriorSummary gibbs_augmented(const ModelInputs& data, const ViewSet& views, const IwConfig& cfg,
                                 const TraceSink& trace = {});

/// Algorithm with the k x n view matrix used directly in asset space.
PosteriorSummary gibbs_nonsquare(const ModelInputs& data, const ViewSet& views, const IwConfig& cfg,
                                 const TraceSink& trace = {});

}  // namespace blbayes
