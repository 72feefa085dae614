#pragma once

// Closed-form Black-Litterman: equilibrium prior, posterior, CAPM weights.

#include "blbayes/linalg.hpp"
#include "blbayes/views.hpp"

namespace blbayes {

struct EquilibriumInputs {
  double lambda = 2.5;  ///< risk aversion
  Vector w_eq;          ///< market weights
  SpdMatrix Sigma;
  double tau = 0.05;    ///< prior scale

  /// Throws ParameterError / DimensionError.
  void validate() const;
};

/// pi = lambda * Sigma * w_eq.
Vector equilibrium_returns(const EquilibriumInputs& inp);

struct BlPosterior {
  Vector mu_bar;
  SpdMatrix M_inv;      ///< ((tau Sigma)^-1 + P^T Omega^-1 P)^-1
  SpdMatrix Sigma_bar;  ///< M_inv + Sigma
};

/// Posterior of the returns given the prior N(pi, tau Sigma) and the views.
BlPosterior bl_posterior(const Vector& pi, double tau, const SpdMatrix& Sigma, const ViewSet& views);

/// Prior-only limit (no views): mu_bar = pi, Sigma_bar = (1 + tau) Sigma.
BlPosterior bl_posterior(const Vector& pi, double tau, const SpdMatrix& Sigma);

/// w = Sigma_bar^-1 mu_bar / lambda. Unconstrained; need not sum to one.
Vector optimal_weights(const Vector& mu_bar, const SpdMatrix& Sigma_bar, double lambda);

/// Same rule applied to sampler output.
inline Vector capm_weights(const Vector& mu_post, const SpdMatrix& Sigma_post, double lambda) {
  return optimal_weights(mu_post, Sigma_post, lambda);
}

struct WeightDecomposition {
  Vector w_star;
  Vector delta;  ///< k view loadings
};

/// w* = (w_eq + P^T delta) / (1 + tau), with
///   A     = Omega / tau + P Sigma P^T / (1 + tau)
///   delta = tau Omega^-1 q / lambda
///           - A^-1 P Sigma w_eq / (1 + tau)
///           - A^-1 P Sigma P^T tau Omega^-1 q / (lambda (1 + tau)).
/// Equals optimal_weights(bl_posterior(...)) when pi = lambda Sigma w_eq.
WeightDecomposition weight_decomposition(const EquilibriumInputs& inp, const ViewSet& views);

/// Above this condition number solves are still attempted but logged.
inline constexpr double kConditionWarn = 1e10;

}  // namespace blbayes
