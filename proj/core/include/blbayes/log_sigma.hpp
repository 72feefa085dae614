#pragma once

// Gaussian prior on alpha = Vec*(log Sigma). The likelihood in alpha is
// replaced by its second-order (Volterra) expansion around lambda =
// Vec*(log S) to build an independence proposal, and a Metropolis-Hastings
// step corrects back to the exact conditional.

#include <cstdint>
#include <optional>

#include "blbayes/data.hpp"
#include "blbayes/diagnostics.hpp"
#include "blbayes/linalg.hpp"
#include "blbayes/sampling.hpp"
#include "blbayes/views.hpp"

namespace blbayes {

/// (d_i - d_j)^2 / (d_i d_j (log d_i - log d_j)^2), continuous at d_i == d_j.
double xi_coefficient(double d_i, double d_j);

/// Column vec_star_index(n, i, j) holds f_ij, defined for every symmetric A by
/// vec_star(A) . f_ij == e_i^T A e_j. Throws BasisError when the columns of
/// `eigvecs` are not orthonormal to 1e-8.
Matrix build_f_vectors(const Matrix& eigvecs);

struct VolterraQuadratic {
  VecStarVector lambda_vec;  ///< Vec*(log S)
  Matrix Q;                  ///< d x d, symmetric PSD
  Vector eigvals;            ///< of S, ascending
  Matrix eigvecs;
  double log_det_S = 0.0;
  Index m = 0;
};

/// Q = (m/2) sum_i f_ii f_ii^T + m sum_{i<j} xi_ij f_ij f_ij^T.
VolterraQuadratic build_Q(const SpdMatrix& S, Index m);

/// -(mn/2) log(2 pi e) - (m/2) log det S - (alpha - lambda)^T Q (alpha - lambda) / 2.
double volterra_log_density(const Vector& alpha, const VolterraQuadratic& vq);
double volterra_log_density(const Vector& alpha, const SpdMatrix& S, Index m);

/// -(mn/2) log(2 pi) - (m/2) Tr(A + S e^-A) - alpha^T G alpha / 2, A = Vec*^-1(alpha).
/// This is the Gaussian log-likelihood at Sigma = e^A (S being the
/// 1/m-normalised scatter) plus the integrated prior exponent.
double exact_log_target(const Vector& alpha, const SpdMatrix& S, Index m, const Matrix& G);

/// Block design of the prior alpha | theta ~ N(J theta, Delta).
struct StructuralDesign {
  Index n;
  double sigma1_sq;  ///< variance of the log-variance entries
  double sigma2_sq;  ///< variance of the log-covariance entries

  StructuralDesign(Index n, double sigma1_sq, double sigma2_sq);
  Index d() const noexcept { return vec_star_dim(n); }
  Matrix J() const;
  Vector delta_diagonal() const;
};

/// G = Delta^-1 - Delta^-1 J (J^T Delta^-1 J)^-1 J^T Delta^-1.
Matrix build_G(const StructuralDesign& design);

/// log of 2 pi det(Delta)^-1/2 det(J^T Delta^-1 J)^-1/2 exp(-alpha^T G alpha / 2),
/// the integral over theta of det(Delta)^-1/2 exp(-(alpha - J theta)^T Delta^-1 (alpha - J theta) / 2).
double integrated_alpha_log_density(const Vector& alpha, const StructuralDesign& design);

struct InverseGammaParams {
  double shape;
  double scale;
};

struct SigmaSqConditionals {
  InverseGammaParams first;   ///< sigma1^2
  InverseGammaParams second;  ///< sigma2^2
  int floor_hits = 0;         ///< scales raised to kScaleFloor
};

inline constexpr double kScaleFloor = 1e-300;

/// sigma1^2 ~ IG((n-3)/2, SS_v / 2), sigma2^2 ~ IG((d-n-3)/2, SS_c / 2), where SS
/// are the sums of squared deviations of the diagonal and off-diagonal alpha
/// entries from their means. Requires n >= 4.
SigmaSqConditionals sigma_sq_conditionals(const Vector& alpha, Index n);

/// log rho for the independence proposal N((Q+G)^-1 Q lambda, (Q+G)^-1).
double mh_log_ratio(const Vector& candidate, const Vector& current, const SpdMatrix& S, const Matrix& G,
                    const VolterraQuadratic& vq);

struct LogSigmaState {
  Vector alpha;
  SpdMatrix Sigma;
  double sigma1_sq;
  double sigma2_sq;
  Vector mu;
};

struct LogSigmaConfig {
  long iterations = 11000;
  long burn = 1000;
  std::uint64_t seed = 1;
  std::optional<double> omega_floor;  ///< default kOmegaFloorLogSigma
  bool vague_views = false;
};

inline constexpr double kOmegaFloorLogSigma = 1e-9;

/// Metropolis-Hastings-within-Gibbs sampler. Needs n >= 4 and m > n.
PosteriorSummary gibbs_log_sigma(const ModelInputs& data, const ViewSet& views, const LogSigmaConfig& cfg,
                                 const TraceSink& trace = {});

}  // namespace blbayes
