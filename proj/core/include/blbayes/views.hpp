#pragma once

#include <vector>

#include "blbayes/linalg.hpp"

namespace blbayes {

/// Investor views P mu ~ N(q, diag(omega)).
///
/// P is k x n with full row rank and no all-zero row, q holds the k expected
/// view returns (per period, decimal) and omega the k view variances.
class ViewSet {
 public:
  ViewSet(Matrix p, Vector q, Vector omega);

  Index k() const noexcept { return p_.rows(); }
  Index n() const noexcept { return p_.cols(); }
  const Matrix& P() const noexcept { return p_; }
  const Vector& q() const noexcept { return q_; }
  const Vector& omega() const noexcept { return omega_; }
  SpdMatrix Omega() const { return SpdMatrix::diagonal(omega_); }

  /// Same P and q with new view variances.
  ViewSet with_omega(Vector omega) const { return ViewSet(p_, q_, std::move(omega)); }
  ViewSet with_q(Vector q) const { return ViewSet(p_, std::move(q), omega_); }

 private:
  Matrix p_;
  Vector q_;
  Vector omega_;
};

/// Square invertible extension of a view matrix: P_star = [P; added_rows].
struct Augmentation {
  Matrix P_star;
  Matrix added_rows;  ///< (n - k) x n, possibly with zero rows
};

/// Adds unit rows to P until it is square and invertible: one e_j per all-zero
/// column, then one e_j per non-pivot column holding a nonzero entry, then (only
/// if still short) e_j for remaining non-pivot columns in ascending j.
Augmentation augment_to_invertible(const Matrix& p);

/// Prior hyperparameters for mu* = P_star mu.
struct TransformedHyperparams {
  Vector q_star;
  SpdMatrix Omega_star;
  /// Multiple of the identity added to make Omega_star positive definite.
  double repair_shift = 0.0;
};

/// q_star = P_star * mean(monthly means) with its first k entries replaced by
/// q; Omega_star = P_star * Cov(monthly means) * P_star^T with its top-left
/// k x k block replaced by diag(omega). If the result has smallest eigenvalue
/// below 1e-10 times the largest, it is shifted by a multiple of the identity.
TransformedHyperparams build_transformed_hyperparams(const Augmentation& aug, const Vector& q,
                                                     const Vector& omega,
                                                     const std::vector<Vector>& monthly_means);

/// Relative rank threshold used for the full-row-rank and pivot decisions.
inline constexpr double kRankTolerance = 1e-10;

/// Numerical rank of m (full-pivot LU, threshold kRankTolerance).
Index numerical_rank(const Matrix& m);

}  // namespace blbayes
