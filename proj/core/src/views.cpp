#include "blbayes/views.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "blbayes/errors.hpp"

namespace blbayes {

namespace {

// Leftmost-pivot row reduction; returns the pivot column of each pivot row.
std::vector<Index> pivot_columns(Matrix a) {
  std::vector<Index> pivots;
  const double tol = kRankTolerance * std::max(1.0, a.cwiseAbs().maxCoeff());
  Index row = 0;
  for (Index col = 0; col < a.cols() && row < a.rows(); ++col) {
    Index best = row;
    a.col(col).segment(row, a.rows() - row).cwiseAbs().maxCoeff(&best);
    best += row;
    if (std::abs(a(best, col)) <= tol) continue;
    a.row(row).swap(a.row(best));
    for (Index r = row + 1; r < a.rows(); ++r) {
      a.row(r) -= (a(r, col) / a(row, col)) * a.row(row);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

Vector unit_row(Index n, Index j) {
  Vector e = Vector::Zero(n);
  e(j) = 1.0;
  return e;
}

}  // namespace

Index numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(kRankTolerance);
  return lu.rank();
}

ViewSet::ViewSet(Matrix p, Vector q, Vector omega)
    : p_(std::move(p)), q_(std::move(q)), omega_(std::move(omega)) {
  const Index k = p_.rows();
  const Index n = p_.cols();
  if (k < 1 || n < 1 || k > n) {
    throw DimensionError(fmt::format("view matrix P must be k x n with 1 <= k <= n, got {}x{}", k, n));
  }
  if (q_.size() != k) {
    throw DimensionError(fmt::format("q has {} entries but P has {} rows", q_.size(), k));
  }
  if (omega_.size() != k) {
    throw DimensionError(fmt::format("omega has {} entries but P has {} rows", omega_.size(), k));
  }
  if (!p_.allFinite() || !q_.allFinite()) throw ParameterError("views contain non-finite values");
  for (Index i = 0; i < k; ++i) {
    if (!(omega_(i) > 0.0) || !std::isfinite(omega_(i))) {
      throw ParameterError(fmt::format("omega[{}] = {} must be finite and > 0", i, omega_(i)));
    }
    if (p_.row(i).cwiseAbs().maxCoeff() == 0.0) {
      throw ParameterError(fmt::format("row {} of P is all zero", i));
    }
  }
  if (numerical_rank(p_) < k) {
    throw RankError(fmt::format("view matrix P ({}x{}) does not have full row rank", k, n));
  }
}

Augmentation augment_to_invertible(const Matrix& p) {
  const Index k = p.rows();
  const Index n = p.cols();
  if (k < 1 || k > n) {
    throw DimensionError(fmt::format("cannot augment a {}x{} matrix", k, n));
  }
  if (numerical_rank(p) < k) {
    throw RankError(fmt::format("P ({}x{}) is row-rank deficient", k, n));
  }

  const std::vector<Index> pivots = pivot_columns(p);
  auto is_pivot = [&](Index j) { return std::find(pivots.begin(), pivots.end(), j) != pivots.end(); };

  // Candidate unit rows, tagged with the rule that produced them.
  std::vector<std::pair<Index, int>> candidates;
  for (Index j = 0; j < n; ++j) {
    if (p.col(j).cwiseAbs().maxCoeff() == 0.0) candidates.emplace_back(j, 1);
  }
  for (Index i = 0; i < k; ++i) {
    if ((p.row(i).array() != 0.0).count() < 2) continue;
    for (Index j = 0; j < n; ++j) {
      if (p(i, j) == 0.0 || is_pivot(j)) continue;
      const bool seen = std::any_of(candidates.begin(), candidates.end(),
                                    [j](const auto& c) { return c.first == j; });
      if (!seen) candidates.emplace_back(j, 2);
    }
  }

  Matrix rows(n, n);
  rows.topRows(k) = p;
  Index filled = k;
  std::vector<Index> used;
  bool rule1 = false;
  bool rule2 = false;
  bool fill = false;
  auto try_add = [&](Index j) {
    if (filled == n) return false;
    rows.row(filled) = unit_row(n, j).transpose();
    if (numerical_rank(rows.topRows(filled + 1)) == filled + 1) {
      ++filled;
      used.push_back(j);
      return true;
    }
    return false;
  };
  for (const auto& [j, rule] : candidates) {
    if (try_add(j)) (rule == 1 ? rule1 : rule2) = true;
  }
  for (Index j = 0; j < n && filled < n; ++j) {
    if (is_pivot(j) || std::find(used.begin(), used.end(), j) != used.end()) continue;
    if (try_add(j)) fill = true;
  }
  for (Index j = 0; j < n && filled < n; ++j) {
    if (std::find(used.begin(), used.end(), j) != used.end()) continue;
    if (try_add(j)) fill = true;
  }
  if (fill) {
    spdlog::debug("augmentation needed greedy unit-row completion");
  }

  const double det = std::abs(rows.topRows(filled).determinant());
  if (filled != n || !(det >= 1e-12)) {
    std::string rules;
    if (rule1) rules += " zero-column";
    if (rule2) rules += " non-pivot-entry";
    if (fill) rules += " greedy-fill";
    throw AugmentationError(fmt::format(
        "augmenting P produced a singular {}x{} matrix (|det| = {:.3g}, rules applied:{})", filled, n,
        det, rules.empty() ? " none" : rules));
  }
  return {rows, rows.bottomRows(n - k)};
}

TransformedHyperparams build_transformed_hyperparams(const Augmentation& aug, const Vector& q,
                                                     const Vector& omega,
                                                     const std::vector<Vector>& monthly_means) {
  const Index n = aug.P_star.rows();
  const Index k = n - aug.added_rows.rows();
  if (aug.P_star.cols() != n) throw DimensionError("P_star must be square");
  if (q.size() != k || omega.size() != k) {
    throw DimensionError(fmt::format("q/omega have {}/{} entries, expected k = {}", q.size(), omega.size(), k));
  }
  if (monthly_means.size() < 2) {
    throw InsufficientDataError(
        fmt::format("need >= 2 monthly mean vectors to estimate Omega*, got {}", monthly_means.size()));
  }
  Matrix means(static_cast<Index>(monthly_means.size()), n);
  for (std::size_t i = 0; i < monthly_means.size(); ++i) {
    if (monthly_means[i].size() != n) {
      throw DimensionError(fmt::format("monthly mean {} has {} entries, expected {}", i, monthly_means[i].size(), n));
    }
    means.row(static_cast<Index>(i)) = monthly_means[i].transpose();
  }

  Vector q_star = aug.P_star * means.colwise().mean().transpose();
  q_star.head(k) = q;

  const Matrix var_mu = sample_covariance(means).matrix();
  Matrix omega_star = aug.P_star * var_mu * aug.P_star.transpose();
  omega_star.topLeftCorner(k, k) = omega.asDiagonal();
  omega_star = 0.5 * (omega_star + omega_star.transpose().eval());

  double shift = 0.0;
  if (n > k) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(omega_star, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0);
    const double hi = eig.eigenvalues()(n - 1);
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > 0.0)) {
      throw HyperparamError("Omega* has no positive spectrum");
    }
    if (lo < 1e-10 * hi) {
      shift = 1e-10 * hi - lo;
      omega_star.diagonal().array() += shift;
      spdlog::warn("Omega* was not positive definite (lambda_min = {:.3g}); added {:.3g} * I", lo, shift);
    }
  }
  try {
    return {std::move(q_star), SpdMatrix(SymmetricMatrix(omega_star)), shift};
  } catch (const NotPositiveDefiniteError& e) {
    throw HyperparamError(std::string("Omega* is not positive definite after repair: ") + e.what());
  }
}

}  // namespace blbayes
