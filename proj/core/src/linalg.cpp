#include "blbayes/linalg.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "blbayes/errors.hpp"

namespace blbayes {

namespace {

constexpr double kSymmetryTolerance = 1e-10;

Matrix apply_spectral(const Matrix& evecs, const Vector& values) {
  return evecs * values.asDiagonal() * evecs.transpose();
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError(fmt::format(
        "symmetric matrix must be square with dim >= 1, got {}x{}", m.rows(), m.cols()));
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTolerance * scale)) {
    throw SymmetryError(fmt::format("matrix is not symmetric (max |a_ij - a_ji| = {:.3g})", asym));
  }
  m_ = 0.5 * (m + m.transpose());
}

SymmetricMatrix SymmetricMatrix::from_upper(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError(fmt::format("expected a square matrix, got {}x{}", m.rows(), m.cols()));
  }
  Matrix out = m.triangularView<Eigen::Upper>();
  out.triangularView<Eigen::StrictlyLower>() = out.transpose().triangularView<Eigen::StrictlyLower>();
  return SymmetricMatrix(std::move(out), Unchecked{});
}

SymmetricMatrix SymmetricMatrix::zero(Index n) {
  if (n < 1) throw DimensionError("dim must be >= 1");
  return SymmetricMatrix(Matrix::Zero(n, n), Unchecked{});
}

SymmetricMatrix SymmetricMatrix::identity(Index n) {
  if (n < 1) throw DimensionError("dim must be >= 1");
  return SymmetricMatrix(Matrix::Identity(n, n), Unchecked{});
}

SpdMatrix::SpdMatrix(const SymmetricMatrix& a) : a_(a) {
  if (!a_.matrix().allFinite()) {
    throw NotPositiveDefiniteError("matrix has non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a_.matrix());
  if (eig.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("eigendecomposition failed");
  }
  evals_ = eig.eigenvalues();
  evecs_ = eig.eigenvectors();
  const double lo = evals_(0);
  const double hi = evals_(evals_.size() - 1);
  if (!(hi > 0.0) || !(lo > kEigenFloor * hi)) {
    throw NotPositiveDefiniteError(fmt::format(
        "matrix is not positive definite (eigenvalues in [{:.6g}, {:.6g}], floor {:.1g} x max)",
        lo, hi, kEigenFloor));
  }
  llt_.compute(a_.matrix());
  if (llt_.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("Cholesky factorization failed");
  }
}

SpdMatrix SpdMatrix::with_jitter(const SymmetricMatrix& a) {
  const Index n = a.dim();
  const double jitter = 1e-10 * a.matrix().trace() / static_cast<double>(n);
  spdlog::info("adding diagonal jitter {:.3g} to {}x{} matrix", jitter, n, n);
  Matrix m = a.matrix();
  m.diagonal().array() += jitter;
  return SpdMatrix(SymmetricMatrix(m));
}

SpdMatrix SpdMatrix::diagonal(const Vector& d) {
  return SpdMatrix(SymmetricMatrix(Matrix(d.asDiagonal())));
}

SpdMatrix SpdMatrix::identity(Index n) { return SpdMatrix(SymmetricMatrix::identity(n)); }

Vector SpdMatrix::solve(const Vector& b) const {
  if (b.size() != dim()) {
    throw DimensionError(fmt::format("solve: rhs has {} rows, matrix is {}x{}", b.size(), dim(), dim()));
  }
  return llt_.solve(b);
}

Matrix SpdMatrix::solve(const Matrix& b) const {
  if (b.rows() != dim()) {
    throw DimensionError(fmt::format("solve: rhs has {} rows, matrix is {}x{}", b.rows(), dim(), dim()));
  }
  return llt_.solve(b);
}

Matrix SpdMatrix::inverse() const {
  Matrix inv = llt_.solve(Matrix::Identity(dim(), dim()));
  return 0.5 * (inv + inv.transpose());
}

Matrix SpdMatrix::cholesky_lower() const { return llt_.matrixL(); }

double SpdMatrix::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

VecStarVector::VecStarVector(Vector values) : v_(std::move(values)), n_(vec_star_source_dim(v_.size())) {}

Index vec_star_source_dim(Index d) {
  if (d < 1) throw DimensionError("Vec* length must be >= 1");
  const auto n = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(d) + 1.0) - 1.0) / 2.0));
  if (vec_star_dim(n) != d) {
    throw DimensionError(fmt::format("length {} is not of the form n(n+1)/2", d));
  }
  return n;
}

Index vec_star_index(Index n, Index i, Index j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n) {
    throw DimensionError(fmt::format("entry ({}, {}) outside a {}x{} matrix", i, j, n, n));
  }
  const Index offset = j - i;
  // Each earlier diagonal o contributes n - o entries.
  return offset * n - offset * (offset - 1) / 2 + i;
}

VecStarVector vec_star(const SymmetricMatrix& a) {
  const Index n = a.dim();
  Vector v(vec_star_dim(n));
  Index k = 0;
  for (Index offset = 0; offset < n; ++offset) {
    for (Index i = 0; i + offset < n; ++i) {
      v(k++) = a(i, i + offset);
    }
  }
  return VecStarVector(std::move(v));
}

SymmetricMatrix vec_star_inverse(const VecStarVector& v) {
  const Index n = v.source_dim();
  Matrix m(n, n);
  Index k = 0;
  for (Index offset = 0; offset < n; ++offset) {
    for (Index i = 0; i + offset < n; ++i) {
      m(i, i + offset) = v[k];
      m(i + offset, i) = v[k];
      ++k;
    }
  }
  return SymmetricMatrix::from_upper(m);
}

SymmetricMatrix matrix_log_spd(const SpdMatrix& a) {
  return SymmetricMatrix(apply_spectral(a.eigenvectors(), a.eigenvalues().array().log().matrix()));
}

SpdMatrix matrix_exp_sym(const SymmetricMatrix& a) {
  if (!a.matrix().allFinite()) {
    throw NotPositiveDefiniteError("matrix exponential of a non-finite matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a.matrix());
  if (eig.info() != Eigen::Success) {
    throw NotPositiveDefiniteError("eigendecomposition failed in matrix exponential");
  }
  const Vector& ev = eig.eigenvalues();
  // Shift by the largest eigenvalue so the exponentials cannot overflow.
  const double top = ev(ev.size() - 1);
  const Vector scaled = (ev.array() - top).exp().matrix();
  Matrix out = apply_spectral(eig.eigenvectors(), scaled) * std::exp(top);
  return SpdMatrix(SymmetricMatrix(out));
}

CompletedSquare complete_square(const SpdMatrix& a_mat, const Vector& a, const SpdMatrix& b_mat,
                                const Vector& b) {
  const Index p = a_mat.dim();
  if (b_mat.dim() != p || a.size() != p || b.size() != p) {
    throw DimensionError(fmt::format("complete_square: dims A={} a={} B={} b={}", p, a.size(),
                                     b_mat.dim(), b.size()));
  }
  SpdMatrix combined(SymmetricMatrix(a_mat.matrix() + b_mat.matrix()));
  Vector y_star = combined.solve(Vector(a_mat.matrix() * a + b_mat.matrix() * b));
  // A (A+B)^-1 B equals (A^-1 + B^-1)^-1 and avoids inverting A and B separately.
  Matrix h = a_mat.matrix() * combined.solve(b_mat.matrix());
  return {std::move(y_star), SpdMatrix(SymmetricMatrix(0.5 * (h + h.transpose()))), std::move(combined)};
}

SymmetricMatrix scatter_about(const Matrix& rows, const Vector& center) {
  if (rows.cols() != center.size()) {
    throw DimensionError(fmt::format("scatter: rows have {} columns, center has {}", rows.cols(),
                                     center.size()));
  }
  const Matrix centered = rows.rowwise() - center.transpose();
  Matrix s = centered.transpose() * centered;
  return SymmetricMatrix(0.5 * (s + s.transpose()));
}

SymmetricMatrix sample_covariance(const Matrix& rows) {
  if (rows.rows() < 2) {
    throw InsufficientDataError(fmt::format("sample covariance needs >= 2 rows, got {}", rows.rows()));
  }
  const Vector mean = rows.colwise().mean().transpose();
  return SymmetricMatrix(scatter_about(rows, mean).matrix() / static_cast<double>(rows.rows() - 1));
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
  const double denom = b.norm();
  const double diff = (a - b).norm();
  return denom > 0.0 ? diff / denom : diff;
}

}  // namespace blbayes
