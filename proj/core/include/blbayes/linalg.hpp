#pragma once

// Dense symmetric-matrix kernels shared by every model: checked symmetric and
// positive-definite wrappers, the matrix log/exp pair, the Vec* stacking
// operator and the completing-the-square identity.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace blbayes {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Square matrix whose storage is exactly symmetric.
///
/// Construction accepts a matrix that is symmetric up to rounding (relative
/// asymmetry at most 1e-10) and stores the exact average of it and its
/// transpose, so entries(i, j) == entries(j, i) bit for bit afterwards.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(const Matrix& m);

  /// Mirrors the upper triangle; the lower triangle of `m` is ignored.
  static SymmetricMatrix from_upper(const Matrix& m);
  static SymmetricMatrix zero(Index n);
  static SymmetricMatrix identity(Index n);

  Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  struct Unchecked {};
  SymmetricMatrix(Matrix m, Unchecked) : m_(std::move(m)) {}

  Matrix m_;
};

/// Symmetric positive-definite matrix with its Cholesky factor and spectrum.
///
/// Rejects any matrix whose smallest eigenvalue is at or below 1e-12 times the
/// largest. Callers that want to regularise a nearly singular matrix must ask
/// for it explicitly through `with_jitter`.
class SpdMatrix {
 public:
  static constexpr double kEigenFloor = 1e-12;

  explicit SpdMatrix(const SymmetricMatrix& a);
  explicit SpdMatrix(const Matrix& a) : SpdMatrix(SymmetricMatrix(a)) {}

  /// Adds 1e-10 * trace / n to the diagonal (logged) before the SPD check.
  static SpdMatrix with_jitter(const SymmetricMatrix& a);
  static SpdMatrix diagonal(const Vector& d);
  static SpdMatrix identity(Index n);

  Index dim() const noexcept { return a_.dim(); }
  const Matrix& matrix() const noexcept { return a_.matrix(); }
  const SymmetricMatrix& symmetric() const noexcept { return a_; }

  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;
  /// Lower-triangular L with L * L^T == matrix().
  Matrix cholesky_lower() const;
  double log_det() const;

  /// Ascending eigenvalues and matching orthonormal eigenvectors (columns).
  const Vector& eigenvalues() const noexcept { return evals_; }
  const Matrix& eigenvectors() const noexcept { return evecs_; }
  double condition_number() const { return evals_(evals_.size() - 1) / evals_(0); }

 private:
  SymmetricMatrix a_;
  Eigen::LLT<Matrix> llt_;
  Vector evals_;
  Matrix evecs_;
};

/// Half-vectorisation of a symmetric matrix, diagonal first and then each
/// super-diagonal in turn: [a11..ann | a12 a23 .. a(n-1)n | ... | a1n].
class VecStarVector {
 public:
  explicit VecStarVector(Vector values);

  Index dim() const noexcept { return v_.size(); }
  Index source_dim() const noexcept { return n_; }
  const Vector& values() const noexcept { return v_; }
  double operator[](Index k) const { return v_(k); }

 private:
  Vector v_;
  Index n_;
};

/// n(n+1)/2.
constexpr Index vec_star_dim(Index n) { return n * (n + 1) / 2; }

/// Position of entry (i, j) of an n x n symmetric matrix inside Vec*.
Index vec_star_index(Index n, Index i, Index j);

/// Inverse of vec_star_dim; throws DimensionError if d is not triangular.
Index vec_star_source_dim(Index d);

VecStarVector vec_star(const SymmetricMatrix& a);
SymmetricMatrix vec_star_inverse(const VecStarVector& v);

/// log(A) = E log(D) E^T for SPD A.
SymmetricMatrix matrix_log_spd(const SpdMatrix& a);

/// exp(A) = E exp(D) E^T. Throws NotPositiveDefiniteError when the spread of
/// the spectrum of A exceeds what SpdMatrix can represent (about 27.6).
SpdMatrix matrix_exp_sym(const SymmetricMatrix& a);

struct CompletedSquare {
  Vector y_star;     ///< (A + B)^-1 (A a + B b)
  SpdMatrix H;       ///< (A^-1 + B^-1)^-1
  SpdMatrix combined;///< A + B
};

/// (y-a)^T A (y-a) + (y-b)^T B (y-b)
///   == (y-y*)^T (A+B) (y-y*) + (a-b)^T H (a-b)   for every y.
CompletedSquare complete_square(const SpdMatrix& a_mat, const Vector& a,
                                const SpdMatrix& b_mat, const Vector& b);

/// Sum over rows r of (r - center)(r - center)^T. Rows are observations.
SymmetricMatrix scatter_about(const Matrix& rows, const Vector& center);

/// Unbiased (n - 1) sample covariance of observation rows.
SymmetricMatrix sample_covariance(const Matrix& rows);

/// ||a - b||_F / ||b||_F, or the absolute norm when b is zero.
double relative_frobenius(const Matrix& a, const Matrix& b);

}  // namespace blbayes
