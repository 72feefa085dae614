#pragma once

#include <cstdint>
#include <random>

#include "blbayes/linalg.hpp"

namespace blbayes {

/// Seeded pseudo-random stream. Identical (seed, stream_id) pairs give
/// identical variate sequences on the same build; distinct stream ids give
/// independent sequences. Not thread-safe: one stream per task.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Uniform on (0, 1).
  double uniform();
  double normal();
  /// Gamma(shape, scale = 1).
  double gamma(double shape);
  double chi_square(double dof);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Draw from N(mean, cov).
Vector sample_mvn(const Vector& mean, const SpdMatrix& cov, RngStream& rng);

/// Draw from N(mean, precision^-1) without forming the covariance.
Vector sample_mvn_precision(const Vector& mean, const SpdMatrix& precision, RngStream& rng);

/// Wishart(dof, scale) via the Bartlett decomposition; dof > n - 1, real.
SpdMatrix sample_wishart(double dof, const SpdMatrix& scale, RngStream& rng);

/// Inverse-Wishart draw with density proportional to
///   det(X)^{-(dof + n + 1)/2} exp{-tr(scale X^-1) / 2},
/// so E[X] = scale / (dof - n - 1) when dof > n + 1. Sampled as the inverse of
/// a Wishart(dof, scale^-1) Bartlett draw. Requires dof > n - 1.
SpdMatrix sample_inverse_wishart(double dof, const SpdMatrix& scale, RngStream& rng);

/// Inverse-Gamma with density proportional to x^{-shape-1} exp(-scale / x).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);

}  // namespace blbayes
