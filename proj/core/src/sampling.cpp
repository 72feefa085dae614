#include "blbayes/sampling.hpp"

#include <cmath>

#include <fmt/format.h>

#include "blbayes/errors.hpp"

namespace blbayes {

namespace {

// splitmix64 finaliser; spreads nearby (seed, stream) pairs across the state.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  const std::uint64_t a = mix64(seed);
  const std::uint64_t b = mix64(stream_id ^ 0xd1b54a32d192ed03ULL);
  const std::uint64_t c = mix64(a ^ (b << 1));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return std::mt19937_64(seq);
}

// Lower-triangular Bartlett factor A with A A^T ~ Wishart(dof, I).
Matrix bartlett_factor(double dof, Index n, RngStream& rng) {
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = std::sqrt(rng.chi_square(dof - static_cast<double>(i)));
    for (Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  return a;
}

void check_dof(double dof, Index n) {
  if (!(dof > static_cast<double>(n) - 1.0)) {
    throw DegreesOfFreedomError(
        fmt::format("degrees of freedom {} must exceed n - 1 = {}", dof, n - 1));
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RngStream::uniform() {
  // 53 random bits mapped into (0, 1), never returning an endpoint.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw ParameterError(fmt::format("gamma shape must be > 0, got {}", shape));
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double RngStream::chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

Vector sample_mvn(const Vector& mean, const SpdMatrix& cov, RngStream& rng) {
  if (mean.size() != cov.dim()) {
    throw DimensionError(fmt::format("mvn: mean has {} entries, cov is {}x{}", mean.size(), cov.dim(), cov.dim()));
  }
  Vector z(mean.size());
  for (Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + cov.cholesky_lower() * z;
}

Vector sample_mvn_precision(const Vector& mean, const SpdMatrix& precision, RngStream& rng) {
  if (mean.size() != precision.dim()) {
    throw DimensionError(fmt::format("mvn: mean has {} entries, precision is {}x{}", mean.size(),
                                     precision.dim(), precision.dim()));
  }
  Vector z(mean.size());
  for (Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  // precision = L L^T  =>  L^{-T} z ~ N(0, precision^{-1}).
  const Matrix l = precision.cholesky_lower();
  return mean + l.transpose().triangularView<Eigen::Upper>().solve(z);
}

SpdMatrix sample_wishart(double dof, const SpdMatrix& scale, RngStream& rng) {
  const Index n = scale.dim();
  check_dof(dof, n);
  const Matrix a = bartlett_factor(dof, n, rng);
  const Matrix la = scale.cholesky_lower() * a;
  return SpdMatrix(SymmetricMatrix(la * la.transpose()));
}

SpdMatrix sample_inverse_wishart(double dof, const SpdMatrix& scale, RngStream& rng) {
  const Index n = scale.dim();
  check_dof(dof, n);
  // With scale = U U^T, a Wishart(dof, scale^-1) draw is U^{-T} A A^T U^{-1},
  // so its inverse is (U A^{-T})(U A^{-T})^T.
  const Matrix a = bartlett_factor(dof, n, rng);
  const Matrix u = scale.cholesky_lower();
  const Matrix a_inv_t =
      a.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n)).transpose();
  const Matrix t = u * a_inv_t;
  return SpdMatrix(SymmetricMatrix(t * t.transpose()));
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw ParameterError(
        fmt::format("inverse gamma needs shape > 0 and scale > 0, got ({}, {})", shape, scale));
  }
  return scale / rng.gamma(shape);
}

}  // namespace blbayes
