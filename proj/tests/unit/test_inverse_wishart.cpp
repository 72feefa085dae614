#include <cmath>

#include <gtest/gtest.h>

#include "blbayes/errors.hpp"
#include "blbayes/inverse_wishart.hpp"
#include "oracles.hpp"

namespace blbayes {
namespace {

using oracle::Rng;

ModelInputs synthetic_inputs(Index n, Index m, Index hist, std::uint64_t seed, const Matrix& sigma,
                             const Vector& mu) {
  RngStream rng(seed, 5);
  const SpdMatrix cov(sigma);
  ModelInputs in;
  in.current.resize(m, n);
  in.historical.resize(hist, n);
  for (Index t = 0; t < m; ++t) in.current.row(t) = sample_mvn(mu, cov, rng).transpose();
  for (Index t = 0; t < hist; ++t) in.historical.row(t) = sample_mvn(mu, cov, rng).transpose();
  if (hist >= m) in.monthly_means = monthly_means(in.historical, m);
  return in;
}

TEST(MuConditional, ScalarByHand) {
  // m = 4, Sigma = 1, Omega = 1, P = 1, q = 0, rbar = 1: precision 5, mean 4/5.
  const ViewSet v(Matrix::Ones(1, 1), Vector::Zero(1), Vector::Ones(1));
  const GaussianConditional c = mu_conditional(Vector::Ones(1), SpdMatrix::identity(1), ViewPrecision::from_views(v), 4);
  EXPECT_NEAR(c.mean(0), 0.8, 1e-15);
  EXPECT_NEAR(c.cov.matrix()(0, 0), 0.2, 1e-15);
}

TEST(MuConditional, MatchesKnownSigmaLinearModelOracle) {
  // Stack the m observations and the k views as one linear model
  //   y = X mu + e, e ~ N(0, blockdiag(I_m (x) Sigma, Omega))
  // with a flat prior; the posterior is (X' W X)^-1 X' W y.
  Rng g(41);
  for (int rep = 0; rep < 10; ++rep) {
    const Index n = oracle::uniform_int(g, 2, 5);
    const Index k = oracle::uniform_int(g, 1, n);
    const Index m = oracle::uniform_int(g, 3, 12);
    const Matrix sigma = oracle::random_spd_matrix(n, g, 0.5, 2.0);
    const Matrix r = oracle::random_matrix(m, n, g);
    Vector omega(k);
    for (Index i = 0; i < k; ++i) omega(i) = oracle::uniform(g, 0.1, 2.0);
    const ViewSet v(oracle::random_matrix(k, n, g), oracle::random_vector(k, g), omega);

    const Index rows = m * n + k;
    Matrix x = Matrix::Zero(rows, n);
    Vector y(rows);
    Matrix w = Matrix::Zero(rows, rows);
    const Matrix sigma_inv = sigma.inverse();
    for (Index t = 0; t < m; ++t) {
      x.block(t * n, 0, n, n) = Matrix::Identity(n, n);
      y.segment(t * n, n) = r.row(t).transpose();
      w.block(t * n, t * n, n, n) = sigma_inv;
    }
    x.bottomRows(k) = v.P();
    y.tail(k) = v.q();
    w.bottomRightCorner(k, k) = omega.cwiseInverse().asDiagonal();
    const Matrix xtwx = x.transpose() * w * x;
    const Vector mean = xtwx.partialPivLu().solve(x.transpose() * w * y);
    const Matrix cov = xtwx.inverse();

    const GaussianConditional c =
        mu_conditional(r.colwise().mean().transpose(), SpdMatrix(sigma), ViewPrecision::from_views(v), m);
    EXPECT_LT((c.mean - mean).norm(), 1e-10 * std::max(1.0, mean.norm()));
    EXPECT_LT((c.cov.matrix() - cov).norm(), 1e-10 * std::max(1.0, cov.norm()));
  }
}

TEST(MuConditional, DenseAndDiagonalViewPrecisionAgree) {
  const ViewSet v = oracle::demo_views(2e-4, 5e-4);
  const ViewPrecision a = ViewPrecision::from_views(v);
  const ViewPrecision b = ViewPrecision::from_dense(v.P(), v.q(), v.Omega());
  EXPECT_LT((a.PtOinvP - b.PtOinvP).norm(), 1e-9 * a.PtOinvP.norm());
  EXPECT_LT((a.PtOinvq - b.PtOinvq).norm(), 1e-9 * a.PtOinvq.norm());
}

TEST(SigmaConditional, ScalarByHand) {
  // nu = 3, Sigma0 = 1, m = 2, sum (r - mu)^2 = 2: IW(5, 3).
  const IwParams p = sigma_conditional(SymmetricMatrix(Matrix::Constant(1, 1, 2.0)), 3.0, SpdMatrix::identity(1), 2);
  EXPECT_DOUBLE_EQ(p.dof, 5.0);
  EXPECT_DOUBLE_EQ(p.scale.matrix()(0, 0), 3.0);
}

TEST(SigmaConditional, PosteriorMeanApproachesTruthForLargeM) {
  Rng g(42);
  const Index n = 3;
  const Matrix sigma = oracle::random_spd_matrix(n, g, 0.5, 2.0);
  const Vector mu = oracle::random_vector(n, g);
  RngStream rng(42, 0);
  const Index m = 10000;
  Matrix r(m, n);
  for (Index t = 0; t < m; ++t) r.row(t) = sample_mvn(mu, SpdMatrix(sigma), rng).transpose();
  const IwParams p = sigma_conditional(scatter_about(r, mu), n + 2.0, SpdMatrix::identity(n), m);
  const Matrix mean = p.scale.matrix() / (p.dof - n - 1.0);
  EXPECT_LT(relative_frobenius(mean, sigma), 0.1);
}

TEST(OmegaFloor, DefaultAndOverride) {
  EXPECT_NO_THROW(check_omega_floor(Vector::Constant(2, 1e-6), kOmegaFloorAugmented, std::nullopt));
  EXPECT_THROW(check_omega_floor(Vector::Constant(2, 1e-7), kOmegaFloorAugmented, std::nullopt), ParameterError);
  EXPECT_NO_THROW(check_omega_floor(Vector::Constant(2, 1e-7), kOmegaFloorAugmented, 1e-8));
  EXPECT_THROW(check_omega_floor(Vector::Constant(2, 1e-13), kOmegaFloorAugmented, 1e-20), ParameterError);
}

IwConfig short_chain(std::uint64_t seed, long iterations = 3000, long burn = 500) {
  IwConfig cfg;
  cfg.iterations = iterations;
  cfg.burn = burn;
  cfg.seed = seed;
  return cfg;
}

TEST(GibbsNonsquare, FixedSigmaMeanMatchesClosedFormConditional) {
  Rng g(43);
  const Matrix sigma = oracle::random_spd_matrix(4, g, 1e-4, 4e-4);
  const ModelInputs data = synthetic_inputs(4, 21, 200, 43, sigma, Vector::Constant(4, 5e-4));
  const ViewSet v = oracle::demo_views(1e-4, 1e-4);
  IwConfig cfg = short_chain(43, 11000, 1000);
  cfg.fixed_sigma = SpdMatrix(sigma);
  const PosteriorSummary s = gibbs_nonsquare(data, v, cfg);
  const GaussianConditional exact = mu_conditional(data.rbar(), SpdMatrix(sigma), ViewPrecision::from_views(v), 21);
  for (Index i = 0; i < 4; ++i) {
    EXPECT_LT(std::abs(s.mu_post(i) - exact.mean(i)), 4.0 * s.mc_se(i)) << "coordinate " << i;
    EXPECT_NEAR(s.posterior_sd(i), std::sqrt(exact.cov.matrix()(i, i)), 0.05 * std::sqrt(exact.cov.matrix()(i, i)));
  }
  EXPECT_LT(relative_frobenius(s.Sigma_post, sigma), 1e-12);
}

TEST(GibbsNonsquare, VagueViewsAndLargeMRecoverSampleMean) {
  Rng g(44);
  const Matrix sigma = oracle::random_spd_matrix(3, g, 1e-4, 4e-4);
  const ModelInputs data = synthetic_inputs(3, 2000, 300, 44, sigma, Vector::Constant(3, 1e-3));
  Matrix p(1, 3);
  p << 1, -1, 0;
  const ViewSet v(p, Vector::Constant(1, 0.5), Vector::Constant(1, 1e-4));
  IwConfig cfg = short_chain(44);
  cfg.vague_views = true;
  const PosteriorSummary s = gibbs_nonsquare(data, v, cfg);
  for (Index i = 0; i < 3; ++i) EXPECT_LT(std::abs(s.mu_post(i) - data.rbar()(i)), 3.0 * s.posterior_sd(i));
}

TEST(GibbsNonsquare, SigmaDrawsStayPositiveDefiniteAndSummaryIsSymmetric) {
  Rng g(45);
  const Matrix sigma = oracle::random_spd_matrix(4, g, 1e-4, 4e-4);
  const ModelInputs data = synthetic_inputs(4, 21, 300, 45, sigma, Vector::Zero(4));
  long seen = 0;
  const PosteriorSummary s = gibbs_nonsquare(data, oracle::demo_views(), short_chain(45, 600, 100),
                                             [&](long, const Vector& mu, double log_det, int accepted) {
                                               EXPECT_TRUE(std::isfinite(log_det));
                                               EXPECT_TRUE(mu.allFinite());
                                               EXPECT_EQ(accepted, -1);
                                               ++seen;
                                             });
  EXPECT_EQ(seen, 600);
  EXPECT_EQ(s.mu_trace.rows(), 500);
  EXPECT_EQ(s.Sigma_post, s.Sigma_post.transpose());
  EXPECT_GT(SpdMatrix(s.Sigma_post).eigenvalues()(0), 0.0);
  EXPECT_EQ(s.acceptance_rate, 1.0);
}

TEST(GibbsNonsquare, RepeatableForAFixedSeed) {
  Rng g(46);
  const Matrix sigma = oracle::random_spd_matrix(4, g, 1e-4, 4e-4);
  const ModelInputs data = synthetic_inputs(4, 21, 300, 46, sigma, Vector::Zero(4));
  const PosteriorSummary a = gibbs_nonsquare(data, oracle::demo_views(), short_chain(7, 500, 100));
  const PosteriorSummary b = gibbs_nonsquare(data, oracle::demo_views(), short_chain(7, 500, 100));
  const PosteriorSummary c = gibbs_nonsquare(data, oracle::demo_views(), short_chain(8, 500, 100));
  EXPECT_EQ(a.mu_trace, b.mu_trace);
  EXPECT_EQ(a.Sigma_post, b.Sigma_post);
  EXPECT_NE(a.mu_post, c.mu_post);
}

TEST(GibbsNonsquare, RejectsBadConfiguration) {
  Rng g(47);
  const Matrix sigma = oracle::random_spd_matrix(4, g, 1e-4, 4e-4);
  const ModelInputs data = synthetic_inputs(4, 21, 300, 47, sigma, Vector::Zero(4));
  IwConfig cfg = short_chain(1, 100, 100);
  EXPECT_THROW(gibbs_nonsquare(data, oracle::demo_views(), cfg), ParameterError);
  cfg = short_chain(1, 100, 10);
  cfg.nu = 3.0;
  EXPECT_THROW(gibbs_nonsquare(data, oracle::demo_views(), cfg), DegreesOfFreedomError);
  cfg.nu = 4.5;  // allowed, but the default Sigma0 = (nu - n - 1) Sigma_hist needs nu > n + 1
  EXPECT_THROW(gibbs_nonsquare(data, oracle::demo_views(), cfg), HyperparamError);
  EXPECT_THROW(gibbs_nonsquare(data, oracle::demo_views(1e-10, 1e-4), short_chain(1, 100, 10)), ParameterError);
}

TEST(CrossModel, SquareInvertibleViewsGiveTheSameAnswer) {
  // With P square and invertible, P* = P and Omega* = Omega; the two samplers
  // target the same posterior once the augmented prior scale matches.
  Rng g(48);
  const Matrix sigma = oracle::random_spd_matrix(3, g, 1e-4, 4e-4);
  const ModelInputs data = synthetic_inputs(3, 21, 300, 48, sigma, Vector::Constant(3, 5e-4));
  Matrix p(3, 3);
  p << 1, -1, 0,  //
      0, 1, -1,   //
      0, 0, 1;
  Vector q(3);
  q << 0.002, -0.001, 0.001;
  const ViewSet v(p, q, Vector::Constant(3, 1e-5));
  const PosteriorSummary a = gibbs_nonsquare(data, v, short_chain(48, 11000, 1000));
  const PosteriorSummary b = gibbs_augmented(data, v, short_chain(49, 11000, 1000));
  for (Index i = 0; i < 3; ++i) {
    const double se = std::hypot(a.mc_se(i), b.mc_se(i));
    EXPECT_LT(std::abs(a.mu_post(i) - b.mu_post(i)), 3.0 * se) << "coordinate " << i;
  }
  EXPECT_EQ(b.omega_repair_shift, 0.0);
}

TEST(GibbsAugmented, AnchorsToViewsAsOmegaShrinks) {
  Rng g(49);
  const Matrix sigma = oracle::random_spd_matrix(4, g, 1e-4, 4e-4);
  const ModelInputs data = synthetic_inputs(4, 21, 400, 49, sigma, Vector::Constant(4, 5e-4));
  const ViewSet tight = oracle::demo_views(1e-6, 1e-6);
  const ViewSet loose = oracle::demo_views(1e-2, 1e-2);
  const PosteriorSummary a = gibbs_augmented(data, tight, short_chain(50));
  const PosteriorSummary b = gibbs_augmented(data, loose, short_chain(50));
  const double da = (tight.P() * a.mu_post - tight.q()).norm();
  const double db = (loose.P() * b.mu_post - loose.q()).norm();
  EXPECT_LT(da, db);
  EXPECT_LT(da, 0.005);
}

}  // namespace
}  // namespace blbayes
