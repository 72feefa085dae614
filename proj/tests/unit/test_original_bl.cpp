#include <gtest/gtest.h>

#include "blbayes/errors.hpp"
#include "blbayes/original_bl.hpp"
#include "oracles.hpp"

namespace blbayes {
namespace {

using oracle::Rng;

// Two-asset desk instance; reference values computed independently with
// dense float64 linear algebra in numpy.
struct TwoAsset {
  SpdMatrix sigma{Matrix{{0.04, 0.01}, {0.01, 0.09}}};
  Vector w_eq{Vector::Constant(2, 0.5)};
  ViewSet views{Matrix{{1.0, -1.0}}, Vector::Constant(1, 0.02), Vector::Constant(1, 0.001)};
  EquilibriumInputs inputs() const { return {2.5, w_eq, sigma, 0.05}; }
};

TEST(OriginalBl, EquilibriumReturnsByHand) {
  const TwoAsset c;
  const Vector pi = equilibrium_returns(c.inputs());
  EXPECT_NEAR(pi(0), 0.0625, 1e-15);
  EXPECT_NEAR(pi(1), 0.125, 1e-15);
}

TEST(OriginalBl, PosteriorMatchesFrozenReference) {
  const TwoAsset c;
  const BlPosterior post = bl_posterior(equilibrium_returns(c.inputs()), 0.05, c.sigma, c.views);
  EXPECT_NEAR(post.mu_bar(0), 0.08153846153846152, 1e-14);
  EXPECT_NEAR(post.mu_bar(1), 0.07423076923076921, 1e-14);
  EXPECT_NEAR(post.M_inv.matrix()(0, 0), 0.00165384615384615, 1e-14);
  EXPECT_NEAR(post.M_inv.matrix()(0, 1), 0.00142307692307692, 1e-14);
  EXPECT_NEAR(post.M_inv.matrix()(1, 1), 0.00203846153846154, 1e-14);
  EXPECT_LT((post.Sigma_bar.matrix() - post.M_inv.matrix() - c.sigma.matrix()).cwiseAbs().maxCoeff(), 1e-12);

  const Vector w = optimal_weights(post.mu_bar, post.Sigma_bar, 2.5);
  EXPECT_NEAR(w(0), 0.7190112686295891, 1e-12);
  EXPECT_NEAR(w(1), 0.23336968375136308, 1e-12);
}

TEST(OriginalBl, PosteriorMatchesGridBayesOracle) {
  const TwoAsset c;
  const Vector pi = equilibrium_returns(c.inputs());
  const BlPosterior post = bl_posterior(pi, 0.05, c.sigma, c.views);
  const Vector grid = oracle::grid_posterior_mean(pi, 0.05 * c.sigma.matrix(), c.views.P(), c.views.q(),
                                                  c.views.omega());
  EXPECT_LT((grid - post.mu_bar).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(OriginalBl, ViewlessPosteriorIsThePrior) {
  const TwoAsset c;
  const Vector pi = equilibrium_returns(c.inputs());
  const BlPosterior post = bl_posterior(pi, 0.05, c.sigma);
  EXPECT_EQ(post.mu_bar, pi);
  EXPECT_LT((post.Sigma_bar.matrix() - 1.05 * c.sigma.matrix()).norm(), 1e-15);
}

TEST(OriginalBl, ConfidentViewsAreMatchedAndVagueViewsIgnored) {
  const TwoAsset c;
  const Vector pi = equilibrium_returns(c.inputs());
  const BlPosterior tight = bl_posterior(pi, 0.05, c.sigma, c.views.with_omega(Vector::Constant(1, 1e-12)));
  EXPECT_NEAR((c.views.P() * tight.mu_bar)(0), 0.02, 1e-8);
  const BlPosterior loose = bl_posterior(pi, 0.05, c.sigma, c.views.with_omega(Vector::Constant(1, 1e12)));
  EXPECT_LT((loose.mu_bar - pi).norm(), 1e-12);
}

TEST(OriginalBl, WeightsScalarByHand) {
  const Vector w =
      optimal_weights(Vector::Constant(1, 0.05), SpdMatrix::diagonal(Vector::Constant(1, 0.04)), 2.5);
  EXPECT_NEAR(w(0), 0.5, 1e-15);
  EXPECT_THROW(optimal_weights(Vector::Constant(1, 0.05), SpdMatrix::identity(1), 0.0), ParameterError);
}

TEST(WeightDecomposition, ScalarTermsByHand) {
  // Sigma = 0.04, w_eq = 1, lambda = 2.5, tau = 0.05, P = 1, q = 0.06, omega = 0.01:
  //   A      = 0.01/0.05 + 0.04/1.05                 = 0.238095238...
  //   term 1 = 0.05 * 100 * 0.06 / 2.5                = 0.12
  //   term 2 = 0.04 / (1.05 A)                        = 0.16
  //   term 3 = 0.04 * 0.05 * 100 * 0.06 / (2.5 1.05 A) = 0.0192
  //   delta  = 0.12 - 0.16 - 0.0192                   = -0.0592
  //   w*     = (1 - 0.0592) / 1.05                    = 0.896
  const EquilibriumInputs inp{2.5, Vector::Ones(1), SpdMatrix::diagonal(Vector::Constant(1, 0.04)), 0.05};
  const ViewSet v(Matrix::Ones(1, 1), Vector::Constant(1, 0.06), Vector::Constant(1, 0.01));
  const WeightDecomposition wd = weight_decomposition(inp, v);
  EXPECT_NEAR(wd.delta(0), -0.0592, 1e-14);
  EXPECT_NEAR(wd.w_star(0), 0.896, 1e-14);

  const BlPosterior post = bl_posterior(equilibrium_returns(inp), 0.05, inp.Sigma, v);
  EXPECT_NEAR(post.mu_bar(0), 0.0933333333333333, 1e-13);
  EXPECT_NEAR(post.Sigma_bar.matrix()(0, 0), 0.0416666666666667, 1e-13);
}

TEST(WeightDecomposition, EqualsDirectWeightsOnRandomInstances) {
  Rng g(31);
  for (int rep = 0; rep < 50; ++rep) {
    const Index n = oracle::uniform_int(g, 2, 8);
    const Index k = oracle::uniform_int(g, 1, n);
    const SpdMatrix sigma = oracle::random_spd(n, g, 0.01, 0.2);
    Vector w_eq = oracle::random_vector(n, g).cwiseAbs();
    w_eq /= w_eq.sum();
    const EquilibriumInputs inp{oracle::uniform(g, 1.0, 4.0), w_eq, sigma, oracle::uniform(g, 0.01, 0.5)};
    Vector omega(k);
    for (Index i = 0; i < k; ++i) omega(i) = std::exp(oracle::uniform(g, -9.0, -2.0));
    const ViewSet v(oracle::random_matrix(k, n, g), oracle::random_vector(k, g) * 0.05, omega);

    const WeightDecomposition wd = weight_decomposition(inp, v);
    const BlPosterior post = bl_posterior(equilibrium_returns(inp), inp.tau, sigma, v);
    const Vector direct = optimal_weights(post.mu_bar, post.Sigma_bar, inp.lambda);
    EXPECT_LE((wd.w_star - direct).norm() / direct.norm(), 1e-9) << "instance " << rep;
  }
}

TEST(WeightDecomposition, FourAssetTwoViewSetup) {
  Rng g(32);
  const SpdMatrix sigma = oracle::random_spd(4, g, 1e-4, 4e-4);
  const EquilibriumInputs inp{2.5, Vector::Constant(4, 0.25), sigma, 0.05};
  const ViewSet v = oracle::demo_views(1e-4, 1e-4);
  const WeightDecomposition wd = weight_decomposition(inp, v);
  const BlPosterior post = bl_posterior(equilibrium_returns(inp), 0.05, sigma, v);
  const Vector direct = optimal_weights(post.mu_bar, post.Sigma_bar, 2.5);
  EXPECT_LE((wd.w_star - direct).norm() / direct.norm(), 1e-9);
  EXPECT_EQ(wd.delta.size(), 2);
}

TEST(WeightDecomposition, NegatingAViewNegatesItsLoading) {
  // Flipping the sign of a view row and its q leaves the model unchanged and
  // flips the corresponding loading.
  Rng g(33);
  const SpdMatrix sigma = oracle::random_spd(3, g, 0.01, 0.1);
  const EquilibriumInputs inp{2.5, Vector::Constant(3, 1.0 / 3.0), sigma, 0.05};
  Matrix p(1, 3);
  p << 1, -1, 0;
  const ViewSet v(p, Vector::Constant(1, 0.03), Vector::Constant(1, 1e-3));
  const ViewSet flipped(-p, Vector::Constant(1, -0.03), Vector::Constant(1, 1e-3));
  const WeightDecomposition a = weight_decomposition(inp, v);
  const WeightDecomposition b = weight_decomposition(inp, flipped);
  EXPECT_NEAR(a.delta(0), -b.delta(0), 1e-14);
  EXPECT_LT((a.w_star - b.w_star).norm(), 1e-14);
}

TEST(EquilibriumInputs, Validation) {
  const TwoAsset c;
  EquilibriumInputs bad = c.inputs();
  bad.lambda = 0.0;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = c.inputs();
  bad.tau = -1.0;
  EXPECT_THROW(bad.validate(), ParameterError);
  bad = c.inputs();
  bad.w_eq = Vector::Ones(3);
  EXPECT_THROW(bad.validate(), DimensionError);
}

}  // namespace
}  // namespace blbayes
