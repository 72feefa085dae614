#include <cmath>

#include <gtest/gtest.h>

#include "blbayes/backtest.hpp"
#include "blbayes/engine.hpp"
#include "blbayes/errors.hpp"
#include "blbayes/sweep.hpp"
#include "oracles.hpp"

namespace blbayes {
namespace {

TEST(Backtest, BuyAndHoldProfit) {
  Matrix r(2, 2);
  r << 0.10, -0.05,  //
      0.10, 0.00;
  Vector w(2);
  w << 0.5, -0.25;
  const BacktestResult b = backtest_profit(w, r, 1000.0);
  // 500 * (1.21 - 1) - 250 * (0.95 - 1) = 105 + 12.5
  ASSERT_EQ(b.daily_curve.size(), 2u);
  EXPECT_NEAR(b.daily_curve[0], 500 * 0.1 + 250 * 0.05, 1e-12);
  EXPECT_NEAR(b.profit, 117.5, 1e-12);
}

TEST(Backtest, ProfitIsLinearInWeights) {
  oracle::Rng g(71);
  const Matrix r = 0.01 * oracle::random_matrix(15, 3, g);
  const Vector a = oracle::random_vector(3, g);
  const Vector b = oracle::random_vector(3, g);
  const double pa = backtest_profit(a, r, 1e5).profit;
  const double pb = backtest_profit(b, r, 1e5).profit;
  EXPECT_NEAR(backtest_profit(a + 2.0 * b, r, 1e5).profit, pa + 2.0 * pb, 1e-8);
  EXPECT_EQ(backtest_profit(Vector::Zero(3), r, 1e5).profit, 0.0);
}

TEST(Backtest, Errors) {
  EXPECT_THROW(backtest_profit(Vector::Ones(2), Matrix(0, 2), 1.0), InsufficientDataError);
  EXPECT_THROW(backtest_profit(Vector::Ones(3), Matrix::Zero(4, 2), 1.0), DimensionError);
}

TEST(ViewDistance, HandValueAndNonNegativity) {
  Vector mu(2), q(2);
  mu << 0.1, 0.2;
  q << 0.1, 0.1;
  EXPECT_DOUBLE_EQ(view_distance(Matrix::Identity(2, 2), mu, q), 0.1);
  oracle::Rng g(72);
  for (int i = 0; i < 50; ++i) {
    EXPECT_GE(view_distance(oracle::random_matrix(2, 4, g), oracle::random_vector(4, g), oracle::random_vector(2, g)),
              0.0);
  }
}

TEST(Linspace, Endpoints) {
  const auto v = linspace(1e-6, 1e-5, 4);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v.front(), 1e-6);
  EXPECT_EQ(v.back(), 1e-5);
  EXPECT_NEAR(v[1], 4e-6, 1e-20);
  EXPECT_EQ(linspace(3.0, 9.0, 1), std::vector<double>{3.0});
  EXPECT_THROW(linspace(1.0, 2.0, 0), ParameterError);
}

TEST(SweepGrid, Validation) {
  SweepGrid grid;
  EXPECT_THROW(grid.validate(), ParameterError);
  grid.blocks.push_back({{1e-4}, {0.0}});
  EXPECT_THROW(grid.validate(), ParameterError);
  grid.blocks[0].omega2_values = {1e-4, 2e-4};
  EXPECT_NO_THROW(grid.validate());
  EXPECT_EQ(grid.points().size(), 2u);
}

ReturnPanel demo_panel() {
  return compute_returns(load_price_panel(oracle::data_path("demo_prices.csv")), 21, parse_date("2018-01-02"));
}

ModelConfig quick_config(ModelId model) {
  ModelConfig cfg;
  cfg.model = model;
  cfg.iterations = 600;
  cfg.burn = 100;
  return cfg;
}

TEST(Sweep, OutputIndependentOfWorkerCount) {
  const ReturnPanel data = demo_panel();
  SweepGrid grid;
  grid.model = ModelId::iw_nonsquare;
  grid.base_seed = 11;
  grid.blocks.push_back({linspace(1e-5, 1e-4, 3), linspace(1e-5, 1e-4, 3)});
  grid.blocks.push_back({{1e-3}, {1e-6}});
  const ModelConfig cfg = quick_config(ModelId::iw_nonsquare);
  const std::string one = sweep_csv(run_sweep(grid, data, oracle::demo_views(), cfg, 1e5, 1));
  const std::string eight = sweep_csv(run_sweep(grid, data, oracle::demo_views(), cfg, 1e5, 8));
  EXPECT_EQ(one, eight);
  EXPECT_EQ(one.substr(0, one.find('\n')), "omega1,omega2,distance,profit,status,acceptance_rate,seed");
}

TEST(Sweep, FailedPointIsRecordedNotFatal) {
  const ReturnPanel data = demo_panel();
  SweepGrid grid;
  grid.model = ModelId::iw_augmented;
  grid.blocks.push_back({{1e-7, 1e-4}, {1e-4}});  // 1e-7 is below the augmented floor
  const auto recs = run_sweep(grid, data, oracle::demo_views(), quick_config(ModelId::iw_augmented), 1e5, 2);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].omega1, 1e-7);
  EXPECT_EQ(recs[0].status, "error");
  EXPECT_TRUE(std::isnan(recs[0].distance));
  EXPECT_NE(recs[0].message.find("floor"), std::string::npos);
  EXPECT_EQ(recs[1].status, "ok");
  EXPECT_TRUE(std::isfinite(recs[1].profit));
  EXPECT_NE(sweep_csv(recs).find("nan,nan,error"), std::string::npos);
}

TEST(Sweep, SeedsFollowGridPosition) {
  const ReturnPanel data = demo_panel();
  SweepGrid grid;
  grid.model = ModelId::original;
  grid.base_seed = 100;
  grid.blocks.push_back({{2e-4, 1e-4}, {1e-4}});
  const auto recs = run_sweep(grid, data, oracle::demo_views(), quick_config(ModelId::original), 1e5, 1);
  // Sorted by omega1, so the second grid point comes first.
  EXPECT_EQ(recs[0].index, 1u);
  EXPECT_EQ(recs[0].seed, 100u ^ 1u);
  EXPECT_EQ(recs[1].seed, 100u);
}

TEST(Sweep, DistanceRowTrend) {
  // Mean distance over the omega = 1e-6 row is below the mean over the 1e-4 row.
  const ReturnPanel data = demo_panel();
  SweepGrid grid;
  grid.model = ModelId::iw_nonsquare;
  grid.blocks.push_back({{1e-6, 1e-4}, linspace(1e-6, 1e-4, 3)});
  const auto recs = run_sweep(grid, data, oracle::demo_views(), quick_config(ModelId::iw_nonsquare), 1e5, 1);
  double low = 0.0, high = 0.0;
  for (const auto& r : recs) {
    ASSERT_EQ(r.status, "ok") << r.message;
    (r.omega1 == 1e-6 ? low : high) += r.distance / 3.0;
  }
  EXPECT_LT(low, high);
}

TEST(Sweep, RequiresTwoViewsAndATestWindow) {
  ReturnPanel data = demo_panel();
  SweepGrid grid;
  grid.blocks.push_back({{1e-4}, {1e-4}});
  Matrix p(1, 4);
  p << 1, 0, 0, 0;
  const ViewSet one(p, Vector::Zero(1), Vector::Constant(1, 1e-4));
  EXPECT_THROW(run_sweep(grid, data, one, quick_config(ModelId::original), 1e5, 1), DimensionError);
  data.test = {data.test.begin, data.test.begin};
  EXPECT_THROW(run_sweep(grid, data, oracle::demo_views(), quick_config(ModelId::original), 1e5, 1),
               InsufficientDataError);
}

class DataAnchoring : public ::testing::TestWithParam<ModelId> {};

TEST_P(DataAnchoring, VagueViewsRecoverTheSampleMean) {
  // With omega = 1e3 every coordinate of mu_post sits within 3 posterior sd of rbar.
  const ModelInputs data = model_inputs(demo_panel());
  ModelConfig cfg = quick_config(GetParam());
  cfg.iterations = 5000;
  cfg.burn = 500;
  const FitResult fit = fit_model(data, oracle::demo_views(1e3, 1e3), cfg);
  const double gap = (fit.summary.mu_post - data.rbar()).cwiseAbs().maxCoeff();
  EXPECT_LT(gap, 3.0 * fit.summary.posterior_sd.maxCoeff());
}

INSTANTIATE_TEST_SUITE_P(BayesianModels, DataAnchoring,
                         ::testing::Values(ModelId::iw_augmented, ModelId::iw_nonsquare, ModelId::log_sigma),
                         [](const auto& info) { return std::string(model_name(info.param)); });

}  // namespace
}  // namespace blbayes
