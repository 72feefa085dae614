#pragma once

#include <vector>

#include "blbayes/linalg.hpp"

namespace blbayes {

struct BacktestResult {
  double profit = 0.0;
  std::vector<double> daily_curve;  ///< cumulative profit at each day's close
};

/// Buy-and-hold of fixed dollar positions capital * w_i over the test rows:
/// profit = sum_i capital w_i (prod_t (1 + r_ti) - 1). No rebalancing, costs
/// or margin; negative weights are shorts.
BacktestResult backtest_profit(const Vector& weights, const Matrix& test_returns, double capital);

/// ||P mu - q||_2.
double view_distance(const Matrix& P, const Vector& mu, const Vector& q);

}  // namespace blbayes
