#include "blbayes/backtest.hpp"

#include <cmath>

#include <fmt/format.h>

#include "blbayes/errors.hpp"

namespace blbayes {

BacktestResult backtest_profit(const Vector& weights, const Matrix& test_returns, double capital) {
  if (test_returns.rows() == 0) throw InsufficientDataError("test window is empty");
  if (weights.size() != test_returns.cols()) {
    throw DimensionError(
        fmt::format("{} weights for {} assets in the test window", weights.size(), test_returns.cols()));
  }
  if (!std::isfinite(capital)) throw ParameterError("capital must be finite");
  if (!weights.allFinite()) throw ParameterError("weights must be finite");

  const Vector positions = capital * weights;
  Vector growth = Vector::Ones(weights.size());
  BacktestResult out;
  out.daily_curve.reserve(static_cast<std::size_t>(test_returns.rows()));
  for (Index t = 0; t < test_returns.rows(); ++t) {
    growth.array() *= 1.0 + test_returns.row(t).transpose().array();
    out.daily_curve.push_back(positions.dot(growth - Vector::Ones(growth.size())));
  }
  out.profit = out.daily_curve.back();
  return out;
}

double view_distance(const Matrix& P, const Vector& mu, const Vector& q) {
  if (P.cols() != mu.size() || P.rows() != q.size()) {
    throw DimensionError(fmt::format("P is {}x{}, mu has {} and q {} entries", P.rows(), P.cols(), mu.size(), q.size()));
  }
  return (P * mu - q).norm();
}

}  // namespace blbayes
