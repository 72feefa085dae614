#include "blbayes/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "blbayes/backtest.hpp"
#include "blbayes/errors.hpp"

namespace blbayes {

namespace {

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

SweepRecord run_point(std::size_t index, double o1, double o2, const SweepGrid& grid, const ModelInputs& inputs,
                      const Matrix& test, const ViewSet& views, const ModelConfig& base, double capital) {
  SweepRecord rec;
  rec.index = index;
  rec.omega1 = o1;
  rec.omega2 = o2;
  rec.seed = grid.base_seed ^ static_cast<std::uint64_t>(index);
  try {
    ModelConfig cfg = base;
    cfg.model = grid.model;
    cfg.seed = rec.seed;
    Vector omega(2);
    omega << o1, o2;
    const FitResult fit = fit_model(inputs, views.with_omega(omega), cfg);
    rec.distance = fit.distance;
    rec.profit = backtest_profit(fit.weights, test, capital).profit;
    rec.acceptance_rate = fit.summary.acceptance_rate;
    rec.min_n_eff = fit.summary.n_eff.size() > 0 ? fit.summary.n_eff.minCoeff() : 0.0;
  } catch (const std::exception& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rec.distance = nan;
    rec.profit = nan;
    rec.acceptance_rate = nan;
    rec.min_n_eff = nan;
    rec.status = "error";
    rec.message = e.what();
    spdlog::warn("sweep point ({:.6g}, {:.6g}) failed: {}", o1, o2, e.what());
  }
  return rec;
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ParameterError(fmt::format("a range needs at least one point, got {}", n));
  if (n == 1) return {lo};
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

void SweepGrid::validate() const {
  bool any = false;
  for (const auto& b : blocks) {
    for (const auto* vals : {&b.omega1_values, &b.omega2_values}) {
      for (double w : *vals) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ParameterError(fmt::format("grid omega {} must be > 0", w));
      }
    }
    any = any || (!b.omega1_values.empty() && !b.omega2_values.empty());
  }
  if (!any) throw ParameterError("sweep grid is empty");
}

std::vector<std::pair<double, double>> SweepGrid::points() const {
  std::vector<std::pair<double, double>> pts;
  for (const auto& b : blocks) {
    for (double o1 : b.omega1_values) {
      for (double o2 : b.omega2_values) pts.emplace_back(o1, o2);
    }
  }
  return pts;
}

std::vector<SweepRecord> run_sweep(const SweepGrid& grid, const ReturnPanel& data, const ViewSet& views,
                                   const ModelConfig& cfg, double capital, unsigned workers) {
  grid.validate();
  if (views.k() != 2) throw DimensionError(fmt::format("a sweep needs exactly 2 views, got {}", views.k()));
  if (data.test.size() == 0) throw InsufficientDataError("sweep needs a non-empty test window for profits");
  const ModelInputs inputs = model_inputs(data);
  const Matrix test = data.rows(data.test);
  const auto pts = grid.points();

  std::vector<SweepRecord> records(pts.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < pts.size(); i = next.fetch_add(1)) {
      records[i] = run_point(i, pts[i].first, pts[i].second, grid, inputs, test, views, cfg, capital);
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(pts.size())));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return std::tie(a.omega1, a.omega2, a.index) < std::tie(b.omega1, b.omega2, b.index);
  });
  return records;
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out = "omega1,omega2,distance,profit,status,acceptance_rate,seed\n";
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{}\n", csv_number(r.omega1), csv_number(r.omega2), csv_number(r.distance),
                       csv_number(r.profit), r.status, csv_number(r.acceptance_rate), r.seed);
  }
  return out;
}

}  // namespace blbayes
