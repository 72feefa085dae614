#pragma once

// Price ingestion, simple returns and the historical / current / test split.

#include <chrono>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "blbayes/linalg.hpp"

namespace blbayes {

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD; throws FormatError otherwise.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Closing prices on a complete date grid.
struct PricePanel {
  std::vector<std::string> tickers;
  std::vector<Date> dates;  ///< strictly increasing
  Matrix prices;            ///< dates x tickers, all > 0

  /// Throws FormatError if any invariant is broken.
  void validate() const;
};

/// Reads `date,T1,...,Tn` CSV. Rows may arrive in any order; the result is
/// sorted by date. Duplicate dates, blank or non-positive cells and ragged
/// rows are rejected with the offending row/column in the message.
PricePanel ingest_prices(std::istream& in);

/// {"tickers": [...], "dates": [...], "rows": [[...], ...]}
std::string price_panel_to_json(const PricePanel& panel);
PricePanel price_panel_from_json(std::string_view text);

/// Loads a panel from CSV, or from the JSON cache format when the path ends in
/// ".json".
PricePanel load_price_panel(const std::string& path);

/// Half-open row range [begin, end).
struct RowRange {
  Index begin = 0;
  Index end = 0;
  Index size() const noexcept { return end - begin; }
};

struct ReturnPanel {
  std::vector<std::string> tickers;
  std::vector<Date> dates;  ///< date of the closing price that ends each return
  Matrix returns;           ///< rows are days
  RowRange historical;
  RowRange current;
  RowRange test;

  Index n() const noexcept { return returns.cols(); }
  Matrix rows(RowRange r) const { return returns.middleRows(r.begin, r.size()); }
};

/// Simple returns r_t = p_{t+1} / p_t - 1. The current window holds the last m
/// returns dated strictly before `test_start`, historical everything earlier,
/// test everything on or after it. Needs at least m + 2 prices before
/// `test_start`.
ReturnPanel compute_returns(const PricePanel& panel, Index m, Date test_start);

/// Everything a sampler needs from a ReturnPanel.
struct ModelInputs {
  Matrix current;                     ///< m x n
  Matrix historical;                  ///< rows before the current window
  std::vector<Vector> monthly_means;  ///< empty when historical has < m rows

  Index m() const noexcept { return current.rows(); }
  Index n() const noexcept { return current.cols(); }
  Vector rbar() const { return current.colwise().mean().transpose(); }
  /// Unbiased sample covariance of the historical rows.
  SpdMatrix sigma_hist() const;
};

ModelInputs model_inputs(const ReturnPanel& panel);

/// Means of consecutive m-row blocks, counted backward from the last row;
/// leftover rows at the start are dropped. Oldest block first.
std::vector<Vector> monthly_means(const Matrix& historical, Index m);

}  // namespace blbayes
