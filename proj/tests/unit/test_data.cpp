#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "blbayes/data.hpp"
#include "blbayes/errors.hpp"
#include "oracles.hpp"

namespace blbayes {
namespace {

using namespace std::chrono;

std::string error_of(const std::string& csv) {
  std::istringstream in(csv);
  try {
    ingest_prices(in);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TEST(Dates, ParseAndFormat) {
  EXPECT_EQ(parse_date("2018-01-02"), year_month_day{year{2018} / January / 2});
  EXPECT_EQ(format_date(year_month_day{year{2017} / December / 29}), "2017-12-29");
  EXPECT_THROW(parse_date("2018-02-30"), FormatError);
  EXPECT_THROW(parse_date("2018/01/02"), FormatError);
  EXPECT_THROW(parse_date("18-01-02"), FormatError);
}

TEST(Ingest, SortsRowsByDate) {
  std::istringstream in("date,A,B\n2020-01-03,2,4\n2020-01-01,1,2\n2020-01-02,1.5,3\n");
  const PricePanel p = ingest_prices(in);
  ASSERT_EQ(p.dates.size(), 3u);
  EXPECT_EQ(format_date(p.dates.front()), "2020-01-01");
  EXPECT_EQ(p.prices(2, 1), 4.0);
  EXPECT_EQ(p.tickers, (std::vector<std::string>{"A", "B"}));
}

TEST(Ingest, RejectsMalformedInput) {
  EXPECT_NE(error_of("date,A\n2020-01-01,1\n2020-01-01,2\n").find("duplicate date 2020-01-01"), std::string::npos);
  EXPECT_NE(error_of("date,A,B\n2020-01-01,1\n").find("row 2"), std::string::npos);
  EXPECT_NE(error_of("date,A,B\n2020-01-01,1,\n").find("blank price"), std::string::npos);
  EXPECT_NE(error_of("date,A\n2020-01-01,abc\n").find("is not a number"), std::string::npos);
  EXPECT_NE(error_of("date,A\n2020-01-01,0\n").find("must be > 0"), std::string::npos);
  EXPECT_NE(error_of("date,A\n2020-01-01,-3\n").find("column A"), std::string::npos);
  EXPECT_NE(error_of("day,A\n2020-01-01,1\n").find("header"), std::string::npos);
  EXPECT_NE(error_of("").find("empty"), std::string::npos);
}

TEST(Ingest, JsonCacheRoundTrip) {
  std::istringstream in("date,A,B\n2020-01-01,1.25,2\n2020-01-02,1.0000000000000002,3\n");
  const PricePanel p = ingest_prices(in);
  const PricePanel q = price_panel_from_json(price_panel_to_json(p));
  EXPECT_EQ(q.tickers, p.tickers);
  EXPECT_EQ(q.dates, p.dates);
  EXPECT_EQ(q.prices, p.prices);
  EXPECT_THROW(price_panel_from_json("{\"tickers\": [\"A\"]}"), FormatError);
}

PricePanel synthetic_panel(int count) {
  PricePanel p;
  p.tickers = {"X", "Y"};
  p.prices.resize(count, 2);
  sys_days d{year{2020} / January / 1};
  double x = 100.0;
  double y = 99.98;
  for (int t = 0; t < count; ++t) {
    p.dates.emplace_back(d + days{t});
    p.prices(t, 0) = x;
    p.prices(t, 1) = y;
    x *= 1.0 + 0.01 * std::sin(t);
    y *= 1.0 - 0.007 * std::cos(0.5 * t);
  }
  return p;
}

TEST(Returns, ReproducePriceRatios) {
  const PricePanel p = synthetic_panel(60);
  const ReturnPanel r = compute_returns(p, 10, p.dates[40]);
  ASSERT_EQ(r.returns.rows(), 59);
  for (Index t = 0; t < r.returns.rows(); ++t) {
    for (Index i = 0; i < 2; ++i) EXPECT_NEAR(r.returns(t, i), p.prices(t + 1, i) / p.prices(t, i) - 1.0, 1e-12);
  }
  // Chaining the returns from the first price recovers every later price.
  for (Index i = 0; i < 2; ++i) {
    double price = p.prices(0, i);
    for (Index t = 0; t < r.returns.rows(); ++t) {
      price *= 1.0 + r.returns(t, i);
      EXPECT_NEAR(price / p.prices(t + 1, i), 1.0, 1e-12);
    }
  }
}

TEST(Returns, WindowsPartitionTheRows) {
  const PricePanel p = synthetic_panel(60);
  const ReturnPanel r = compute_returns(p, 10, p.dates[40]);
  EXPECT_EQ(r.current.size(), 10);
  EXPECT_EQ(r.historical.begin, 0);
  EXPECT_EQ(r.historical.end, r.current.begin);
  EXPECT_EQ(r.current.end, r.test.begin);
  EXPECT_EQ(r.test.end, r.returns.rows());
  EXPECT_EQ(r.historical.size() + r.current.size() + r.test.size(), r.returns.rows());
  // Every current-window return ends strictly before the test start; the
  // first test return ends on it.
  EXPECT_LT(r.dates[r.current.end - 1], p.dates[40]);
  EXPECT_EQ(r.dates[r.test.begin], p.dates[40]);
}

TEST(Returns, TooFewRowsBeforeTestStart) {
  const PricePanel p = synthetic_panel(30);
  EXPECT_THROW(compute_returns(p, 10, p.dates[11]), InsufficientDataError);
  EXPECT_NO_THROW(compute_returns(p, 10, p.dates[12]));
}

TEST(Returns, BundledDemoWindows) {
  const PricePanel p = load_price_panel(oracle::data_path("demo_prices.csv"));
  const ReturnPanel r = compute_returns(p, 21, parse_date("2018-01-02"));
  EXPECT_EQ(r.tickers.size(), 4u);
  EXPECT_EQ(r.current.size(), 21);
  // Weekdays 2018-01-02 .. 2018-01-30.
  EXPECT_EQ(r.test.size(), 21);
  EXPECT_EQ(format_date(r.dates[r.test.begin]), "2018-01-02");
  EXPECT_EQ(format_date(r.dates.back()), "2018-01-30");
  EXPECT_EQ(format_date(r.dates[r.current.end - 1]), "2018-01-01");
}

TEST(MonthlyMeans, DropsLeadingRemainder) {
  Matrix h(50, 1);
  for (Index t = 0; t < 50; ++t) h(t, 0) = static_cast<double>(t);
  const std::vector<Vector> means = monthly_means(h, 21);
  ASSERT_EQ(means.size(), 2u);
  // Rows 8..28 then 29..49.
  EXPECT_DOUBLE_EQ(means[0](0), 18.0);
  EXPECT_DOUBLE_EQ(means[1](0), 39.0);
  EXPECT_THROW(monthly_means(h.topRows(20), 21), InsufficientDataError);
}

TEST(ModelInputs, SplitsAndSummarises) {
  const PricePanel p = synthetic_panel(80);
  const ModelInputs in = model_inputs(compute_returns(p, 10, p.dates[70]));
  EXPECT_EQ(in.m(), 10);
  EXPECT_EQ(in.n(), 2);
  EXPECT_EQ(in.historical.rows(), 59);
  EXPECT_EQ(in.monthly_means.size(), 5u);
  EXPECT_LT((in.rbar() - in.current.colwise().mean().transpose()).norm(), 1e-15);
  EXPECT_GT(in.sigma_hist().eigenvalues()(0), 0.0);

  ModelInputs tiny = in;
  tiny.historical = in.historical.topRows(1);
  EXPECT_THROW(tiny.sigma_hist(), InsufficientDataError);
}

}  // namespace
}  // namespace blbayes
