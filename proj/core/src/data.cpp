#include "blbayes/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "blbayes/errors.hpp"
#include "blbayes/json_writer.hpp"

namespace blbayes {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_int(std::string_view s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Date parse_date(std::string_view text) {
  const auto bad = [&] { return FormatError(fmt::format("invalid ISO date '{}'", text)); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  int y = 0;
  int mo = 0;
  int d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d)) {
    throw bad();
  }
  const Date date{std::chrono::year(y), std::chrono::month(static_cast<unsigned>(mo)),
                  std::chrono::day(static_cast<unsigned>(d))};
  if (!date.ok()) throw bad();
  return date;
}

std::string format_date(Date d) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                     static_cast<unsigned>(d.day()));
}

void PricePanel::validate() const {
  if (tickers.empty()) throw FormatError("price panel has no tickers");
  if (prices.rows() != static_cast<Index>(dates.size()) || prices.cols() != static_cast<Index>(tickers.size())) {
    throw FormatError(fmt::format("price matrix is {}x{} but panel has {} dates and {} tickers", prices.rows(),
                                  prices.cols(), dates.size(), tickers.size()));
  }
  for (std::size_t t = 1; t < dates.size(); ++t) {
    if (!(dates[t - 1] < dates[t])) {
      throw FormatError(fmt::format("dates not strictly increasing at {}", format_date(dates[t])));
    }
  }
  for (Index t = 0; t < prices.rows(); ++t) {
    for (Index j = 0; j < prices.cols(); ++j) {
      if (!(prices(t, j) > 0.0) || !std::isfinite(prices(t, j))) {
        throw FormatError(fmt::format("price on {} for {} must be finite and > 0, got {}",
                                      format_date(dates[static_cast<std::size_t>(t)]),
                                      tickers[static_cast<std::size_t>(j)], prices(t, j)));
      }
    }
  }
}

PricePanel ingest_prices(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("price CSV is empty");
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "date") {
    throw FormatError("price CSV header must be 'date,<T1>,...,<Tn>'");
  }
  PricePanel panel;
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j].empty()) throw FormatError(fmt::format("header column {} has an empty ticker", j + 1));
    panel.tickers.emplace_back(header[j]);
  }
  const std::size_t n = panel.tickers.size();

  std::vector<std::pair<Date, std::vector<double>>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != n + 1) {
      throw FormatError(fmt::format("row {}: expected {} cells, found {}", line_no, n + 1, cells.size()));
    }
    Date date;
    try {
      date = parse_date(cells[0]);
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("row {}, column date: {}", line_no, e.what()));
    }
    std::vector<double> values(n);
    for (std::size_t j = 0; j < n; ++j) {
      const std::string_view cell = cells[j + 1];
      const std::string& col = panel.tickers[j];
      if (cell.empty()) throw FormatError(fmt::format("row {}, column {}: blank price", line_no, col));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw FormatError(fmt::format("row {}, column {}: '{}' is not a number", line_no, col, cell));
      }
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw FormatError(fmt::format("row {}, column {}: price {} must be > 0", line_no, col, v));
      }
      values[j] = v;
    }
    rows.emplace_back(date, std::move(values));
  }

  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t t = 1; t < rows.size(); ++t) {
    if (rows[t].first == rows[t - 1].first) {
      throw FormatError(fmt::format("duplicate date {}", format_date(rows[t].first)));
    }
  }
  panel.prices.resize(static_cast<Index>(rows.size()), static_cast<Index>(n));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    panel.dates.push_back(rows[t].first);
    for (std::size_t j = 0; j < n; ++j) panel.prices(static_cast<Index>(t), static_cast<Index>(j)) = rows[t].second[j];
  }
  return panel;
}

std::string price_panel_to_json(const PricePanel& panel) {
  JsonWriter w;
  w.begin_object();
  w.key("tickers").begin_array();
  for (const auto& t : panel.tickers) w.value(t);
  w.end_array();
  w.key("dates").begin_array();
  for (const auto& d : panel.dates) w.value(format_date(d));
  w.end_array();
  w.key("rows").value(panel.prices);
  w.end_object();
  return w.str();
}

PricePanel price_panel_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("price JSON: {}", e.what()));
  }
  PricePanel panel;
  try {
    panel.tickers = doc.at("tickers").get<std::vector<std::string>>();
    for (const auto& d : doc.at("dates")) panel.dates.push_back(parse_date(d.get<std::string>()));
    const auto& rows = doc.at("rows");
    panel.prices.resize(static_cast<Index>(rows.size()), static_cast<Index>(panel.tickers.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].size() != panel.tickers.size()) {
        throw FormatError(fmt::format("price JSON row {} has {} values, expected {}", t, rows[t].size(),
                                      panel.tickers.size()));
      }
      for (std::size_t j = 0; j < panel.tickers.size(); ++j) {
        panel.prices(static_cast<Index>(t), static_cast<Index>(j)) = rows[t][j].get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(fmt::format("price JSON: {}", e.what()));
  }
  panel.validate();
  return panel;
}

PricePanel load_price_panel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(fmt::format("cannot open price file '{}'", path));
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    std::stringstream buf;
    buf << in.rdbuf();
    return price_panel_from_json(buf.str());
  }
  PricePanel panel = ingest_prices(in);
  panel.validate();
  return panel;
}

ReturnPanel compute_returns(const PricePanel& panel, Index m, Date test_start) {
  if (m < 1) throw ParameterError(fmt::format("window length m must be >= 1, got {}", m));
  const auto first_test =
      std::lower_bound(panel.dates.begin(), panel.dates.end(), test_start) - panel.dates.begin();
  if (first_test < m + 2) {
    throw InsufficientDataError(fmt::format("need at least m + 2 = {} prices before {}, found {}", m + 2,
                                            format_date(test_start), first_test));
  }
  const Index rows = panel.prices.rows() - 1;
  ReturnPanel out;
  out.tickers = panel.tickers;
  out.returns = (panel.prices.bottomRows(rows).array() / panel.prices.topRows(rows).array() - 1.0).matrix();
  out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
  // Return t is dated at price t + 1, so returns before test_start are 0..first_test-2.
  const Index pre_test = static_cast<Index>(first_test) - 1;
  out.historical = {0, pre_test - m};
  out.current = {pre_test - m, pre_test};
  out.test = {pre_test, rows};
  return out;
}

std::vector<Vector> monthly_means(const Matrix& historical, Index m) {
  if (m < 1) throw ParameterError(fmt::format("block length m must be >= 1, got {}", m));
  if (historical.rows() < m) {
    throw InsufficientDataError(
        fmt::format("historical window has {} rows, fewer than one block of {}", historical.rows(), m));
  }
  const Index blocks = historical.rows() / m;
  const Index skip = historical.rows() - blocks * m;
  std::vector<Vector> means;
  means.reserve(static_cast<std::size_t>(blocks));
  for (Index b = 0; b < blocks; ++b) {
    means.emplace_back(historical.middleRows(skip + b * m, m).colwise().mean().transpose());
  }
  return means;
}

SpdMatrix ModelInputs::sigma_hist() const {
  if (historical.rows() < 2) {
    throw InsufficientDataError(
        fmt::format("historical window has {} rows; at least 2 are needed for a covariance", historical.rows()));
  }
  try {
    return SpdMatrix(sample_covariance(historical));
  } catch (const NotPositiveDefiniteError& e) {
    throw InsufficientDataError(fmt::format("historical covariance ({} rows, {} assets) is singular: {}",
                                            historical.rows(), historical.cols(), e.what()));
  }
}

ModelInputs model_inputs(const ReturnPanel& panel) {
  ModelInputs in;
  in.current = panel.rows(panel.current);
  in.historical = panel.rows(panel.historical);
  if (in.historical.rows() >= in.current.rows()) in.monthly_means = monthly_means(in.historical, in.current.rows());
  return in;
}

}  // namespace blbayes
