#include "run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "blbayes/errors.hpp"

namespace blbayes::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(fmt::format("{}: {}", path, msg));
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) fail(path + "." + key, "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required field");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

long integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long>();
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

Vector vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = number(v[i], fmt::format("{}[{}]", path, i));
  return out;
}

Matrix matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Matrix out(static_cast<Index>(v.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string row_path = fmt::format("{}[{}]", path, i);
    if (!v[i].is_array() || v[i].size() != cols || cols == 0) {
      fail(row_path, fmt::format("expected a row of {} numbers", cols));
    }
    out.row(static_cast<Index>(i)) = vector(v[i], row_path).transpose();
  }
  return out;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", path.string()));
  out << bytes;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("$: invalid JSON: {}", e.what()));
  }
  if (!doc.is_object()) fail("$", "expected an object");
  reject_unknown(doc, "$",
                 {"version", "data", "tickers", "m", "test_start", "model", "views", "lambda", "tau", "w_eq", "nu",
                  "sigma0", "chain", "omega_floor", "capital"});
  if (string(require(doc, "$", "version"), "$.version") != "1") fail("$.version", "only version \"1\" is supported");

  RunConfig cfg;
  cfg.data_path = base_dir / string(require(doc, "$", "data"), "$.data");
  if (doc.contains("tickers")) {
    const json& t = doc["tickers"];
    if (!t.is_array() || t.empty()) fail("$.tickers", "expected a non-empty array of strings");
    for (std::size_t i = 0; i < t.size(); ++i) cfg.tickers.push_back(string(t[i], fmt::format("$.tickers[{}]", i)));
  }
  cfg.m = integer(require(doc, "$", "m"), "$.m");
  if (cfg.m < 1) fail("$.m", "must be >= 1");
  try {
    cfg.test_start = parse_date(string(require(doc, "$", "test_start"), "$.test_start"));
  } catch (const FormatError& e) {
    fail("$.test_start", e.what());
  }
  try {
    cfg.model.model = parse_model_id(string(require(doc, "$", "model"), "$.model"));
  } catch (const ConfigError& e) {
    fail("$.model", e.what());
  }

  const json& views = require(doc, "$", "views");
  if (!views.is_object()) fail("$.views", "expected an object");
  reject_unknown(views, "$.views", {"P", "q", "omega"});
  cfg.P = matrix(require(views, "$.views", "P"), "$.views.P");
  cfg.q = vector(require(views, "$.views", "q"), "$.views.q");
  cfg.omega = vector(require(views, "$.views", "omega"), "$.views.omega");
  try {
    (void)cfg.views();
  } catch (const InputError& e) {
    fail("$.views", e.what());
  }
  const Index n = cfg.P.cols();
  if (!cfg.tickers.empty() && static_cast<Index>(cfg.tickers.size()) != n) {
    fail("$.tickers", fmt::format("{} tickers but P has {} columns", cfg.tickers.size(), n));
  }

  if (doc.contains("lambda")) cfg.model.lambda = number(doc["lambda"], "$.lambda");
  if (!(cfg.model.lambda > 0.0)) fail("$.lambda", "must be > 0");
  if (doc.contains("tau")) cfg.model.tau = number(doc["tau"], "$.tau");
  if (!(cfg.model.tau > 0.0)) fail("$.tau", "must be > 0");
  if (doc.contains("w_eq")) {
    cfg.model.w_eq = vector(doc["w_eq"], "$.w_eq");
    if (cfg.model.w_eq->size() != n) fail("$.w_eq", fmt::format("expected {} entries", n));
  }
  if (doc.contains("nu") && !(doc["nu"].is_string() && doc["nu"] == "n_plus_2")) {
    cfg.model.nu = number(doc["nu"], "$.nu");
    if (!(*cfg.model.nu > static_cast<double>(n) - 1.0)) fail("$.nu", fmt::format("must exceed n - 1 = {}", n - 1));
  }
  if (doc.contains("sigma0") && !(doc["sigma0"].is_string() && doc["sigma0"] == "scaled_historical")) {
    const Matrix s0 = matrix(doc["sigma0"], "$.sigma0");
    if (s0.rows() != n || s0.cols() != n) fail("$.sigma0", fmt::format("expected a {}x{} matrix", n, n));
    try {
      cfg.model.Sigma0 = SpdMatrix(s0);
    } catch (const Error& e) {
      fail("$.sigma0", e.what());
    }
  }
  if (doc.contains("chain")) {
    const json& chain = doc["chain"];
    if (!chain.is_object()) fail("$.chain", "expected an object");
    reject_unknown(chain, "$.chain", {"iterations", "burn", "seed"});
    if (chain.contains("iterations")) cfg.model.iterations = integer(chain["iterations"], "$.chain.iterations");
    if (chain.contains("burn")) cfg.model.burn = integer(chain["burn"], "$.chain.burn");
    if (chain.contains("seed")) {
      if (!chain["seed"].is_number_unsigned()) fail("$.chain.seed", "expected a non-negative integer");
      cfg.model.seed = chain["seed"].get<std::uint64_t>();
    }
    if (cfg.model.burn < 0 || cfg.model.iterations <= cfg.model.burn) {
      fail("$.chain", "need iterations > burn >= 0");
    }
  }
  if (doc.contains("omega_floor")) {
    cfg.model.omega_floor = number(doc["omega_floor"], "$.omega_floor");
    if (!(*cfg.model.omega_floor > 0.0)) fail("$.omega_floor", "must be > 0");
  }
  if (doc.contains("capital")) cfg.capital = number(doc["capital"], "$.capital");

  if (cfg.model.model == ModelId::log_sigma && n < 4) {
    fail("$.model", fmt::format("log_sigma needs n >= 4 assets so that the Inverse-Gamma shapes (n-3)/2 and "
                                "(d-n-3)/2 are positive; the views cover n = {}",
                                n));
  }
  if (cfg.model.model == ModelId::log_sigma && cfg.m <= n) {
    fail("$.m", fmt::format("log_sigma needs m > n (m = {}, n = {})", cfg.m, n));
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file(path), path.parent_path());
}

ReturnPanel load_returns(const RunConfig& cfg) {
  PricePanel panel = load_price_panel(cfg.data_path.string());
  if (!cfg.tickers.empty()) {
    PricePanel sub;
    sub.dates = panel.dates;
    sub.prices.resize(panel.prices.rows(), static_cast<Index>(cfg.tickers.size()));
    for (std::size_t j = 0; j < cfg.tickers.size(); ++j) {
      const auto it = std::find(panel.tickers.begin(), panel.tickers.end(), cfg.tickers[j]);
      if (it == panel.tickers.end()) {
        throw ConfigError(fmt::format("$.tickers[{}]: '{}' is not in {}", j, cfg.tickers[j], cfg.data_path.string()));
      }
      sub.prices.col(static_cast<Index>(j)) = panel.prices.col(it - panel.tickers.begin());
    }
    sub.tickers = cfg.tickers;
    panel = std::move(sub);
  }
  if (static_cast<Index>(panel.tickers.size()) != cfg.P.cols()) {
    throw ConfigError(fmt::format("$.views.P: {} columns but the data has {} tickers", cfg.P.cols(),
                                  panel.tickers.size()));
  }
  return compute_returns(panel, cfg.m, cfg.test_start);
}

}  // namespace blbayes::cli
