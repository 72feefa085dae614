// blbayes: ingest prices, fit a model, sweep view confidences, backtest weights.
//
// Exit codes: 0 success, 2 invalid input or config, 3 numerical failure.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "blbayes/backtest.hpp"
#include "blbayes/errors.hpp"
#include "blbayes/json_writer.hpp"
#include "blbayes/sweep.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace blbayes;
using namespace blbayes::cli;

namespace {

void emit(const std::string& out_path, const std::string& bytes) {
  if (out_path.empty() || out_path == "-") {
    std::fwrite(bytes.data(), 1, bytes.size(), stdout);
  } else {
    write_file(out_path, bytes);
  }
}

std::string fit_json(const RunConfig& cfg, const ReturnPanel& data, const FitResult& fit) {
  const PosteriorSummary& s = fit.summary;
  JsonWriter w;
  w.begin_object();
  w.key("model").value(s.model);
  w.key("tickers").begin_array();
  for (const auto& t : data.tickers) w.value(t);
  w.end_array();
  w.key("mu_post").value(s.mu_post);
  w.key("Sigma_post").value(s.Sigma_post);
  w.key("weights").value(fit.weights);
  w.key("distance").value(fit.distance);
  w.key("diagnostics").begin_object();
  w.key("iterations").value(static_cast<std::int64_t>(s.iterations));
  w.key("burn").value(static_cast<std::int64_t>(s.burn));
  w.key("seed").value(static_cast<std::int64_t>(s.seed));
  w.key("acceptance_rate").value(s.acceptance_rate);
  w.key("burn_acceptance_rate").value(s.burn_acceptance_rate);
  w.key("posterior_sd").value(s.posterior_sd);
  w.key("n_eff").value(s.n_eff);
  w.key("mc_se").value(s.mc_se);
  w.key("split_half_z").value(s.stationarity.z);
  w.key("split_half_pass").value(s.stationarity.pass);
  w.key("distance_sd").value(fit.distance_sd);
  w.key("scale_floor_hits").value(static_cast<std::int64_t>(s.scale_floor_hits));
  w.key("omega_repair_shift").value(s.omega_repair_shift);
  w.end_object();
  if (data.test.size() > 0) {
    const BacktestResult bt = backtest_profit(fit.weights, data.rows(data.test), cfg.capital);
    w.key("backtest").begin_object();
    w.key("capital").value(cfg.capital);
    w.key("profit").value(bt.profit);
    w.key("daily_curve").begin_array();
    for (double v : bt.daily_curve) w.value(v);
    w.end_array();
    w.end_object();
  }
  w.end_object();
  return w.str();
}

int cmd_ingest(const std::string& prices, const std::string& out) {
  const PricePanel panel = load_price_panel(prices);
  emit(out, price_panel_to_json(panel));
  return 0;
}

int cmd_run(const std::string& config, const std::string& model, const std::string& trace_path,
            const std::string& out) {
  RunConfig cfg = load_run_config(config);
  if (!model.empty()) {
    // Re-validate as if the override had been written in the file.
    nlohmann::json doc = nlohmann::json::parse(read_file(config));
    doc["model"] = model;
    cfg = parse_run_config(doc.dump(), fs::path(config).parent_path());
  }
  const ReturnPanel data = load_returns(cfg);
  const ModelInputs inputs = model_inputs(data);

  std::string trace_csv;
  TraceSink sink;
  if (!trace_path.empty()) {
    trace_csv = "iteration";
    for (const auto& t : data.tickers) trace_csv += ",mu_" + t;
    trace_csv += ",log_det_sigma";
    if (cfg.model.model == ModelId::log_sigma) trace_csv += ",accepted";
    trace_csv += '\n';
    sink = [&trace_csv](long it, const Vector& mu, double log_det, int accepted) {
      trace_csv += std::to_string(it);
      for (Index i = 0; i < mu.size(); ++i) trace_csv += "," + format_double(mu(i));
      trace_csv += "," + format_double(log_det);
      if (accepted >= 0) trace_csv += "," + std::to_string(accepted);
      trace_csv += '\n';
    };
  }
  const FitResult fit = fit_model(inputs, cfg.views(), cfg.model, sink);
  if (!trace_path.empty()) write_file(trace_path, trace_csv);
  emit(out, fit_json(cfg, data, fit));
  return 0;
}

SweepGrid parse_grid(const std::string& path, ModelId fallback) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("grid $: invalid JSON: {}", e.what()));
  }
  auto fail = [](const std::string& where, const std::string& msg) {
    throw ConfigError(fmt::format("grid {}: {}", where, msg));
  };
  if (!doc.is_object()) fail("$", "expected an object");
  auto values = [&](const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(fmt::format("{}[{}]", where, i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  };
  SweepGrid grid;
  grid.model = fallback;
  for (const auto& [key, v] : doc.items()) {
    if (key == "model") {
      if (!v.is_string()) fail("$.model", "expected a string");
      try {
        grid.model = parse_model_id(v.get<std::string>());
      } catch (const ConfigError& e) {
        fail("$.model", e.what());
      }
    } else if (key == "base_seed") {
      if (!v.is_number_unsigned()) fail("$.base_seed", "expected a non-negative integer");
      grid.base_seed = v.get<std::uint64_t>();
    } else if (key != "omega1" && key != "omega2" && key != "ranges") {
      fail("$." + key, "unknown field");
    }
  }
  if (doc.contains("omega1") || doc.contains("omega2")) {
    if (!doc.contains("omega1") || !doc.contains("omega2")) fail("$", "omega1 and omega2 must be given together");
    grid.blocks.push_back({values(doc["omega1"], "$.omega1"), values(doc["omega2"], "$.omega2")});
  }
  if (doc.contains("ranges")) {
    const json& ranges = doc["ranges"];
    if (!ranges.is_array()) fail("$.ranges", "expected an array");
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      const std::string where = fmt::format("$.ranges[{}]", i);
      const json& r = ranges[i];
      if (!r.is_object() || !r.contains("omega1") || !r.contains("omega2") || !r.contains("points")) {
        fail(where, "expected {\"omega1\": [lo, hi], \"omega2\": [lo, hi], \"points\": n}");
      }
      const auto o1 = values(r["omega1"], where + ".omega1");
      const auto o2 = values(r["omega2"], where + ".omega2");
      if (o1.size() != 2 || o2.size() != 2) fail(where, "range bounds must be [lo, hi]");
      if (!r["points"].is_number_integer()) fail(where + ".points", "expected an integer");
      const int pts = r["points"].get<int>();
      if (pts < 1) fail(where + ".points", "must be >= 1");
      grid.blocks.push_back({linspace(o1[0], o1[1], pts), linspace(o2[0], o2[1], pts)});
    }
  }
  try {
    grid.validate();
  } catch (const InputError& e) {
    fail("$", e.what());
  }
  return grid;
}

int cmd_sweep(const std::string& config, const std::string& grid_path, unsigned workers, const std::string& out) {
  const RunConfig cfg = load_run_config(config);
  const SweepGrid grid = parse_grid(grid_path, cfg.model.model);
  if (cfg.P.rows() != 2) throw ConfigError("$.views.P: a sweep needs exactly 2 views");
  const ReturnPanel data = load_returns(cfg);
  const auto records = run_sweep(grid, data, cfg.views(), cfg.model, cfg.capital, workers);
  emit(out, sweep_csv(records));
  return 0;
}

Vector read_weights(const std::string& path, Index n) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("weights $: invalid JSON: {}", e.what()));
  }
  const nlohmann::json* w = &doc;
  if (doc.is_object()) {
    if (!doc.contains("weights")) throw ConfigError("weights $.weights: missing required field");
    w = &doc["weights"];
  }
  if (!w->is_array() || static_cast<Index>(w->size()) != n) {
    throw ConfigError(fmt::format("weights $.weights: expected an array of {} numbers", n));
  }
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    const auto& v = (*w)[static_cast<std::size_t>(i)];
    if (!v.is_number()) throw ConfigError(fmt::format("weights $.weights[{}]: expected a number", i));
    out(i) = v.get<double>();
  }
  return out;
}

int cmd_backtest(const std::string& config, const std::string& weights_path, const std::string& out) {
  const RunConfig cfg = load_run_config(config);
  const ReturnPanel data = load_returns(cfg);
  const Vector w = read_weights(weights_path, data.n());
  const BacktestResult bt = backtest_profit(w, data.rows(data.test), cfg.capital);
  JsonWriter jw;
  jw.begin_object();
  jw.key("capital").value(cfg.capital);
  jw.key("weights").value(w);
  jw.key("profit").value(bt.profit);
  jw.key("dates").begin_array();
  for (Index t = data.test.begin; t < data.test.end; ++t) jw.value(format_date(data.dates[static_cast<std::size_t>(t)]));
  jw.end_array();
  jw.key("daily_curve").begin_array();
  for (double v : bt.daily_curve) jw.value(v);
  jw.end_array();
  jw.end_object();
  emit(out, jw.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("blbayes"));
  spdlog::set_pattern("%^[%l]%$ %v");
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Bayesian Black-Litterman engine"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log informational messages to stderr");

  std::string prices, config, out, trace, grid, weights, model;
  unsigned workers = 1;

  auto* ingest = app.add_subcommand("ingest", "Validate a price CSV and write the JSON panel");
  ingest->add_option("--prices", prices, "Price CSV (date,T1,...,Tn)")->required();
  ingest->add_option("--out", out, "Output JSON (default stdout)");

  auto* run = app.add_subcommand("run", "Fit one model and write its posterior summary");
  run->add_option("--config", config, "Run config JSON")->required();
  run->add_option("--trace", trace, "Write the chain trace CSV here");
  run->add_option("--model", model, "Override the config's model");
  run->add_option("--out", out, "Output JSON (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "Fit a model over an (omega1, omega2) grid");
  sweep->add_option("--config", config, "Run config JSON")->required();
  sweep->add_option("--grid", grid, "Grid JSON")->required();
  sweep->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  sweep->add_option("--out", out, "Output CSV (default stdout)");

  auto* backtest = app.add_subcommand("backtest", "Profit of fixed weights over the test window");
  backtest->add_option("--config", config, "Run config JSON")->required();
  backtest->add_option("--weights", weights, "JSON with a \"weights\" array (a run output works)")->required();
  backtest->add_option("--out", out, "Output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  try {
    if (*ingest) return cmd_ingest(prices, out);
    if (*run) return cmd_run(config, model, trace, out);
    if (*sweep) return cmd_sweep(config, grid, workers, out);
    if (*backtest) return cmd_backtest(config, weights, out);
  } catch (const InputError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const ComputeError& e) {
    fmt::print(stderr, "numerical error: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "runtime error: {}\n", e.what());
    return 3;
  }
  return 0;
}
