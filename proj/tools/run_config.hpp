#pragma once

// Run-config schema (version "1"). Every field is checked here, before any
// data is loaded or any chain is started.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "blbayes/data.hpp"
#include "blbayes/engine.hpp"
#include "blbayes/views.hpp"

namespace blbayes::cli {

struct RunConfig {
  std::filesystem::path data_path;    ///< resolved against the config's directory
  std::vector<std::string> tickers;   ///< empty: every column of the data file
  Index m = 21;
  Date test_start;
  ModelConfig model;
  Matrix P;
  Vector q;
  Vector omega;
  double capital = 100000.0;

  ViewSet views() const { return ViewSet(P, q, omega); }
};

/// Throws ConfigError with a JSON path ("$.views.q[1]: ...") on any problem.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Loads the price file, restricts it to the configured tickers and splits
/// the windows.
ReturnPanel load_returns(const RunConfig& cfg);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace blbayes::cli
