#pragma once

// Exhaustive (omega1, omega2) sweeps over a two-view model, run on a worker
// pool. Output is independent of worker count and scheduling.

#include <cstdint>
#include <string>
#include <vector>

#include "blbayes/data.hpp"
#include "blbayes/engine.hpp"
#include "blbayes/views.hpp"

namespace blbayes {

/// Cartesian block omega1_values x omega2_values.
struct GridBlock {
  std::vector<double> omega1_values;
  std::vector<double> omega2_values;
};

/// n equally spaced values from lo to hi inclusive (n >= 2), or {lo} for n == 1.
std::vector<double> linspace(double lo, double hi, int n);

struct SweepGrid {
  std::vector<GridBlock> blocks;  ///< points are enumerated block by block, omega1-major
  ModelId model = ModelId::iw_nonsquare;
  std::uint64_t base_seed = 1;

  /// Throws ParameterError when empty or when any omega is not positive.
  void validate() const;
  std::vector<std::pair<double, double>> points() const;
};

struct SweepRecord {
  std::size_t index = 0;  ///< position in SweepGrid::points()
  double omega1 = 0.0;
  double omega2 = 0.0;
  double distance = 0.0;
  double profit = 0.0;
  std::string status = "ok";  ///< "ok" or "error"
  std::string message;
  double acceptance_rate = 1.0;
  double min_n_eff = 0.0;
  std::uint64_t seed = 0;
};

/// One fit per grid point with seed = base_seed XOR index and Omega =
/// diag(omega1, omega2). Failures are caught and recorded in the row. Records
/// come back sorted by (omega1, omega2, index).
std::vector<SweepRecord> run_sweep(const SweepGrid& grid, const ReturnPanel& data, const ViewSet& views,
                                   const ModelConfig& cfg, double capital, unsigned workers);

/// omega1,omega2,distance,profit,status,acceptance_rate,seed
std::string sweep_csv(const std::vector<SweepRecord>& records);

}  // namespace blbayes
