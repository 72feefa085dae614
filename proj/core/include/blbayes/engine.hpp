#pragma once

// One entry point for all four models: fit, derive weights, measure the
// distance to the views.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "blbayes/data.hpp"
#include "blbayes/diagnostics.hpp"
#include "blbayes/views.hpp"

namespace blbayes {

enum class ModelId { original, iw_augmented, iw_nonsquare, log_sigma };

/// Accepts the canonical names plus "logsigma".
ModelId parse_model_id(std::string_view name);
std::string_view model_name(ModelId id);

struct ModelConfig {
  ModelId model = ModelId::iw_nonsquare;
  double lambda = 2.5;
  double tau = 0.05;            ///< original model only
  std::optional<Vector> w_eq;   ///< original model only; default 1/n each
  std::optional<double> nu;     ///< Inverse-Wishart models
  std::optional<SpdMatrix> Sigma0;
  long iterations = 11000;
  long burn = 1000;
  std::uint64_t seed = 1;
  std::optional<double> omega_floor;
};

struct FitResult {
  PosteriorSummary summary;
  Vector weights;           ///< Sigma_post^-1 mu_post / lambda
  double distance = 0.0;    ///< ||P mu_post - q||
  double distance_sd = 0.0; ///< sd of ||P mu - q|| over the kept draws (0 for the closed form)
};

/// The original model uses the historical sample covariance as Sigma and
/// reports mu_bar, Sigma_bar as the posterior.
FitResult fit_model(const ModelInputs& data, const ViewSet& views, const ModelConfig& cfg,
                    const TraceSink& trace = {});

}  // namespace blbayes
