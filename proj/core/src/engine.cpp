#include "blbayes/engine.hpp"

#include <cmath>

#include <fmt/format.h>

#include "blbayes/backtest.hpp"
#include "blbayes/errors.hpp"
#include "blbayes/inverse_wishart.hpp"
#include "blbayes/log_sigma.hpp"
#include "blbayes/original_bl.hpp"

namespace blbayes {

ModelId parse_model_id(std::string_view name) {
  if (name == "original") return ModelId::original;
  if (name == "iw_augmented") return ModelId::iw_augmented;
  if (name == "iw_nonsquare") return ModelId::iw_nonsquare;
  if (name == "log_sigma" || name == "logsigma") return ModelId::log_sigma;
  throw ConfigError(fmt::format(
      "unknown model '{}' (expected original, iw_augmented, iw_nonsquare or log_sigma)", name));
}

std::string_view model_name(ModelId id) {
  switch (id) {
    case ModelId::original: return "original";
    case ModelId::iw_augmented: return "iw_augmented";
    case ModelId::iw_nonsquare: return "iw_nonsquare";
    case ModelId::log_sigma: return "log_sigma";
  }
  return "unknown";
}

namespace {

PosteriorSummary fit_original(const ModelInputs& data, const ViewSet& views, const ModelConfig& cfg) {
  const Index n = data.n();
  EquilibriumInputs inp{cfg.lambda, cfg.w_eq.value_or(Vector::Constant(n, 1.0 / static_cast<double>(n))),
                        data.sigma_hist(), cfg.tau};
  const Vector pi = equilibrium_returns(inp);
  const BlPosterior post = bl_posterior(pi, cfg.tau, inp.Sigma, views);
  PosteriorSummary s;
  s.model = "original";
  s.mu_post = post.mu_bar;
  s.Sigma_post = post.Sigma_bar.matrix();
  s.posterior_sd = post.M_inv.matrix().diagonal().cwiseSqrt();
  s.n_eff = Vector::Constant(n, std::numeric_limits<double>::infinity());
  s.mc_se = Vector::Zero(n);
  s.stationarity.z = Vector::Zero(n);
  return s;
}

}  // namespace

FitResult fit_model(const ModelInputs& data, const ViewSet& views, const ModelConfig& cfg, const TraceSink& trace) {
  if (!(cfg.lambda > 0.0)) throw ParameterError(fmt::format("lambda must be > 0, got {}", cfg.lambda));
  FitResult out;
  switch (cfg.model) {
    case ModelId::original:
      out.summary = fit_original(data, views, cfg);
      break;
    case ModelId::iw_augmented:
    case ModelId::iw_nonsquare: {
      IwConfig iw;
      iw.nu = cfg.nu;
      iw.Sigma0 = cfg.Sigma0;
      iw.iterations = cfg.iterations;
      iw.burn = cfg.burn;
      iw.seed = cfg.seed;
      iw.omega_floor = cfg.omega_floor;
      out.summary = cfg.model == ModelId::iw_augmented ? gibbs_augmented(data, views, iw, trace)
                                                       : gibbs_nonsquare(data, views, iw, trace);
      break;
    }
    case ModelId::log_sigma: {
      LogSigmaConfig ls;
      ls.iterations = cfg.iterations;
      ls.burn = cfg.burn;
      ls.seed = cfg.seed;
      ls.omega_floor = cfg.omega_floor;
      out.summary = gibbs_log_sigma(data, views, ls, trace);
      break;
    }
  }
  SpdMatrix sigma_post(SymmetricMatrix(out.summary.Sigma_post));
  out.weights = capm_weights(out.summary.mu_post, sigma_post, cfg.lambda);
  out.distance = view_distance(views.P(), out.summary.mu_post, views.q());
  const Matrix& tr = out.summary.mu_trace;
  if (tr.rows() > 1) {
    Vector d(tr.rows());
    for (Index t = 0; t < tr.rows(); ++t) d(t) = (views.P() * tr.row(t).transpose() - views.q()).norm();
    out.distance_sd = std::sqrt((d.array() - d.mean()).square().sum() / static_cast<double>(d.size() - 1));
  }
  return out;
}

}  // namespace blbayes
