#include "blbayes/inverse_wishart.hpp"

#include <cmath>

#include <Eigen/LU>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "blbayes/errors.hpp"

namespace blbayes {

namespace {

SpdMatrix conditional_precision(const SpdMatrix& sigma, const ViewPrecision& vp, Index m, Vector* rhs,
                                const Vector& rbar) {
  const Matrix sigma_inv = sigma.inverse();
  const Matrix prec = static_cast<double>(m) * sigma_inv + vp.PtOinvP;
  *rhs = static_cast<double>(m) * (sigma_inv * rbar) + vp.PtOinvq;
  try {
    return SpdMatrix(SymmetricMatrix(0.5 * (prec + prec.transpose())));
  } catch (const NotPositiveDefiniteError& e) {
    throw NumericalError(std::string("mu-conditional precision is singular: ") + e.what());
  }
}

struct ChainSetup {
  std::string model;
  Matrix returns;  // m x n, in the space the chain runs in
  ViewPrecision vp;
  double nu;
  SpdMatrix sigma0;
  SpdMatrix sigma_init;
  std::optional<SpdMatrix> fixed_sigma;
  Matrix back;  // maps chain-space mu to asset space (identity for non-square)
};

PosteriorSummary run_chain(const ChainSetup& s, const IwConfig& cfg, const TraceSink& trace) {
  const Index m = s.returns.rows();
  const Index n = s.returns.cols();
  const Vector rbar = s.returns.colwise().mean().transpose();
  RngStream rng(cfg.seed, 0);
  ChainRecorder recorder(n, cfg.iterations, cfg.burn);

  Vector mu = rbar;
  SpdMatrix sigma = s.fixed_sigma ? *s.fixed_sigma : s.sigma_init;
  const Matrix back_t = s.back.transpose();
  for (long t = 0; t < cfg.iterations; ++t) {
    try {
      if (!s.fixed_sigma) {
        const IwParams post = sigma_conditional(scatter_about(s.returns, mu), s.nu, s.sigma0, m);
        sigma = sample_inverse_wishart(post.dof, post.scale, rng);
      }
      mu = sample_mu_conditional(rbar, sigma, s.vp, m, rng);
    } catch (const NotPositiveDefiniteError& e) {
      throw ChainError(std::string("covariance draw lost positive definiteness: ") + e.what(), t);
    } catch (const NumericalError& e) {
      throw ChainError(e.what(), t);
    }
    if (!mu.allFinite() || !sigma.matrix().allFinite()) throw ChainError("non-finite draw", t);

    const Vector mu_asset = s.back * mu;
    const Matrix sigma_asset = s.back * sigma.matrix() * back_t;
    recorder.record(t, mu_asset, sigma_asset, -1);
    if (trace) {
      const double log_det = sigma.log_det() + 2.0 * std::log(std::abs(s.back.determinant()));
      trace(t, mu_asset, log_det, -1);
    }
  }
  return recorder.finish(s.model, cfg.seed);
}

double resolve_nu(const IwConfig& cfg, Index n) {
  const double nu = cfg.nu.value_or(static_cast<double>(n) + 2.0);
  if (!(nu > static_cast<double>(n) - 1.0)) {
    throw DegreesOfFreedomError(fmt::format("nu = {} must exceed n - 1 = {}", nu, n - 1));
  }
  return nu;
}

SpdMatrix resolve_sigma0(const IwConfig& cfg, double nu, const SpdMatrix& sigma_hist) {
  if (cfg.Sigma0) {
    if (cfg.Sigma0->dim() != sigma_hist.dim()) throw DimensionError("Sigma0 does not match the number of assets");
    return *cfg.Sigma0;
  }
  const double scale = nu - static_cast<double>(sigma_hist.dim()) - 1.0;
  if (!(scale > 0.0)) {
    throw HyperparamError(fmt::format("default Sigma0 = (nu - n - 1) * Sigma_hist needs nu > n + 1, got nu = {}", nu));
  }
  return SpdMatrix(SymmetricMatrix(scale * sigma_hist.matrix()));
}

void check_common(const ModelInputs& data, const ViewSet& views, const IwConfig& cfg) {
  check_chain_lengths(cfg.iterations, cfg.burn);
  if (data.m() < 1) throw InsufficientDataError("current window is empty");
  if (views.n() != data.n()) {
    throw DimensionError(fmt::format("views cover {} assets but the data has {}", views.n(), data.n()));
  }
  if (cfg.fixed_sigma && cfg.fixed_sigma->dim() != data.n()) {
    throw DimensionError("fixed Sigma does not match the number of assets");
  }
}

SpdMatrix congruence(const Matrix& a, const SpdMatrix& s) {
  return SpdMatrix(SymmetricMatrix(a * s.matrix() * a.transpose()));
}

}  // namespace

void check_omega_floor(const Vector& omega, double default_floor, const std::optional<double>& override_floor) {
  double floor = default_floor;
  if (override_floor) {
    if (*override_floor < default_floor) {
      spdlog::warn("omega floor lowered from {:.3g} to {:.3g}", default_floor, *override_floor);
    }
    floor = std::max(*override_floor, kOmegaHardFloor);
  }
  for (Index i = 0; i < omega.size(); ++i) {
    if (omega(i) < kOmegaHardFloor) {
      throw ParameterError(fmt::format("omega[{}] = {:.3g} is below the hard floor {:.0e}", i, omega(i), kOmegaHardFloor));
    }
    if (omega(i) < floor) {
      throw ParameterError(
          fmt::format("omega[{}] = {:.3g} is below this model's floor {:.3g} (set omega_floor to override)", i,
                      omega(i), floor));
    }
  }
}

ViewPrecision ViewPrecision::from_views(const ViewSet& views) {
  const Matrix pt_oinv = views.P().transpose() * views.omega().cwiseInverse().asDiagonal();
  return {pt_oinv * views.P(), pt_oinv * views.q()};
}

ViewPrecision ViewPrecision::from_dense(const Matrix& p_eff, const Vector& q_eff, const SpdMatrix& omega_eff) {
  if (p_eff.rows() != omega_eff.dim() || q_eff.size() != omega_eff.dim()) {
    throw DimensionError("P_eff, q_eff and Omega_eff disagree in size");
  }
  const Matrix oinv_p = omega_eff.solve(p_eff);
  Matrix ptop = p_eff.transpose() * oinv_p;
  ptop = 0.5 * (ptop + ptop.transpose().eval());
  return {ptop, oinv_p.transpose() * q_eff};
}

ViewPrecision ViewPrecision::vague(Index n) { return {Matrix::Zero(n, n), Vector::Zero(n)}; }

GaussianConditional mu_conditional(const Vector& rbar, const SpdMatrix& Sigma, const ViewPrecision& vp, Index m) {
  const Index n = Sigma.dim();
  if (rbar.size() != n || vp.PtOinvP.rows() != n || vp.PtOinvq.size() != n) {
    throw DimensionError("mu-conditional inputs disagree in size");
  }
  if (m < 1) throw ParameterError("m must be >= 1");
  Vector rhs;
  const SpdMatrix prec = conditional_precision(Sigma, vp, m, &rhs, rbar);
  Vector mean = prec.solve(rhs);
  SpdMatrix cov(SymmetricMatrix(prec.inverse()));
  return {std::move(mean), std::move(cov)};
}

Vector sample_mu_conditional(const Vector& rbar, const SpdMatrix& Sigma, const ViewPrecision& vp, Index m,
                             RngStream& rng) {
  Vector rhs;
  const SpdMatrix prec = conditional_precision(Sigma, vp, m, &rhs, rbar);
  return sample_mvn_precision(prec.solve(rhs), prec, rng);
}

IwParams sigma_conditional(const SymmetricMatrix& residual_scatter, double nu, const SpdMatrix& Sigma0, Index m) {
  if (residual_scatter.dim() != Sigma0.dim()) throw DimensionError("scatter and Sigma0 disagree in size");
  return {nu + static_cast<double>(m), SpdMatrix(SymmetricMatrix(Sigma0.matrix() + residual_scatter.matrix()))};
}

PosteriorSummary gibbs_augmented(const ModelInputs& data, const ViewSet& views, const IwConfig& cfg,
                                 const TraceSink& trace) {
  check_common(data, views, cfg);
  if (!cfg.vague_views) check_omega_floor(views.omega(), kOmegaFloorAugmented, cfg.omega_floor);
  const Index n = data.n();
  const double nu = resolve_nu(cfg, n);
  const SpdMatrix sigma_hist = data.sigma_hist();
  const SpdMatrix sigma0 = resolve_sigma0(cfg, nu, sigma_hist);

  const Augmentation aug = augment_to_invertible(views.P());
  const Matrix& ps = aug.P_star;
  const Eigen::PartialPivLU<Matrix> lu(ps);
  const Matrix ps_inv = lu.inverse();

  ChainSetup s{"iw_augmented",
               data.current * ps.transpose(),
               ViewPrecision::vague(n),
               nu,
               congruence(ps, sigma0),
               congruence(ps, sigma_hist),
               std::nullopt,
               ps_inv};
  double shift = 0.0;
  if (!cfg.vague_views) {
    const TransformedHyperparams hp = build_transformed_hyperparams(aug, views.q(), views.omega(), data.monthly_means);
    s.vp = ViewPrecision::from_dense(Matrix::Identity(n, n), hp.q_star, hp.Omega_star);
    shift = hp.repair_shift;
  }
  if (cfg.fixed_sigma) s.fixed_sigma = congruence(ps, *cfg.fixed_sigma);
  PosteriorSummary out = run_chain(s, cfg, trace);
  out.omega_repair_shift = shift;
  return out;
}

PosteriorSummary gibbs_nonsquare(const ModelInputs& data, const ViewSet& views, const IwConfig& cfg,
                                 const TraceSink& trace) {
  check_common(data, views, cfg);
  if (!cfg.vague_views) check_omega_floor(views.omega(), kOmegaFloorNonsquare, cfg.omega_floor);
  const Index n = data.n();
  const double nu = resolve_nu(cfg, n);
  const SpdMatrix sigma_hist = data.sigma_hist();
  ChainSetup s{"iw_nonsquare",
               data.current,
               cfg.vague_views ? ViewPrecision::vague(n) : ViewPrecision::from_views(views),
               nu,
               resolve_sigma0(cfg, nu, sigma_hist),
               sigma_hist,
               cfg.fixed_sigma,
               Matrix::Identity(n, n)};
  return run_chain(s, cfg, trace);
}

}  // namespace blbayes
