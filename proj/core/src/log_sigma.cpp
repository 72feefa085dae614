#include "blbayes/log_sigma.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "blbayes/errors.hpp"
#include "blbayes/inverse_wishart.hpp"

namespace blbayes {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

SpdMatrix scaled_scatter(const Matrix& r, const Vector& mu) {
  return SpdMatrix(SymmetricMatrix(scatter_about(r, mu).matrix() / static_cast<double>(r.rows())));
}

double sum_sq_dev(const Eigen::Ref<const Vector>& v) {
  return (v.array() - v.mean()).square().sum();
}

}  // namespace

double xi_coefficient(double d_i, double d_j) {
  const double h = std::log(d_i) - std::log(d_j);
  // xi = g(h)^2 with g(h) = 2 sinh(h/2) / h.
  double g;
  if (std::abs(h) < 1e-8) {
    const double h2 = h * h;
    g = 1.0 + h2 / 24.0 + h2 * h2 / 1920.0;
  } else {
    g = 2.0 * std::sinh(0.5 * h) / h;
  }
  return g * g;
}

Matrix build_f_vectors(const Matrix& eigvecs) {
  const Index n = eigvecs.rows();
  if (eigvecs.cols() != n) throw DimensionError("eigenvector matrix must be square");
  const double dev = (eigvecs.transpose() * eigvecs - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-8)) throw BasisError(fmt::format("eigenvectors are not orthonormal (Gram deviation {:.3g})", dev));

  const Index d = vec_star_dim(n);
  Matrix f(d, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const auto ei = eigvecs.col(i);
      const auto ej = eigvecs.col(j);
      auto col = f.col(vec_star_index(n, i, j));
      for (Index k = 0; k < n; ++k) {
        col(vec_star_index(n, k, k)) = ei(k) * ej(k);
        for (Index l = k + 1; l < n; ++l) col(vec_star_index(n, k, l)) = ei(k) * ej(l) + ei(l) * ej(k);
      }
    }
  }
  return f;
}

VolterraQuadratic build_Q(const SpdMatrix& S, Index m) {
  if (m < 1) throw ParameterError(fmt::format("m must be >= 1, got {}", m));
  const Index n = S.dim();
  const Vector& ev = S.eigenvalues();
  const Matrix& evec = S.eigenvectors();
  const Matrix f = build_f_vectors(evec);

  // Q = F diag(w) F^T; one fixed summation order whatever the build.
  Vector w(f.cols());
  const double md = static_cast<double>(m);
  for (Index i = 0; i < n; ++i) {
    w(vec_star_index(n, i, i)) = 0.5 * md;
    for (Index j = i + 1; j < n; ++j) w(vec_star_index(n, i, j)) = md * xi_coefficient(ev(i), ev(j));
  }
  Matrix q = f * w.asDiagonal() * f.transpose();
  q = 0.5 * (q + q.transpose().eval());
  return {vec_star(matrix_log_spd(S)), std::move(q), ev, evec, S.log_det(), m};
}

double volterra_log_density(const Vector& alpha, const VolterraQuadratic& vq) {
  const Vector diff = alpha - vq.lambda_vec.values();
  if (diff.size() != vq.Q.rows()) throw DimensionError("alpha does not match Q");
  const double md = static_cast<double>(vq.m);
  const double n = static_cast<double>(vq.eigvals.size());
  return -0.5 * md * n * (kLog2Pi + 1.0) - 0.5 * md * vq.log_det_S - 0.5 * diff.dot(vq.Q * diff);
}

double volterra_log_density(const Vector& alpha, const SpdMatrix& S, Index m) {
  return volterra_log_density(alpha, build_Q(S, m));
}

double exact_log_target(const Vector& alpha, const SpdMatrix& S, Index m, const Matrix& G) {
  const Index n = S.dim();
  if (alpha.size() != vec_star_dim(n) || G.rows() != alpha.size() || G.cols() != alpha.size()) {
    throw DimensionError("exact_log_target: alpha, S and G disagree in size");
  }
  const Matrix a = vec_star_inverse(VecStarVector(alpha)).matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Vector& av = eig.eigenvalues();
  const Matrix& v = eig.eigenvectors();
  // Tr(S e^-A) = sum_k e^{-a_k} (V^T S V)_kk
  const Vector proj = (v.transpose() * S.matrix() * v).diagonal();
  const double tr = av.sum() + (proj.array() * (-av.array()).exp()).sum();
  const double md = static_cast<double>(m);
  return -0.5 * md * static_cast<double>(n) * kLog2Pi - 0.5 * md * tr - 0.5 * alpha.dot(G * alpha);
}

StructuralDesign::StructuralDesign(Index n_, double s1, double s2) : n(n_), sigma1_sq(s1), sigma2_sq(s2) {
  if (n < 2) throw ModelSizeError(fmt::format("the structural design needs n >= 2, got {}", n));
  if (!(s1 > 0.0) || !(s2 > 0.0) || !std::isfinite(s1) || !std::isfinite(s2)) {
    throw ParameterError(fmt::format("sigma1^2 and sigma2^2 must be finite and > 0, got {} and {}", s1, s2));
  }
}

Matrix StructuralDesign::J() const {
  Matrix j = Matrix::Zero(d(), 2);
  j.col(0).head(n).setOnes();
  j.col(1).tail(d() - n).setOnes();
  return j;
}

Vector StructuralDesign::delta_diagonal() const {
  Vector v(d());
  v.head(n).setConstant(sigma1_sq);
  v.tail(d() - n).setConstant(sigma2_sq);
  return v;
}

Matrix build_G(const StructuralDesign& design) {
  const Matrix j = design.J();
  const Vector dinv = design.delta_diagonal().cwiseInverse();
  const Matrix dinv_j = dinv.asDiagonal() * j;
  const Matrix jt_dinv_j = j.transpose() * dinv_j;
  Matrix g = Matrix(dinv.asDiagonal()) - dinv_j * jt_dinv_j.inverse() * dinv_j.transpose();
  return 0.5 * (g + g.transpose());
}

double integrated_alpha_log_density(const Vector& alpha, const StructuralDesign& design) {
  if (alpha.size() != design.d()) throw DimensionError("alpha does not match the design");
  const Vector delta = design.delta_diagonal();
  const Matrix j = design.J();
  const Matrix jt_dinv_j = j.transpose() * delta.cwiseInverse().asDiagonal() * j;
  const Matrix g = build_G(design);
  return std::log(2.0 * std::numbers::pi) - 0.5 * delta.array().log().sum() -
         0.5 * std::log(jt_dinv_j.determinant()) - 0.5 * alpha.dot(g * alpha);
}

SigmaSqConditionals sigma_sq_conditionals(const Vector& alpha, Index n) {
  if (n < 4) {
    throw ModelSizeError(fmt::format(
        "the log-Sigma model needs n >= 4 assets so that the Inverse-Gamma shapes (n-3)/2 and (d-n-3)/2 are "
        "positive; got n = {}",
        n));
  }
  const Index d = vec_star_dim(n);
  if (alpha.size() != d) throw DimensionError(fmt::format("alpha has {} entries, expected {}", alpha.size(), d));
  SigmaSqConditionals out{{0.5 * static_cast<double>(n - 3), 0.5 * sum_sq_dev(alpha.head(n))},
                          {0.5 * static_cast<double>(d - n - 3), 0.5 * sum_sq_dev(alpha.tail(d - n))},
                          0};
  for (InverseGammaParams* p : {&out.first, &out.second}) {
    if (!(p->scale >= kScaleFloor)) {
      p->scale = kScaleFloor;
      ++out.floor_hits;
    }
  }
  return out;
}

double mh_log_ratio(const Vector& candidate, const Vector& current, const SpdMatrix& S, const Matrix& G,
                    const VolterraQuadratic& vq) {
  const auto approx = [&](const Vector& a) { return volterra_log_density(a, vq) - 0.5 * a.dot(G * a); };
  const Index m = vq.m;
  return (exact_log_target(candidate, S, m, G) - exact_log_target(current, S, m, G)) +
         (approx(current) - approx(candidate));
}

PosteriorSummary gibbs_log_sigma(const ModelInputs& data, const ViewSet& views, const LogSigmaConfig& cfg,
                                 const TraceSink& trace) {
  const Index n = data.n();
  const Index m = data.m();
  if (n < 4) {
    throw ModelSizeError(fmt::format(
        "the log-Sigma model needs n >= 4 assets (Inverse-Gamma shapes (n-3)/2 must be positive); got n = {}", n));
  }
  if (m <= n) {
    throw InsufficientDataError(
        fmt::format("the log-Sigma model needs m > n so that S is positive definite; got m = {}, n = {}", m, n));
  }
  if (views.n() != n) throw DimensionError(fmt::format("views cover {} assets but the data has {}", views.n(), n));
  check_chain_lengths(cfg.iterations, cfg.burn);
  if (!cfg.vague_views) check_omega_floor(views.omega(), kOmegaFloorLogSigma, cfg.omega_floor);

  const Matrix& r = data.current;
  const Vector rbar = data.rbar();
  const ViewPrecision vp = cfg.vague_views ? ViewPrecision::vague(n) : ViewPrecision::from_views(views);
  RngStream rng(cfg.seed, 0);
  ChainRecorder recorder(n, cfg.iterations, cfg.burn);
  Vector mu = rbar;
  SpdMatrix s = scaled_scatter(r, mu);
  VolterraQuadratic vq = build_Q(s, m);
  Vector alpha = data.historical.rows() > n ? vec_star(matrix_log_spd(data.sigma_hist())).values()
                                            : vq.lambda_vec.values();
  SpdMatrix sigma = matrix_exp_sym(vec_star_inverse(VecStarVector(alpha)));
  long floor_hits = 0;
  auto draw_design = [&]() {
    const SigmaSqConditionals c = sigma_sq_conditionals(alpha, n);
    floor_hits += c.floor_hits;
    return StructuralDesign(n, sample_inverse_gamma(c.first.shape, c.first.scale, rng),
                            sample_inverse_gamma(c.second.shape, c.second.scale, rng));
  };
  Matrix g = build_G(draw_design());

  for (long t = 0; t < cfg.iterations; ++t) {
    int accepted = 0;
    try {
      // alpha: independence proposal from the Volterra approximation, then MH.
      const SpdMatrix prec(SymmetricMatrix(vq.Q + g));
      const Vector centre = prec.solve(Vector(vq.Q * vq.lambda_vec.values()));
      const Vector cand = sample_mvn_precision(centre, prec, rng);
      const double log_rho = mh_log_ratio(cand, alpha, s, g, vq);
      if (std::isnan(log_rho)) throw ChainError("Metropolis-Hastings ratio is NaN", t);
      if (std::log(rng.uniform()) < log_rho) {
        alpha = cand;
        sigma = matrix_exp_sym(vec_star_inverse(VecStarVector(alpha)));
        accepted = 1;
      }

      g = build_G(draw_design());
      mu = sample_mu_conditional(rbar, sigma, vp, m, rng);

      s = scaled_scatter(r, mu);
      vq = build_Q(s, m);
    } catch (const ChainError&) {
      throw;
    } catch (const InputError&) {
      throw;
    } catch (const ComputeError& e) {
      throw ChainError(e.what(), t);
    }
    if (!mu.allFinite() || !alpha.allFinite()) throw ChainError("non-finite state", t);

    recorder.record(t, mu, sigma.matrix(), accepted);
    if (trace) trace(t, mu, alpha.head(n).sum(), accepted);
  }
  PosteriorSummary out = recorder.finish("log_sigma", cfg.seed);
  out.scale_floor_hits = floor_hits;
  if (floor_hits > 0) spdlog::warn("Inverse-Gamma scale floor applied {} times", floor_hits);
  return out;
}

}  // namespace blbayes
