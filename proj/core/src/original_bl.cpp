#include "blbayes/original_bl.hpp"

#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "blbayes/errors.hpp"

namespace blbayes {

namespace {

// Factorises a system matrix, turning a rejection into a NumericalError that
// carries the condition number, and logging anything worse than kConditionWarn.
SpdMatrix factor_system(const Matrix& a, const char* what) {
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(sym.rows() - 1);
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (cond > kConditionWarn) spdlog::warn("{} is ill-conditioned (condition number {:.3g})", what, cond);
  try {
    return SpdMatrix(SymmetricMatrix(sym));
  } catch (const NotPositiveDefiniteError&) {
    throw NumericalError(fmt::format("{} is singular (eigenvalues in [{:.3g}, {:.3g}], condition number {:.3g})",
                                     what, lo, hi, cond));
  }
}

}  // namespace

void EquilibriumInputs::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError(fmt::format("lambda must be > 0, got {}", lambda));
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ParameterError(fmt::format("tau must be > 0, got {}", tau));
  if (w_eq.size() != Sigma.dim()) {
    throw DimensionError(fmt::format("w_eq has {} entries but Sigma is {}x{}", w_eq.size(), Sigma.dim(), Sigma.dim()));
  }
}

Vector equilibrium_returns(const EquilibriumInputs& inp) {
  inp.validate();
  return inp.lambda * (inp.Sigma.matrix() * inp.w_eq);
}

BlPosterior bl_posterior(const Vector& pi, double tau, const SpdMatrix& Sigma, const ViewSet& views) {
  const Index n = Sigma.dim();
  if (pi.size() != n || views.n() != n) {
    throw DimensionError(fmt::format("pi ({}), Sigma ({}) and P ({} columns) disagree", pi.size(), n, views.n()));
  }
  if (!(tau > 0.0)) throw ParameterError(fmt::format("tau must be > 0, got {}", tau));

  const Matrix prior_prec = Sigma.inverse() / tau;
  const Vector omega_inv = views.omega().cwiseInverse();
  const Matrix pt_oinv = views.P().transpose() * omega_inv.asDiagonal();
  const SpdMatrix m = factor_system(prior_prec + pt_oinv * views.P(), "posterior precision M");

  const Vector rhs = prior_prec * pi + pt_oinv * views.q();
  Vector mu_bar = m.solve(rhs);
  SpdMatrix m_inv(SymmetricMatrix(m.inverse()));
  SpdMatrix sigma_bar(SymmetricMatrix(m_inv.matrix() + Sigma.matrix()));
  return {std::move(mu_bar), std::move(m_inv), std::move(sigma_bar)};
}

BlPosterior bl_posterior(const Vector& pi, double tau, const SpdMatrix& Sigma) {
  if (pi.size() != Sigma.dim()) throw DimensionError("pi and Sigma disagree in size");
  if (!(tau > 0.0)) throw ParameterError(fmt::format("tau must be > 0, got {}", tau));
  SpdMatrix m_inv(SymmetricMatrix(tau * Sigma.matrix()));
  SpdMatrix sigma_bar(SymmetricMatrix(m_inv.matrix() + Sigma.matrix()));
  return {pi, std::move(m_inv), std::move(sigma_bar)};
}

Vector optimal_weights(const Vector& mu_bar, const SpdMatrix& Sigma_bar, double lambda) {
  if (mu_bar.size() != Sigma_bar.dim()) throw DimensionError("mu and Sigma disagree in size");
  if (!(lambda > 0.0)) throw ParameterError(fmt::format("lambda must be > 0, got {}", lambda));
  if (Sigma_bar.condition_number() > kConditionWarn) {
    spdlog::warn("weight system is ill-conditioned (condition number {:.3g})", Sigma_bar.condition_number());
  }
  Vector w = Sigma_bar.solve(mu_bar) / lambda;
  if (!w.allFinite()) {
    throw NumericalError(fmt::format("non-finite weights (condition number {:.3g})", Sigma_bar.condition_number()));
  }
  return w;
}

WeightDecomposition weight_decomposition(const EquilibriumInputs& inp, const ViewSet& views) {
  inp.validate();
  if (views.n() != inp.Sigma.dim()) throw DimensionError("views and Sigma disagree in size");
  const double tau = inp.tau;
  const double lam = inp.lambda;
  const Matrix& p = views.P();
  const Vector omega_inv_q = views.q().cwiseQuotient(views.omega());
  const Matrix p_sigma = p * inp.Sigma.matrix();

  const Matrix a = Matrix(views.omega().asDiagonal()) / tau + p_sigma * p.transpose() / (1.0 + tau);
  const SpdMatrix a_fac = factor_system(a, "view system A");

  const Vector view_term = tau * omega_inv_q / lam;
  Vector delta = view_term - a_fac.solve(Vector(p_sigma * inp.w_eq)) / (1.0 + tau) -
                 a_fac.solve(Vector(p_sigma * p.transpose() * view_term)) / (1.0 + tau);
  Vector w_star = (inp.w_eq + p.transpose() * delta) / (1.0 + tau);
  return {std::move(w_star), std::move(delta)};
}

}  // namespace blbayes
