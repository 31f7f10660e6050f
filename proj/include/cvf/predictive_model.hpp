#pragma once

// Predictive regression with a persistent AR(1) regressor:
//
//   y_t = deterministic_t + beta * x_{t-1} + e^y_t
//   x_t = gamma * x_{t-1} + e^x_t,          x_0 = 0,
//
// with (e^y_t, e^x_t) i.i.d. bivariate normal. Everything downstream consumes
// the invariance-reduced data (y projected off the deterministic columns, x),
// so the functions here work on demeaned sums rather than an explicit
// orthonormal rotation.
//
// The statistics are templated on the scalar type. Residuals x_t - g x_{t-1}
// are formed with a fused multiply-add so that explosive paths (|x| ~ 1e8 at
// T = 100, gamma = 1.2) keep full relative precision in the likelihood ratio.

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

#include "cvf/errors.hpp"
#include "cvf/random.hpp"

namespace cvf {

enum class Deterministic { Intercept, Trend };

constexpr int deterministic_dim(Deterministic kind) {
  return kind == Deterministic::Intercept ? 1 : 2;
}

/// 2x2 innovation covariance [[syy, sxy], [sxy, sxx]].
struct Cov2 {
  double syy = 1.0;
  double sxy = 0.0;
  double sxx = 1.0;

  static Cov2 from_rho(double rho, double syy = 1.0, double sxx = 1.0) {
    return {syy, rho * std::sqrt(syy * sxx), sxx};
  }

  double rho() const { return sxy / std::sqrt(sxx * syy); }
  /// Variance of e^y not explained by e^x.
  double syy_x() const { return syy - sxy * sxy / sxx; }
  /// rho / sqrt(1 - rho^2), the coupling between the beta and gamma scores.
  double rho_ratio() const {
    const double r = rho();
    return r / std::sqrt(1.0 - r * r);
  }

  bool valid() const {
    return std::isfinite(syy) && std::isfinite(sxy) && std::isfinite(sxx) &&
           syy > 0.0 && sxx > 0.0 && std::abs(rho()) < 1.0;
  }
};

/// Variance in the t-statistic's standard error. Syy is the default; SyyX
/// uses the variance of e^y not explained by e^x.
enum class TVariance { Syy, SyyX };

inline double t_variance(const Cov2& cov, TVariance v) {
  return v == TVariance::Syy ? cov.syy : cov.syy_x();
}

struct ModelParams {
  double beta = 0.0;
  double gamma = 1.0;
  Deterministic kind = Deterministic::Intercept;
  double mu = 0.0;     ///< intercept of the y equation
  double trend = 0.0;  ///< slope on t (Trend only)
  Cov2 cov{};
};

template <typename Scalar = double>
struct Sample {
  Eigen::VectorX<Scalar> y;
  Eigen::VectorX<Scalar> x;

  Eigen::Index size() const { return y.size(); }

  /// (x_0, x_1, ..., x_{T-1}) with x_0 = 0.
  Eigen::VectorX<Scalar> lagged_x() const {
    Eigen::VectorX<Scalar> lag(x.size());
    if (x.size() == 0) return lag;
    lag(0) = Scalar(0);
    lag.tail(x.size() - 1) = x.head(x.size() - 1);
    return lag;
  }

  template <typename Other>
  Sample<Other> cast() const {
    return {y.template cast<Other>(), x.template cast<Other>()};
  }
};

/// Jansson-Moreira sufficient statistics of the curved exponential family.
template <typename Scalar = double>
struct SuffStats {
  Scalar s_beta{};
  Scalar s_gamma{};
  Scalar s_betabeta{};
  Scalar s_gammagamma{};
};

/// Local score and information at a centering value gbar: the log-likelihood
/// ratio of (b, c) local alternatives is exactly [b c] R - 0.5 [b c] K [b c]'.
template <typename Scalar = double>
struct LocalStats {
  double center = 1.0;
  double g = 0.0;  ///< scaling_g(center, T)
  Scalar r_beta{};
  Scalar r_gamma{};
  Scalar k_betabeta{};
  Scalar k_betagamma{};
  Scalar k_gammagamma{};
};

// ---------------------------------------------------------------------------
// Simulation

/// Fills eps_y, eps_x with T i.i.d. draws from N(0, cov).
void draw_innovations(const Cov2& cov, Eigen::Index T, Rng& rng, Eigen::VectorXd& eps_y,
                      Eigen::VectorXd& eps_x);

/// Runs the recursions from x_0 = 0 on the given innovations.
Sample<double> build_sample(const ModelParams& params, const Eigen::VectorXd& eps_y,
                            const Eigen::VectorXd& eps_x);

Sample<double> simulate(const ModelParams& params, Eigen::Index T, Rng& rng);
Sample<double> simulate(const ModelParams& params, Eigen::Index T, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Projections

/// Residual of v from its regression on 1_T (Intercept) or on (1_T, t) (Trend).
template <typename Derived>
Eigen::VectorX<typename Derived::Scalar> demean(const Eigen::MatrixBase<Derived>& v,
                                                Deterministic kind) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index T = v.size();
  Eigen::VectorX<Scalar> out = v;
  // The second pass removes what rounding left behind in the first, so large
  // level or trend components cancel to working precision.
  for (int pass = 0; pass < 2; ++pass) {
    out.array() -= out.mean();
    if (kind == Deterministic::Trend) {
      const Scalar mid = Scalar(T + 1) / Scalar(2);
      Scalar num(0), den(0);
      for (Eigen::Index t = 0; t < T; ++t) {
        const Scalar tc = Scalar(t + 1) - mid;
        num += tc * out(t);
        den += tc * tc;
      }
      const Scalar slope = num / den;
      for (Eigen::Index t = 0; t < T; ++t) out(t) -= slope * (Scalar(t + 1) - mid);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

namespace detail {

template <typename Scalar>
Scalar fms(Scalar a, Scalar b, Scalar c) {
  // c - a * b with a single rounding
  using std::fma;
  return fma(-a, b, c);
}

inline void require_samples(Eigen::Index T, Deterministic kind) {
  if (T < deterministic_dim(kind) + 2)
    throw std::invalid_argument("sample too short for the deterministic terms");
}

}  // namespace detail

template <typename Scalar>
SuffStats<Scalar> suff_stats(const Sample<Scalar>& s, const Cov2& cov, double beta0,
                             Deterministic kind) {
  detail::require_samples(s.size(), kind);
  const Eigen::VectorX<Scalar> lag = s.lagged_x();
  const Eigen::VectorX<Scalar> lag_dm = demean(lag, kind);
  // lag_dm is orthogonal to the deterministic terms, so demeaning y as well
  // changes nothing exactly and keeps large levels out of the products.
  const Eigen::VectorX<Scalar> y_dm = demean(s.y, kind);
  const Scalar delta = Scalar(cov.sxy) / Scalar(cov.sxx);
  const Scalar syy_x = Scalar(cov.syy_x());

  Scalar num_beta(0), cross(0), q_dm(0), q_raw(0);
  for (Eigen::Index t = 0; t < s.size(); ++t) {
    const Scalar resid = y_dm(t) - Scalar(beta0) * lag(t) - delta * s.x(t);
    num_beta += lag_dm(t) * resid;
    cross += lag(t) * s.x(t);
    q_dm += lag_dm(t) * lag_dm(t);
    q_raw += lag(t) * lag(t);
  }
  SuffStats<Scalar> out;
  out.s_beta = num_beta / syy_x;
  out.s_gamma = cross / Scalar(cov.sxx) - delta * out.s_beta;
  out.s_betabeta = q_dm / syy_x;
  out.s_gammagamma = q_raw / Scalar(cov.sxx) + delta * delta * out.s_betabeta;
  return out;
}

/// Contiguity rate (sum_{t=1}^{T-1} sum_{l=0}^{t-1} gamma^{2l})^{-1/2}, with 0^0 = 1.
double scaling_g(double gamma, Eigen::Index T);

template <typename Scalar>
LocalStats<Scalar> local_stats(const Sample<Scalar>& s, const Cov2& cov, double center,
                               double beta0, Deterministic kind) {
  detail::require_samples(s.size(), kind);
  const Eigen::VectorX<Scalar> lag = s.lagged_x();
  const Eigen::VectorX<Scalar> lag_dm = demean(lag, kind);
  const Eigen::VectorX<Scalar> y_dm = demean(s.y, kind);
  const Scalar delta = Scalar(cov.sxy) / Scalar(cov.sxx);
  const Scalar gbar(center);

  Scalar score_beta(0), score_gamma(0), q_dm(0), q_raw(0);
  for (Eigen::Index t = 0; t < s.size(); ++t) {
    const Scalar ex = detail::fms(gbar, lag(t), s.x(t));
    score_beta += lag_dm(t) * (y_dm(t) - Scalar(beta0) * lag(t) - delta * ex);
    score_gamma += lag(t) * ex;
    q_dm += lag_dm(t) * lag_dm(t);
    q_raw += lag(t) * lag(t);
  }

  using std::sqrt;
  LocalStats<Scalar> out;
  out.center = center;
  out.g = scaling_g(center, s.size());
  const Scalar g(out.g);
  const Scalar sxx(cov.sxx);
  const Scalar kappa(cov.rho_ratio());
  out.r_beta = g * score_beta / (sqrt(Scalar(cov.syy_x())) * sqrt(sxx));
  out.r_gamma = g * score_gamma / sxx - kappa * out.r_beta;
  out.k_betabeta = g * g * q_dm / sxx;
  out.k_betagamma = -kappa * out.k_betabeta;
  out.k_gammagamma = g * g * (kappa * kappa * q_dm + q_raw) / sxx;
  return out;
}

/// Exact log-likelihood ratio of (b * sqrt(syy.x / sxx) * g, center + c * g)
/// against (0, center).
template <typename Scalar>
Scalar log_lr(const LocalStats<Scalar>& ls, Scalar b, Scalar c) {
  return b * ls.r_beta + c * ls.r_gamma -
         Scalar(0.5) * (b * b * ls.k_betabeta + Scalar(2) * b * c * ls.k_betagamma +
                        c * c * ls.k_gammagamma);
}

/// log f_{beta,gamma}(y^mu, x) of the maximal invariant, including constants.
template <typename Scalar>
Scalar log_density_invariant(const Sample<Scalar>& s, const Cov2& cov, double beta,
                             double gamma, Deterministic kind) {
  detail::require_samples(s.size(), kind);
  using std::log;
  const Eigen::Index T = s.size();
  const Eigen::VectorX<Scalar> lag = s.lagged_x();
  const Scalar delta = Scalar(cov.sxy) / Scalar(cov.sxx);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;

  Eigen::VectorX<Scalar> u(T);
  Scalar ssq_x(0);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Scalar ex = detail::fms(Scalar(gamma), lag(t), s.x(t));
    ssq_x += ex * ex;
    u(t) = s.y(t) - delta * ex - Scalar(beta) * lag(t);
  }
  const Scalar ssq_y = demean(u, kind).squaredNorm();
  const Scalar sxx(cov.sxx), syy_x(cov.syy_x());
  const Scalar n_y = Scalar(T - deterministic_dim(kind));
  return -Scalar(T) / Scalar(2) * log(two_pi * sxx) - ssq_x / (Scalar(2) * sxx) -
         n_y / Scalar(2) * log(two_pi * syy_x) - ssq_y / (Scalar(2) * syy_x);
}

/// One-sided t-statistic for beta with the known-variance standard error
/// sqrt(syy / sum (x^mu_{t-1})^2).
template <typename Scalar>
Scalar t_statistic(const Sample<Scalar>& s, double syy, double beta0, Deterministic kind) {
  detail::require_samples(s.size(), kind);
  const Eigen::VectorX<Scalar> lag_dm = demean(s.lagged_x(), kind);
  const Scalar q = lag_dm.squaredNorm();
  if (!(q > Scalar(0))) throw DegenerateSample("t_statistic: regressor has no variation");
  using std::sqrt;
  const Scalar beta_hat = lag_dm.dot(s.y) / q;
  return (beta_hat - Scalar(beta0)) * sqrt(q) / sqrt(Scalar(syy));
}

/// sum_t x^mu_{t-1} x_t. Together with SuffStats this determines the
/// t-statistic; the four sufficient statistics alone do not.
template <typename Scalar>
Scalar lag_cross_moment(const Sample<Scalar>& s, Deterministic kind) {
  return demean(s.lagged_x(), kind).dot(s.x);
}

template <typename Scalar>
Scalar t_statistic_from_moments(const SuffStats<Scalar>& ss, Scalar cross, const Cov2& cov,
                                double syy_for_se) {
  using std::sqrt;
  const Scalar syy_x(cov.syy_x());
  const Scalar q = syy_x * ss.s_betabeta;
  if (!(q > Scalar(0))) throw DegenerateSample("t_statistic: regressor has no variation");
  const Scalar num = syy_x * ss.s_beta + Scalar(cov.sxy) / Scalar(cov.sxx) * cross;
  return num / sqrt(q) / sqrt(Scalar(syy_for_se));
}

/// Residual covariance from OLS of y on (deterministic, x_{t-1}) and of x_t on
/// x_{t-1} without intercept; divisor T.
Cov2 estimate_cov(const Sample<double>& s, Deterministic kind);

}  // namespace cvf
