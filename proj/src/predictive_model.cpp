#include "cvf/predictive_model.hpp"

#include <cmath>
#include <limits>

namespace cvf {

void draw_innovations(const Cov2& cov, Eigen::Index T, Rng& rng, Eigen::VectorXd& eps_y,
                      Eigen::VectorXd& eps_x) {
  std::normal_distribution<double> normal;
  const double sd_x = std::sqrt(cov.sxx);
  const double load = cov.sxy / sd_x;
  const double sd_yx = std::sqrt(cov.syy_x());
  eps_y.resize(T);
  eps_x.resize(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const double z1 = normal(rng);
    const double z2 = normal(rng);
    eps_x(t) = sd_x * z1;
    eps_y(t) = load * z1 + sd_yx * z2;
  }
}

Sample<double> build_sample(const ModelParams& params, const Eigen::VectorXd& eps_y,
                            const Eigen::VectorXd& eps_x) {
  const Eigen::Index T = eps_x.size();
  Sample<double> s{Eigen::VectorXd(T), Eigen::VectorXd(T)};
  double prev = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    double det = params.mu;
    if (params.kind == Deterministic::Trend) det += params.trend * double(t + 1);
    s.y(t) = det + params.beta * prev + eps_y(t);
    s.x(t) = params.gamma * prev + eps_x(t);
    prev = s.x(t);
  }
  return s;
}

Sample<double> simulate(const ModelParams& params, Eigen::Index T, Rng& rng) {
  Eigen::VectorXd ey, ex;
  draw_innovations(params.cov, T, rng, ey, ex);
  return build_sample(params, ey, ex);
}

Sample<double> simulate(const ModelParams& params, Eigen::Index T, std::uint64_t seed) {
  Rng rng(seed);
  return simulate(params, T, rng);
}

double scaling_g(double gamma, Eigen::Index T) {
  if (T < 2) throw std::invalid_argument("scaling_g: T must be at least 2");
  const double q = gamma * gamma;
  const double n = double(T - 1);
  if (q == 0.0) return 1.0 / std::sqrt(n);

  const double L = std::log(q);
  if (std::abs(L) * double(T) < 1e-3) {
    // Geometric closed forms cancel near q = 1; sum directly.
    long double inner = 0.0L, total = 0.0L;
    for (Eigen::Index t = 1; t < T; ++t) {
      inner = 1.0L + static_cast<long double>(q) * inner;
      total += inner;
    }
    return static_cast<double>(1.0L / std::sqrt(total));
  }

  const double one_minus_q = -std::expm1(L);
  if (q < 1.0) {
    // sum_{t=1}^{n} (1 - q^t) / (1 - q)
    const double geo = q * (-std::expm1(n * L)) / one_minus_q;
    return 1.0 / std::sqrt((n - geo) / one_minus_q);
  }
  // q > 1: work in logs, q^T overflows quickly.
  const double x = n * L;
  const double log_expm1_x = x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
  const double log_qm1 = std::log(std::expm1(L));
  const double log_a = L + log_expm1_x - log_qm1;  // log[q (q^n - 1) / (q - 1)]
  const double log_s = log_a + std::log1p(-n * std::exp(-log_a)) - log_qm1;
  return std::exp(-0.5 * log_s);
}

Cov2 estimate_cov(const Sample<double>& s, Deterministic kind) {
  detail::require_samples(s.size(), kind);
  const Eigen::Index T = s.size();
  const Eigen::VectorXd lag = s.lagged_x();
  const Eigen::VectorXd lag_dm = demean(lag, kind);
  const double q_dm = lag_dm.squaredNorm();
  const double q_raw = lag.squaredNorm();
  if (!(q_dm > 0.0) || !(q_raw > 0.0))
    throw DegenerateSample("estimate_cov: regressor has no variation");

  const Eigen::VectorXd y_dm = demean(s.y, kind);
  const double beta_hat = lag_dm.dot(y_dm) / q_dm;
  const double gamma_hat = lag.dot(s.x) / q_raw;
  const Eigen::VectorXd ry = y_dm - beta_hat * lag_dm;
  const Eigen::VectorXd rx = s.x - gamma_hat * lag;

  Cov2 out{ry.squaredNorm() / double(T), ry.dot(rx) / double(T), rx.squaredNorm() / double(T)};
  const double det = out.syy * out.sxx - out.sxy * out.sxy;
  const double scale = out.syy * out.sxx;
  const double fit_floor = 1e-20;
  if (!(out.syy > fit_floor * y_dm.squaredNorm() / double(T)) ||
      !(out.sxx > fit_floor * s.x.squaredNorm() / double(T)) || !(det > 1e-12 * scale) ||
      !std::isfinite(det))
    throw DegenerateSample("estimate_cov: residual covariance is not positive definite");
  return out;
}

}  // namespace cvf
