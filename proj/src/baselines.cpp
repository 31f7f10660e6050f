#include "cvf/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cvf/cvf_engine.hpp"

namespace cvf {

const char* baseline_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::NormalQuantile: return "normal_quantile";
    case BaselineKind::BootstrapNonparametric: return "bootstrap_np";
    case BaselineKind::BootstrapParametric: return "bootstrap_param";
    case BaselineKind::Subsampling: return "subsampling";
  }
  return "?";
}

std::size_t BaselineConfig::block_for(Eigen::Index T) const {
  if (block_size) return block_size;
  return static_cast<std::size_t>(std::floor(std::pow(double(T), 2.0 / 3.0) + 1e-9));
}

void BaselineConfig::validate(Eigen::Index T) const {
  if (B < 99) throw ConfigError("baseline: B must be at least 99");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("baseline: alpha must lie in (0, 1)");
  if (kind == BaselineKind::Subsampling) {
    const std::size_t b = block_for(T);
    if (b < 2 || b > std::size_t(T)) throw ConfigError("baseline: block size outside [2, T]");
  }
}

bool normal_quantile_test(double psi, double alpha) {
  return psi > normal_quantile(1.0 - alpha);
}

double baseline_statistic(const Sample<double>& s, const BaselineConfig& cfg) {
  const double syy =
      cfg.sigma_yy > 0.0 ? cfg.sigma_yy : t_variance(estimate_cov(s, cfg.det), cfg.variance);
  return t_statistic(s, syy, cfg.beta0, cfg.det);
}

double order_statistic_quantile(std::vector<double> values, double level, std::size_t count) {
  const auto rank = static_cast<std::size_t>(std::ceil(level * double(count) - 1e-12));
  if (rank == 0) return -std::numeric_limits<double>::infinity();
  if (rank > values.size()) return std::numeric_limits<double>::infinity();
  std::nth_element(values.begin(), values.begin() + std::ptrdiff_t(rank - 1), values.end());
  return values[rank - 1];
}

namespace {

struct OlsFit {
  double gamma = 0.0;
  Eigen::VectorXd resid_y, resid_x;
};

OlsFit fit(const Sample<double>& s, Deterministic kind) {
  const Eigen::VectorXd lag = s.lagged_x();
  const Eigen::VectorXd lag_dm = demean(lag, kind);
  const double q = lag_dm.squaredNorm();
  const double q_raw = lag.squaredNorm();
  if (!(q > 0.0) || !(q_raw > 0.0)) throw DegenerateSample("bootstrap: regressor has no variation");
  OlsFit f;
  const Eigen::VectorXd y_dm = demean(s.y, kind);
  const double beta_hat = lag_dm.dot(y_dm) / q;
  f.gamma = lag.dot(s.x) / q_raw;
  f.resid_y = y_dm - beta_hat * lag_dm;
  f.resid_x = s.x - f.gamma * lag;
  return f;
}

}  // namespace

BaselineDecision bootstrap_test(const Sample<double>& s, const BaselineConfig& cfg,
                                std::uint64_t seed) {
  if (cfg.kind != BaselineKind::BootstrapNonparametric &&
      cfg.kind != BaselineKind::BootstrapParametric)
    throw std::invalid_argument("bootstrap_test: configuration is not a bootstrap");
  const Eigen::Index T = s.size();
  cfg.validate(T);
  const OlsFit f = fit(s, cfg.det);

  ModelParams p;
  p.beta = cfg.beta0;
  p.gamma = f.gamma;
  p.kind = cfg.det;

  Rng rng(seed);
  Eigen::VectorXd ey(T), ex(T);
  std::vector<double> stats(cfg.B);
  if (cfg.kind == BaselineKind::BootstrapNonparametric) {
    const Eigen::VectorXd cy = f.resid_y.array() - f.resid_y.mean();
    const Eigen::VectorXd cx = f.resid_x.array() - f.resid_x.mean();
    std::uniform_int_distribution<Eigen::Index> pick(0, T - 1);
    for (std::size_t b = 0; b < cfg.B; ++b) {
      for (Eigen::Index t = 0; t < T; ++t) {
        const Eigen::Index i = pick(rng);
        ey(t) = cy(i);
        ex(t) = cx(i);
      }
      stats[b] = baseline_statistic(build_sample(p, ey, ex), cfg);
    }
  } else {
    Cov2 est;
    est.syy = f.resid_y.squaredNorm() / double(T);
    est.sxx = f.resid_x.squaredNorm() / double(T);
    est.sxy = f.resid_y.dot(f.resid_x) / double(T);
    if (!est.valid()) throw DegenerateSample("bootstrap: singular residual covariance");
    for (std::size_t b = 0; b < cfg.B; ++b) {
      draw_innovations(est, T, rng, ey, ex);
      stats[b] = baseline_statistic(build_sample(p, ey, ex), cfg);
    }
  }

  BaselineDecision d;
  d.psi = baseline_statistic(s, cfg);
  d.critical_value = order_statistic_quantile(std::move(stats), 1.0 - cfg.alpha, cfg.B + 1);
  d.reject = d.psi > d.critical_value;
  d.replications = cfg.B;
  return d;
}

std::vector<double> subsample_statistics(const Sample<double>& s, const BaselineConfig& cfg) {
  const Eigen::Index T = s.size();
  const auto b = Eigen::Index(cfg.block_for(T));
  if (b < 2 || b > T) throw ConfigError("subsampling: block size outside [2, T]");
  std::vector<double> out;
  out.reserve(std::size_t(T - b + 1));
  Sample<double> blk;
  for (Eigen::Index start = 0; start + b <= T; ++start) {
    const double origin = start == 0 ? 0.0 : s.x(start - 1);
    blk.y = s.y.segment(start, b);
    blk.x = s.x.segment(start, b).array() - origin;
    out.push_back(baseline_statistic(blk, cfg));
  }
  return out;
}

BaselineDecision subsampling_test(const Sample<double>& s, const BaselineConfig& cfg) {
  cfg.validate(s.size());
  std::vector<double> stats = subsample_statistics(s, cfg);
  BaselineDecision d;
  d.psi = baseline_statistic(s, cfg);
  d.replications = stats.size();
  d.degenerate = stats.size() == 1;
  d.critical_value = order_statistic_quantile(std::move(stats), 1.0 - cfg.alpha, d.replications);
  d.reject = d.psi > d.critical_value;
  return d;
}

BaselineDecision run_baseline(const Sample<double>& s, const BaselineConfig& cfg,
                              std::uint64_t seed) {
  switch (cfg.kind) {
    case BaselineKind::NormalQuantile: {
      cfg.validate(s.size());
      BaselineDecision d;
      d.psi = baseline_statistic(s, cfg);
      d.critical_value = normal_quantile(1.0 - cfg.alpha);
      d.reject = d.psi > d.critical_value;
      return d;
    }
    case BaselineKind::BootstrapNonparametric:
    case BaselineKind::BootstrapParametric:
      return bootstrap_test(s, cfg, seed);
    case BaselineKind::Subsampling:
      return subsampling_test(s, cfg);
  }
  throw std::invalid_argument("run_baseline: unknown kind");
}

}  // namespace cvf
