#pragma once

// Comparison tests for the one-sided t-statistic: fixed normal critical value,
// residual bootstrap (nonparametric and parametric), and subsampling.

#include <cstdint>
#include <vector>

#include "cvf/predictive_model.hpp"

namespace cvf {

enum class BaselineKind { NormalQuantile, BootstrapNonparametric, BootstrapParametric, Subsampling };

const char* baseline_name(BaselineKind kind);

struct BaselineConfig {
  BaselineKind kind = BaselineKind::NormalQuantile;
  std::size_t B = 399;
  std::size_t block_size = 0;  ///< 0 selects floor(T^{2/3})
  double alpha = 0.10;
  double beta0 = 0.0;
  Deterministic det = Deterministic::Intercept;
  /// Variance in the t-statistic's standard error; 0 estimates it per sample.
  double sigma_yy = 0.0;
  /// Which variance is estimated when sigma_yy is 0.
  TVariance variance = TVariance::Syy;

  std::size_t block_for(Eigen::Index T) const;
  /// Throws ConfigError for B < 99, alpha outside (0, 1), or a block size
  /// outside [2, T].
  void validate(Eigen::Index T) const;
};

struct BaselineDecision {
  double psi = 0.0;
  double critical_value = 0.0;
  bool reject = false;
  std::size_t replications = 0;  ///< bootstrap draws or blocks
  bool degenerate = false;       ///< a single block: the critical value is psi itself
};

bool normal_quantile_test(double psi, double alpha);

/// t-statistic used by every baseline under `cfg`.
double baseline_statistic(const Sample<double>& s, const BaselineConfig& cfg);

/// Pseudo-samples under beta = beta0 and gamma = OLS estimate, recursed from
/// x_0 = 0, with innovations resampled jointly from the centered residual
/// pairs (nonparametric) or drawn from N(0, estimated covariance) (parametric).
BaselineDecision bootstrap_test(const Sample<double>& s, const BaselineConfig& cfg,
                                std::uint64_t seed);

/// psi on each of the T - b + 1 overlapping blocks. Each block is its own
/// series: x is shifted so that the lag before the block is zero.
std::vector<double> subsample_statistics(const Sample<double>& s, const BaselineConfig& cfg);

BaselineDecision subsampling_test(const Sample<double>& s, const BaselineConfig& cfg);

/// Dispatches on cfg.kind. The seed is used by the bootstrap only.
BaselineDecision run_baseline(const Sample<double>& s, const BaselineConfig& cfg,
                              std::uint64_t seed);

/// The ceil(level * count)-th smallest value (1-based), +inf past the end.
double order_statistic_quantile(std::vector<double> values, double level, std::size_t count);

}  // namespace cvf
