#pragma once

// Experiment runners behind the command-line tool. Each run writes CSV files
// into config.out_dir; every file starts with a comment line carrying the
// experiment name, a hash of the result-relevant configuration, and the seed,
// followed by a header row. Outputs depend on (config, seed) only, never on
// the thread count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvf/baselines.hpp"
#include "cvf/cvf_engine.hpp"

namespace cvf {

enum class ExperimentKind { Calibrate, Size, Power, CvfSurface, Compare, Limits };

const char* experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string& name);

/// Unit of b on the power grid. Local: sigma_yy.x^{1/2} sigma_xx^{-1/2} g_T(gamma),
/// the local-alternative scale used by the likelihood ratio. Variance:
/// sigma_yy.x g_T(gamma), the power formula as printed.
enum class PowerScale { Local, Variance };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Calibrate;
  std::optional<std::uint64_t> seed;  ///< required
  unsigned threads = 1;
  std::string out_dir = ".";
  /// Directory with cvf_rho_<rho>.cvf files from an earlier calibrate run.
  /// Empty means calibrate on demand.
  std::string model_dir;

  Eigen::Index T = 100;
  double alpha = 0.10;
  std::vector<double> rho{0.95, -0.95};
  Deterministic det = Deterministic::Intercept;
  /// Empty selects known for size and compare, estimated for power.
  std::optional<CovMode> cov_mode;
  BaselineMeasure measure = BaselineMeasure::NuStar;
  FlatteningScheme flattening = FlatteningScheme::None;
  TVariance t_variance = TVariance::Syy;

  // calibration
  double epsilon = 0.015;
  std::size_t J_calibration = 10000;  ///< per grid point
  std::size_t J_check = 10000;        ///< per check point
  std::size_t max_iter = 50;

  // size / compare sweep, c mapped to gamma = 1 + c / T
  double c_min = -100.0;
  double c_max = 50.0;
  std::size_t c_count = 31;
  std::size_t J = 10000;
  std::vector<BaselineKind> baselines{BaselineKind::NormalQuantile,
                                      BaselineKind::BootstrapNonparametric,
                                      BaselineKind::BootstrapParametric,
                                      BaselineKind::Subsampling};
  std::size_t J_baseline = 1000;
  std::size_t B = 399;
  std::size_t block_size = 0;

  // power: beta = b * power_unit(gamma)
  std::vector<double> power_c{-15.0, 0.0};
  PowerScale power_scale = PowerScale::Local;
  int b_min = -10;
  int b_max = 10;
  std::vector<std::string> overlays;  ///< name=path

  // surface
  std::vector<double> surface_gamma{0.2, 0.5, 0.9, 1.0, 1.1, 1.4};
  std::size_t surface_draws = 500;

  // limits
  std::vector<Eigen::Index> integrated_T{100, 400, 1600};
  std::vector<Eigen::Index> stationary_T{250, 1000, 4000};
  std::vector<Eigen::Index> explosive_T{50, 100, 200};
  double stationary_gamma = 0.5;
  double explosive_gamma = 1.05;
  std::size_t limit_M = 2000;
  std::size_t limit_draws = 10000;
  std::size_t limit_steps = 1000;

  /// Throws ConfigError.
  void validate() const;
  /// key=value lines of everything that affects results (not threads or paths).
  std::string canonical() const;
  std::uint64_t hash() const;
  CovMode cov_mode_for(ExperimentKind k) const;
};

std::vector<double> c_sweep(const ExperimentConfig& cfg);

/// beta per unit of b at `gamma` under cfg.power_scale.
double power_unit(const ExperimentConfig& cfg, const Cov2& cov, double gamma);

/// CVF model for one rho: loaded from model_dir, or refined on demand.
/// Throws NoConvergence from refine.
CvfModel obtain_model(const ExperimentConfig& cfg, double rho);

RefineConfig refine_config(const ExperimentConfig& cfg, double rho);

/// cvf_rho_<rho>.cvf, with a _syy_x suffix for models of the SyyX statistic.
std::string model_file_name(double rho, TVariance variance = TVariance::Syy);

/// Each returns the paths written.
std::vector<std::string> run_calibrate(const ExperimentConfig& cfg);
std::vector<std::string> run_size(const ExperimentConfig& cfg);
std::vector<std::string> run_power(const ExperimentConfig& cfg);
std::vector<std::string> run_cvf_surface(const ExperimentConfig& cfg);
std::vector<std::string> run_compare(const ExperimentConfig& cfg);
std::vector<std::string> run_limits(const ExperimentConfig& cfg);
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

/// 2 (F(z) - 1/2) with F the logistic cdf.
double logistic_scale(double z);

struct OverlayRow {
  std::optional<double> rho, c;
  double b = 0.0;
  double power = 0.0;
};

/// CSV with a header containing b and power, optionally rho and c. Throws
/// IoError if unreadable, BadOverlay if malformed.
std::vector<OverlayRow> read_overlay(const std::string& path);

}  // namespace cvf
