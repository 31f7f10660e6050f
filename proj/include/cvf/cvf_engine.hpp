#pragma once

// Critical value function (CVF) calibration.
//
// The test rejects when psi(r) > kappa(r), where
//
//   kappa(r) = sum_i k_i f_{0,gamma_i}(r) / f_nu(r)
//
// and nu is either the equal-weight mixture over the grid (nu_star) or a point
// mass at the grid center (nu_dagger). The k_i are the equality-row
// multipliers of a box-constrained LP assembled from draws of the nu_star
// mixture, which makes the test similar on the grid up to Monte Carlo error.
// `refine` grows the grid one most-discrepant point at a time.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvf/errors.hpp"
#include "cvf/lp.hpp"
#include "cvf/predictive_model.hpp"

namespace cvf {

enum class GridMapping {
  PerT,      ///< gamma_i = center + c_i / T
  Local,     ///< gamma_i = center + c_i * g_T(center)
  Absolute,  ///< gamma_i = center + c_i
};

struct Grid {
  double center = 1.0;
  std::vector<double> offsets;
  GridMapping mapping = GridMapping::PerT;
  Eigen::Index T = 100;

  std::size_t size() const { return offsets.size(); }
  double gamma_at(double offset) const;
  Eigen::VectorXd gammas() const;
  /// Offsets in units of g_T(center), the argument c of log_lr.
  Eigen::VectorXd local_offsets() const;
  /// Throws std::invalid_argument for an empty grid, non-finite points, or
  /// two points closer than 1e-9 in gamma.
  void validate() const;
};

enum class BaselineMeasure { NuStar, NuDagger };

enum class CovMode {
  Known,      ///< statistics use the design covariance
  Estimated,  ///< statistics use estimate_cov of each sample
};

enum class FlatteningScheme { None, Ratio, Information, Both };

/// Forces kappa to flat_value where no adjustment is expected: large
/// |R_gamma / K_gammagamma| (Ratio) or K_gammagamma outside [k_low, k_high]
/// (Information).
struct Flattening {
  FlatteningScheme scheme = FlatteningScheme::None;
  double ratio_threshold = 1e2;
  double k_low = 1e-2;
  double k_high = 1e6;
  double flat_value = 0.0;  ///< normal (1 - alpha) quantile, set from alpha

  bool enabled() const { return scheme != FlatteningScheme::None; }
};

struct CvfModel {
  Grid grid;
  Eigen::VectorXd k;
  BaselineMeasure measure = BaselineMeasure::NuStar;
  Flattening flattening;
  double alpha = 0.10;
  double beta0 = 0.0;
  CovMode cov_mode = CovMode::Known;
  Cov2 cov;  ///< design covariance used for calibration
  Deterministic kind = Deterministic::Intercept;
};

struct RejectionEstimate {
  double p_hat = 0.0;
  std::size_t reps = 0;

  double std_err() const {
    return reps ? std::sqrt(p_hat * (1.0 - p_hat) / double(reps)) : 0.0;
  }
};

/// psi(sample, covariance used for the statistic, deterministic kind).
using Statistic = std::function<double(const Sample<double>&, const Cov2&, Deterministic)>;

/// The t-statistic with standard error from the covariance it is handed.
Statistic t_statistic_fn(double beta0 = 0.0, TVariance variance = TVariance::Syy);

double normal_quantile(double p);

// ---------------------------------------------------------------------------

struct MixtureDraw {
  Sample<double> sample;
  int component = 0;
};

/// J draws from the nu_star mixture: each picks a grid point uniformly, then
/// simulates under beta = 0 at that gamma. Draw j depends only on (seed, j).
std::vector<MixtureDraw> sample_mixture(const Grid& grid, const Cov2& cov, std::size_t J,
                                        std::uint64_t seed,
                                        Deterministic kind = Deterministic::Intercept,
                                        unsigned threads = 1);

struct AssembleOptions {
  double alpha = 0.10;
  double beta0 = 0.0;
  BaselineMeasure measure = BaselineMeasure::NuStar;
  Deterministic kind = Deterministic::Intercept;
  unsigned threads = 1;
};

/// LP whose row multipliers are the CVF coefficients. Rows and objective are
/// scaled by 1/J so that the multipliers are on the scale of psi.
LpProblem assemble_lp(const std::vector<MixtureDraw>& draws, const Grid& grid, const Cov2& cov,
                      const Statistic& psi, const AssembleOptions& options = {});

struct CalibrationOptions {
  double alpha = 0.10;
  double beta0 = 0.0;
  std::size_t J = 10000;
  std::uint64_t seed = 0;
  BaselineMeasure measure = BaselineMeasure::NuStar;
  Deterministic kind = Deterministic::Intercept;
  unsigned threads = 1;
};

struct CalibrationResult {
  CvfModel model;
  LpSolution lp;
  /// Importance-weighted rejection rate of the deterministic rule psi > kappa
  /// on the calibration draws, per grid point.
  Eigen::VectorXd in_sample_rejection;
};

/// Requires J >= 100 n.
CalibrationResult calibrate(const Grid& grid, const Cov2& cov, const Statistic& psi,
                            const CalibrationOptions& options);

/// kappa at a sample's local statistics (computed at the grid center).
double evaluate_cvf(const CvfModel& model, const LocalStats<double>& ls);
/// kappa(r), with `cov` the covariance the statistics are built from.
double evaluate_cvf(const CvfModel& model, const Sample<double>& s, const Cov2& cov);

struct TestDecision {
  double psi = 0.0;
  double kappa = 0.0;
  bool reject = false;
};

/// Applies psi > kappa, estimating the covariance first in Estimated mode.
TestDecision evaluate_test(const CvfModel& model, const Sample<double>& s,
                           const Cov2& known_cov, const Statistic& psi);

struct RejectionOptions {
  std::size_t J = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Rejection rate under (params.beta, params.gamma).
RejectionEstimate rejection_rate(const CvfModel& model, const ModelParams& params,
                                 const Statistic& psi, const RejectionOptions& options);

RejectionEstimate null_rejection(const CvfModel& model, double gamma, const Cov2& cov,
                                 const Statistic& psi, const RejectionOptions& options);

/// Null rejection at several gammas with common random numbers: replication r
/// reuses the same innovations at every gamma, so the result at each gamma
/// equals null_rejection with the same seed.
std::vector<RejectionEstimate> rejection_profile(const CvfModel& model,
                                                 const std::vector<double>& gammas,
                                                 const Cov2& cov, const Statistic& psi,
                                                 const RejectionOptions& options);

// ---------------------------------------------------------------------------

struct RefineConfig {
  std::vector<double> initial_offsets{-50.0, 20.0};
  std::vector<double> check_offsets;  ///< empty selects 100 points on [-50, 20]
  double center = 1.0;
  GridMapping mapping = GridMapping::PerT;
  Eigen::Index T = 100;
  double alpha = 0.10;
  double beta0 = 0.0;
  double epsilon = 0.015;
  std::size_t max_iter = 50;
  /// Mixture draws per grid point: each LP row, one rejection probability,
  /// rests on about J_calibration draws, so the sample grows with the grid.
  std::size_t J_calibration = 10000;
  std::size_t J_check = 10000;  ///< fresh draws per check point
  Cov2 cov;
  Deterministic kind = Deterministic::Intercept;
  BaselineMeasure measure = BaselineMeasure::NuStar;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

std::vector<double> linspace(double lo, double hi, std::size_t count);

struct RefineIteration {
  std::vector<double> offsets;
  Eigen::VectorXd k;
  std::vector<double> check_p_hat;
  double max_discrepancy = 0.0;
  std::optional<double> added_offset;
};

struct RefineResult {
  CvfModel model;
  std::vector<RefineIteration> audit;
  std::vector<double> check_offsets;
  bool converged = false;

  std::size_t added_points() const;
};

class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, RefineResult partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const RefineResult& partial() const { return partial_; }

 private:
  RefineResult partial_;
};

/// Calibrate, measure null rejection on the check grid with a separate seed
/// stream, add the most discrepant check point not already on the grid, and
/// repeat until every check point is within epsilon of alpha.
RefineResult refine(const RefineConfig& config, const Statistic& psi);

/// P(|p_hat - alpha| > epsilon) for p_hat = Binomial(J, alpha) / J: the chance
/// that a check point is flagged from Monte Carlo noise alone.
double mc_discrepancy_bound(std::size_t J, double alpha, double epsilon);

// ---------------------------------------------------------------------------
// CVF/1 text format

void write_model(std::ostream& out, const CvfModel& model);
CvfModel read_model(std::istream& in);
void save_model(const std::string& path, const CvfModel& model);
CvfModel load_model(const std::string& path);

}  // namespace cvf
