#pragma once

// Limit experiments of the local statistics at the unit-root center, and
// distribution checks of finite-T statistics against them.
//
// Limit functionals are Euler discretizations on [0, 1] with left-point
// stochastic integrals. W_{x,c} solves dW_{x,c} = c W_{x,c} dr + dW_x from 0.
// Two readings of the integrated-regime law are available:
//
//   FiniteSample: the limit of local_stats at center 1 under gamma = 1 + c/T,
//     R_gamma = sqrt2 int W_{x,c} dW_{x,c} - k R_beta,
//     K_gammagamma = 2 (k^2 int (W^mu_{x,c})^2 + int W_{x,c}^2),   k = rho / sqrt(1 - rho^2).
//   Displayed: R_gamma = sqrt2 (int W^mu_x dW_x - k R_beta) with the Brownian
//     path W_x, and K_gammagamma = 2 (rho / (1 - rho^2) + 1) int (W^mu_{x,c})^2.
//
// R_beta, K_betabeta and K_betagamma agree between the readings.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cvf {

enum class LimitReading { FiniteSample, Displayed };

const char* reading_name(LimitReading r);

struct LimitDraw {
  double c = 0.0;
  double r_beta = 0.0;
  double r_gamma = 0.0;
  double k_betabeta = 0.0;
  double k_betagamma = 0.0;
  double k_gammagamma = 0.0;
  std::size_t N = 0;
};

/// Functionals of one pair of standard Brownian paths given by their N
/// increments on [0, 1].
LimitDraw limit_functionals(const Eigen::VectorXd& dw_x, const Eigen::VectorXd& dw_y, double c,
                            double rho, LimitReading reading = LimitReading::FiniteSample);

/// Requires N >= 1000.
LimitDraw simulate_limit_draw(double c, double rho, std::size_t N, std::uint64_t seed,
                              LimitReading reading = LimitReading::FiniteSample);

/// M independent draws; draw m depends only on (seed, m).
std::vector<LimitDraw> simulate_limit_draws(double c, double rho, std::size_t N, std::size_t M,
                                            std::uint64_t seed, unsigned threads = 1,
                                            LimitReading reading = LimitReading::FiniteSample);

double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// sup |F_n - F| against N(0, variance).
double ks_normal(std::vector<double> a, double variance);

enum class Regime { Stationary, Integrated, Explosive };

const char* regime_name(Regime r);

struct ConvergenceConfig {
  Regime regime = Regime::Integrated;
  double gamma = 0.5;  ///< true value for Stationary and Explosive
  double c = 0.0;      ///< local parameter for Integrated: gamma = 1 + c / T
  double rho = 0.0;
  std::vector<Eigen::Index> T_ladder{100, 400, 1600};
  std::size_t M = 2000;
  /// Fine steps of the coupled Brownian paths (Integrated); must be a multiple
  /// of every T on the ladder. 0 selects 4 max(T).
  std::size_t N = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// One coordinate at one T. The reference law is N(0, K^S) (Stationary), the
/// limit functionals under `reference` (Integrated), or N(0, 1) for the
/// t-statistic (Explosive).
struct DistanceRow {
  Eigen::Index T = 0;
  std::string coordinate;
  std::string reference;
  double ks = 0.0;
  double finite_mean = 0.0;
  double finite_var = 0.0;
  double reference_mean = 0.0;
  double reference_var = 0.0;
  double finite_cov_r_beta = 0.0;  ///< sample Cov(coordinate, R_beta)
};

struct ConvergenceReport {
  Regime regime = Regime::Integrated;
  std::vector<DistanceRow> rows;

  /// KS distances of one coordinate and reference, in ladder order.
  std::vector<double> ks_path(const std::string& coordinate, const std::string& reference) const;
};

/// Integrated draws are coupled: the finite-T innovations are the fine
/// Brownian increments aggregated over blocks of N / T steps, so the finite
/// and limit samples differ only by discretization.
ConvergenceReport convergence_check(const ConvergenceConfig& config);

}  // namespace cvf
