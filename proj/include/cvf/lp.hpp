#pragma once

// Box-constrained linear program with a handful of equality rows:
//
//   maximize d'm   subject to   A m = rhs,   0 <= m <= 1.
//
// Solved by a two-phase bounded-variable revised simplex. The multipliers of
// the equality rows are returned alongside the primal point; for the
// calibration problem they are the critical value function coefficients.

#include <cstddef>

#include <Eigen/Dense>

namespace cvf {

struct LpProblem {
  Eigen::VectorXd objective;          ///< d, length J
  Eigen::MatrixXd constraint_matrix;  ///< A, n x J
  Eigen::VectorXd rhs;                ///< length n

  Eigen::Index rows() const { return constraint_matrix.rows(); }
  Eigen::Index cols() const { return constraint_matrix.cols(); }
};

enum class LpStatus {
  Optimal,
  /// Optimal, but the vertex is degenerate: the row multipliers (or the
  /// optimal primal point) need not be unique.
  DegenerateWarning,
};

struct LpSolution {
  Eigen::VectorXd m;  ///< primal point in [0,1]^J
  Eigen::VectorXd k;  ///< equality-row multipliers
  double objective_value = 0.0;
  LpStatus status = LpStatus::Optimal;
  std::size_t iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;  ///< absolute, on rows and bounds
  double dual_tol = 1e-9;         ///< relative to max |d_j|
  double pivot_tol = 1e-11;
  /// Consecutive degenerate pivots after which pricing switches from the
  /// largest reduced cost to Bland's smallest-index rule.
  std::size_t bland_after = 25;
  std::size_t max_iterations = 0;  ///< 0 selects 50 (J + n) + 1000
  /// Optional multipliers from a related problem. Phase one then starts from
  /// the box vertex with m_j = 1 exactly where d_j - (A'k)_j > 0. The optimum
  /// is the same; only the pivot count changes.
  Eigen::VectorXd start_duals;
};

/// Throws std::invalid_argument on malformed input, Infeasible when no box
/// point satisfies the rows, NumericalFailure when the iteration cap is hit.
LpSolution solve_boxed_lp(const LpProblem& problem, const LpOptions& options = {});

}  // namespace cvf
