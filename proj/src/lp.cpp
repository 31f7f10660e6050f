#include "cvf/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cvf/errors.hpp"

namespace cvf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kRefactorEvery = 20;

class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& p, const LpOptions& opt)
      : A_(p.constraint_matrix),
        b_(p.rhs),
        d_(p.objective),
        opt_(opt),
        n_(A_.rows()),
        J_(A_.cols()),
        lower_(J_ + n_, 0.0),
        upper_(J_ + n_, 1.0),
        x_(J_ + n_, 0.0),
        at_upper_(J_ + n_, false),
        pos_(J_ + n_, -1),
        art_sign_(n_) {
    if (opt_.max_iterations == 0)
      opt_.max_iterations = 50 * static_cast<std::size_t>(J_ + n_) + 1000;
    // A warm start puts each column at the bound its reduced cost under the
    // hinted multipliers prefers; the artificials absorb what is left.
    Eigen::VectorXd residual = b_;
    if (opt_.start_duals.size() == n_) {
      const Eigen::VectorXd rc = d_ - A_.transpose() * opt_.start_duals;
      for (Eigen::Index j = 0; j < J_; ++j)
        if (rc(j) > 0.0) {
          x_[j] = 1.0;
          at_upper_[j] = true;
          residual -= A_.col(j);
        }
    }
    basis_.resize(n_);
    for (Eigen::Index l = 0; l < n_; ++l) {
      const Eigen::Index v = J_ + l;
      art_sign_(l) = residual(l) >= 0.0 ? 1.0 : -1.0;
      upper_[v] = kInf;
      x_[v] = std::abs(residual(l));
      basis_[l] = v;
      pos_[v] = l;
    }
  }

  LpSolution solve() {
    run_phase(/*phase_one=*/true);
    for (Eigen::Index l = 0; l < n_; ++l) {
      if (x_[J_ + l] > opt_.feasibility_tol)
        throw Infeasible("solve_boxed_lp: no point of the box satisfies the equality rows");
    }
    for (Eigen::Index l = 0; l < n_; ++l) {
      const Eigen::Index v = J_ + l;
      upper_[v] = 0.0;
      if (pos_[v] < 0) x_[v] = 0.0;
    }
    run_phase(/*phase_one=*/false);

    LpSolution sol;
    sol.m = Eigen::Map<const Eigen::VectorXd>(x_.data(), J_);
    sol.k = duals_;
    sol.objective_value = d_.dot(sol.m);
    sol.iterations = iterations_;
    sol.status = degenerate() ? LpStatus::DegenerateWarning : LpStatus::Optimal;
    return sol;
  }

 private:
  Eigen::VectorXd column(Eigen::Index v) const {
    if (v < J_) return A_.col(v);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
    e(v - J_) = art_sign_(v - J_);
    return e;
  }

  double cost(Eigen::Index v, bool phase_one) const {
    if (phase_one) return v >= J_ ? -1.0 : 0.0;
    return v < J_ ? d_(v) : 0.0;
  }

  void refactor(bool phase_one) {
    Eigen::MatrixXd B(n_, n_);
    Eigen::VectorXd cb(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      B.col(i) = column(basis_[i]);
      cb(i) = cost(basis_[i], phase_one);
    }
    Binv_ = B.partialPivLu().inverse();
    duals_ = Binv_.transpose() * cb;

    // Basic values from the nonbasic assignment.
    Eigen::VectorXd xs(J_);
    for (Eigen::Index j = 0; j < J_; ++j) xs(j) = pos_[j] < 0 ? x_[j] : 0.0;
    Eigen::VectorXd r = b_ - A_ * xs;
    for (Eigen::Index l = 0; l < n_; ++l) {
      const Eigen::Index v = J_ + l;
      if (pos_[v] < 0) r(l) -= art_sign_(l) * x_[v];
    }
    const Eigen::VectorXd xb = Binv_ * r;
    for (Eigen::Index i = 0; i < n_; ++i) {
      const Eigen::Index v = basis_[i];
      double val = xb(i);
      if (val < lower_[v] && val > lower_[v] - opt_.feasibility_tol) val = lower_[v];
      if (val > upper_[v] && val < upper_[v] + opt_.feasibility_tol) val = upper_[v];
      x_[v] = val;
    }
  }

  void run_phase(bool phase_one) {
    Eigen::VectorXd c_struct(J_);
    for (Eigen::Index j = 0; j < J_; ++j) c_struct(j) = cost(j, phase_one);
    const double scale = phase_one ? 1.0 : std::max(d_.cwiseAbs().maxCoeff(), 1e-300);
    const double dual_tol = opt_.dual_tol * scale;
    std::size_t degenerate_streak = 0;
    bool basis_changed = true;
    std::size_t since_refactor = 0;

    for (;;) {
      if (++iterations_ > opt_.max_iterations)
        throw NumericalFailure("solve_boxed_lp: iteration cap reached");
      // A bound flip leaves the basis, and so the duals and reduced costs, as
      // they were; only a basis change needs a new factorization.
      if (basis_changed) {
        if (since_refactor == 0 || since_refactor >= kRefactorEvery) {
          refactor(phase_one);
          since_refactor = 0;
        } else {
          Eigen::VectorXd cb(n_);
          for (Eigen::Index i = 0; i < n_; ++i) cb(i) = cost(basis_[i], phase_one);
          duals_ = Binv_.transpose() * cb;
        }
        ++since_refactor;
        reduced_ = c_struct - A_.transpose() * duals_;
      }
      basis_changed = true;

      const bool bland = degenerate_streak >= opt_.bland_after;
      Eigen::Index entering = -1;
      double best = 0.0;
      auto consider = [&](Eigen::Index v, double rc) {
        if (pos_[v] >= 0 || upper_[v] <= lower_[v]) return;
        const bool improving = at_upper_[v] ? rc < -dual_tol : rc > dual_tol;
        if (!improving) return;
        if (bland) {
          if (entering < 0) entering = v;
        } else if (std::abs(rc) > best) {
          best = std::abs(rc);
          entering = v;
        }
      };
      for (Eigen::Index j = 0; j < J_ && !(bland && entering >= 0); ++j) consider(j, reduced_(j));
      if (phase_one) {
        for (Eigen::Index l = 0; l < n_; ++l) {
          const Eigen::Index v = J_ + l;
          consider(v, cost(v, true) - art_sign_(l) * duals_(l));
        }
      }
      if (entering < 0) return;

      const double dir = at_upper_[entering] ? -1.0 : 1.0;
      const Eigen::VectorXd w = Binv_ * column(entering);

      double theta = upper_[entering] - lower_[entering];
      Eigen::Index leave = -1;
      bool leave_to_upper = false;
      double leave_mag = 0.0;
      for (Eigen::Index i = 0; i < n_; ++i) {
        const double rate = -dir * w(i);
        const Eigen::Index v = basis_[i];
        double room;
        bool to_upper;
        if (rate < -opt_.pivot_tol) {
          room = (x_[v] - lower_[v]) / -rate;
          to_upper = false;
        } else if (rate > opt_.pivot_tol && std::isfinite(upper_[v])) {
          room = (upper_[v] - x_[v]) / rate;
          to_upper = true;
        } else {
          continue;
        }
        room = std::max(room, 0.0);
        const bool tie = leave >= 0 && std::abs(room - theta) <= 1e-12;
        bool take = room < theta - 1e-12;
        if (tie) take = bland ? v < basis_[leave] : std::abs(rate) > leave_mag;
        if (leave < 0 && room <= theta) take = true;
        if (take) {
          theta = room;
          leave = i;
          leave_to_upper = to_upper;
          leave_mag = std::abs(rate);
        }
      }
      if (!std::isfinite(theta))
        throw NumericalFailure("solve_boxed_lp: unbounded direction in a bounded problem");

      degenerate_streak = theta <= 1e-12 ? degenerate_streak + 1 : 0;
      x_[entering] += dir * theta;
      for (Eigen::Index i = 0; i < n_; ++i) x_[basis_[i]] -= dir * theta * w(i);

      if (leave < 0) {
        // Bound flip: the entering variable crosses its box without a basis change.
        at_upper_[entering] = !at_upper_[entering];
        x_[entering] = at_upper_[entering] ? upper_[entering] : lower_[entering];
        basis_changed = false;
        continue;
      }
      // Product-form update of the basis inverse; refactor() replaces it
      // every kRefactorEvery pivots to keep rounding from accumulating.
      Binv_.row(leave) /= w(leave);
      for (Eigen::Index i = 0; i < n_; ++i)
        if (i != leave) Binv_.row(i) -= w(i) * Binv_.row(leave);
      const Eigen::Index out = basis_[leave];
      x_[out] = leave_to_upper ? upper_[out] : lower_[out];
      at_upper_[out] = leave_to_upper;
      pos_[out] = -1;
      basis_[leave] = entering;
      pos_[entering] = leave;
      at_upper_[entering] = false;
    }
  }

  bool degenerate() const {
    for (Eigen::Index i = 0; i < n_; ++i) {
      const Eigen::Index v = basis_[i];
      if (v >= J_) return true;
      if (x_[v] <= lower_[v] + opt_.feasibility_tol || x_[v] >= upper_[v] - opt_.feasibility_tol)
        return true;
    }
    const double tol = opt_.dual_tol * std::max(d_.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index j = 0; j < J_; ++j)
      if (pos_[j] < 0 && std::abs(reduced_(j)) <= tol) return true;
    return false;
  }

  const Eigen::MatrixXd& A_;
  const Eigen::VectorXd& b_;
  const Eigen::VectorXd& d_;
  LpOptions opt_;
  Eigen::Index n_, J_;
  std::vector<double> lower_, upper_, x_;
  std::vector<bool> at_upper_;
  std::vector<Eigen::Index> pos_;
  std::vector<Eigen::Index> basis_;
  Eigen::VectorXd art_sign_;
  Eigen::MatrixXd Binv_;
  Eigen::VectorXd duals_;
  Eigen::VectorXd reduced_;
  std::size_t iterations_ = 0;
};

void validate(const LpProblem& p) {
  const auto n = p.rows(), J = p.cols();
  if (n < 1) throw std::invalid_argument("solve_boxed_lp: need at least one equality row");
  if (J < n) throw std::invalid_argument("solve_boxed_lp: fewer variables than rows");
  if (p.objective.size() != J || p.rhs.size() != n)
    throw std::invalid_argument("solve_boxed_lp: dimension mismatch");
  if (!p.constraint_matrix.allFinite() || !p.objective.allFinite() || !p.rhs.allFinite())
    throw std::invalid_argument("solve_boxed_lp: non-finite input");
}

}  // namespace

LpSolution solve_boxed_lp(const LpProblem& problem, const LpOptions& options) {
  validate(problem);
  return BoundedSimplex(problem, options).solve();
}

}  // namespace cvf
