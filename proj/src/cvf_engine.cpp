#include "cvf/cvf_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "cvf/parallel.hpp"

namespace cvf {

// ---------------------------------------------------------------------------
// Grid

double Grid::gamma_at(double offset) const {
  switch (mapping) {
    case GridMapping::PerT:
      return center + offset / double(T);
    case GridMapping::Local:
      return center + offset * scaling_g(center, T);
    case GridMapping::Absolute:
      return center + offset;
  }
  return center;
}

Eigen::VectorXd Grid::gammas() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(offsets.size()));
  for (std::size_t i = 0; i < offsets.size(); ++i) out(Eigen::Index(i)) = gamma_at(offsets[i]);
  return out;
}

Eigen::VectorXd Grid::local_offsets() const {
  const double g = scaling_g(center, T);
  return (gammas().array() - center) / g;
}

void Grid::validate() const {
  if (offsets.empty()) throw std::invalid_argument("Grid: no points");
  if (T < 3) throw std::invalid_argument("Grid: T must be at least 3");
  const Eigen::VectorXd gs = gammas();
  if (!gs.allFinite() || !std::isfinite(center))
    throw std::invalid_argument("Grid: non-finite point");
  for (Eigen::Index i = 0; i < gs.size(); ++i)
    for (Eigen::Index j = i + 1; j < gs.size(); ++j)
      if (std::abs(gs(i) - gs(j)) <= 1e-9)
        throw std::invalid_argument("Grid: duplicate point (rows would be dependent)");
}

// ---------------------------------------------------------------------------

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Statistic t_statistic_fn(double beta0, TVariance variance) {
  return [beta0, variance](const Sample<double>& s, const Cov2& cov, Deterministic kind) {
    return t_statistic(s, t_variance(cov, variance), beta0, kind);
  };
}

namespace {

/// log f_{0,gamma_i} - log f_{0,center} for every grid point.
Eigen::VectorXd grid_log_ratios(const LocalStats<double>& ls, const Eigen::VectorXd& h) {
  return h.array() * ls.r_gamma - 0.5 * h.array().square() * ls.k_gammagamma;
}

/// v - log(mean(exp(v))), shifted by the max first so the largest entry keeps
/// its precision when |v| is large.
Eigen::VectorXd log_softmax_n(const Eigen::VectorXd& v, double& log_mean) {
  const double m = v.maxCoeff();
  const Eigen::ArrayXd shifted = v.array() - m;
  const double lm = std::log(shifted.exp().mean());
  log_mean = m + lm;
  return shifted - lm;
}

Cov2 statistic_cov(const CvfModel& model, const Sample<double>& s, const Cov2& known) {
  return model.cov_mode == CovMode::Known ? known : estimate_cov(s, model.kind);
}

}  // namespace

// ---------------------------------------------------------------------------
// Sampling and LP assembly

std::vector<MixtureDraw> sample_mixture(const Grid& grid, const Cov2& cov, std::size_t J,
                                        std::uint64_t seed, Deterministic kind,
                                        unsigned threads) {
  grid.validate();
  const Eigen::VectorXd gs = grid.gammas();
  const int n = static_cast<int>(grid.size());
  std::vector<MixtureDraw> draws(J);
  parallel_for(J, threads, [&](std::size_t j) {
    Rng rng(derive_seed(seed, Stream::Calibration, j));
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int i = pick(rng);
    ModelParams p;
    p.beta = 0.0;
    p.gamma = gs(i);
    p.kind = kind;
    p.cov = cov;
    draws[j] = {simulate(p, grid.T, rng), i};
  });
  return draws;
}

LpProblem assemble_lp(const std::vector<MixtureDraw>& draws, const Grid& grid, const Cov2& cov,
                      const Statistic& psi, const AssembleOptions& options) {
  grid.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index J = static_cast<Eigen::Index>(draws.size());
  if (J < n) throw std::invalid_argument("assemble_lp: fewer draws than grid points");
  const Eigen::VectorXd h = grid.local_offsets();

  LpProblem lp;
  lp.objective.resize(J);
  lp.constraint_matrix.resize(n, J);
  lp.rhs = Eigen::VectorXd::Constant(n, options.alpha);
  const double inv_J = 1.0 / double(J);

  parallel_for(std::size_t(J), options.threads, [&](std::size_t jj) {
    const auto j = Eigen::Index(jj);
    const Sample<double>& s = draws[jj].sample;
    const auto ls = local_stats(s, cov, grid.center, options.beta0, options.kind);
    const Eigen::VectorXd lam = grid_log_ratios(ls, h);
    double lme = 0.0;
    lp.constraint_matrix.col(j) = log_softmax_n(lam, lme).array().exp() * inv_J;
    double weight = 1.0;  // f_nu / f_nu_star
    if (options.measure == BaselineMeasure::NuDagger) weight = std::exp(-lme);
    lp.objective(j) = psi(s, cov, options.kind) * weight * inv_J;
  });
  return lp;
}

namespace {

/// Solves the LP on a leading quarter of the draws first (recursively) and
/// starts the full problem from those multipliers. The draws are i.i.d., so a
/// prefix is a smaller sample of the same problem; rescaling by J / J' keeps
/// its rows averages.
LpSolution solve_coarse_to_fine(const LpProblem& lp) {
  constexpr Eigen::Index kDirect = 8000;
  const Eigen::Index J = lp.cols(), n = lp.rows();
  LpOptions opt;
  if (J > kDirect && J / 4 >= 50 * n) {
    const Eigen::Index sub = J / 4;
    const double scale = double(J) / double(sub);
    LpProblem coarse;
    coarse.objective = lp.objective.head(sub) * scale;
    coarse.constraint_matrix = lp.constraint_matrix.leftCols(sub) * scale;
    coarse.rhs = lp.rhs;
    try {
      opt.start_duals = solve_coarse_to_fine(coarse).k;
    } catch (const NumericalError&) {
      // A prefix can be infeasible where the full sample is not; start cold.
    }
  }
  return solve_boxed_lp(lp, opt);
}

}  // namespace

CalibrationResult calibrate(const Grid& grid, const Cov2& cov, const Statistic& psi,
                            const CalibrationOptions& options) {
  grid.validate();
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw std::invalid_argument("calibrate: alpha must lie in (0, 1)");
  if (options.J < 100 * grid.size())
    throw std::invalid_argument("calibrate: need J >= 100 n draws");

  const auto draws = sample_mixture(grid, cov, options.J, options.seed, options.kind,
                                    options.threads);
  AssembleOptions ao;
  ao.alpha = options.alpha;
  ao.beta0 = options.beta0;
  ao.measure = options.measure;
  ao.kind = options.kind;
  ao.threads = options.threads;
  const LpProblem lp = assemble_lp(draws, grid, cov, psi, ao);

  CalibrationResult out;
  out.lp = solve_coarse_to_fine(lp);
  out.model.grid = grid;
  out.model.k = out.lp.k;
  out.model.measure = options.measure;
  out.model.alpha = options.alpha;
  out.model.beta0 = options.beta0;
  out.model.cov = cov;
  out.model.cov_mode = CovMode::Known;
  out.model.kind = options.kind;
  out.model.flattening.flat_value = normal_quantile(1.0 - options.alpha);

  // Deterministic rule psi > kappa on the calibration draws. With the 1/J
  // scaling, d_j - (A'k)_j = (psi_j - kappa_j) w_j / J.
  const Eigen::VectorXd reduced = lp.objective - lp.constraint_matrix.transpose() * out.lp.k;
  const Eigen::VectorXd reject = (reduced.array() > 0.0).cast<double>();
  out.in_sample_rejection = lp.constraint_matrix * reject;
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

double evaluate_cvf(const CvfModel& model, const LocalStats<double>& ls) {
  const Flattening& fl = model.flattening;
  if (fl.enabled()) {
    const bool ratio = fl.scheme == FlatteningScheme::Ratio || fl.scheme == FlatteningScheme::Both;
    const bool info =
        fl.scheme == FlatteningScheme::Information || fl.scheme == FlatteningScheme::Both;
    if (ratio && std::abs(ls.r_gamma / ls.k_gammagamma) > fl.ratio_threshold) return fl.flat_value;
    if (info && (ls.k_gammagamma < fl.k_low || ls.k_gammagamma > fl.k_high)) return fl.flat_value;
  }
  const Eigen::VectorXd lam = grid_log_ratios(ls, model.grid.local_offsets());
  const double m = lam.maxCoeff();
  const Eigen::VectorXd w = (lam.array() - m).exp();
  if (model.measure == BaselineMeasure::NuDagger) {
    const double inner = model.k.dot(w);
    return inner == 0.0 ? 0.0 : inner * std::exp(m);
  }
  return double(lam.size()) * model.k.dot(w) / w.sum();
}

double evaluate_cvf(const CvfModel& model, const Sample<double>& s, const Cov2& cov) {
  return evaluate_cvf(model, local_stats(s, cov, model.grid.center, model.beta0, model.kind));
}

TestDecision evaluate_test(const CvfModel& model, const Sample<double>& s, const Cov2& known_cov,
                           const Statistic& psi) {
  const Cov2 cov = statistic_cov(model, s, known_cov);
  TestDecision d;
  d.psi = psi(s, cov, model.kind);
  d.kappa = evaluate_cvf(model, s, cov);
  d.reject = d.psi > d.kappa;
  return d;
}

RejectionEstimate rejection_rate(const CvfModel& model, const ModelParams& params,
                                 const Statistic& psi, const RejectionOptions& options) {
  std::vector<unsigned char> hit(options.J, 0);
  parallel_for(options.J, options.threads, [&](std::size_t r) {
    Rng rng(derive_seed(options.seed, Stream::CheckGrid, r));
    const Sample<double> s = simulate(params, model.grid.T, rng);
    hit[r] = evaluate_test(model, s, params.cov, psi).reject ? 1 : 0;
  });
  std::size_t count = 0;
  for (auto h : hit) count += h;
  return {double(count) / double(options.J), options.J};
}

RejectionEstimate null_rejection(const CvfModel& model, double gamma, const Cov2& cov,
                                 const Statistic& psi, const RejectionOptions& options) {
  ModelParams p;
  p.beta = 0.0;
  p.gamma = gamma;
  p.kind = model.kind;
  p.cov = cov;
  return rejection_rate(model, p, psi, options);
}

std::vector<RejectionEstimate> rejection_profile(const CvfModel& model,
                                                 const std::vector<double>& gammas,
                                                 const Cov2& cov, const Statistic& psi,
                                                 const RejectionOptions& options) {
  const std::size_t P = gammas.size();
  std::vector<unsigned char> hit(options.J * P, 0);
  parallel_for(options.J, options.threads, [&](std::size_t r) {
    Rng rng(derive_seed(options.seed, Stream::CheckGrid, r));
    Eigen::VectorXd ey, ex;
    draw_innovations(cov, model.grid.T, rng, ey, ex);
    ModelParams p;
    p.kind = model.kind;
    p.cov = cov;
    for (std::size_t i = 0; i < P; ++i) {
      p.gamma = gammas[i];
      const Sample<double> s = build_sample(p, ey, ex);
      hit[r * P + i] = evaluate_test(model, s, cov, psi).reject ? 1 : 0;
    }
  });
  std::vector<RejectionEstimate> out(P);
  for (std::size_t i = 0; i < P; ++i) {
    std::size_t count = 0;
    for (std::size_t r = 0; r < options.J; ++r) count += hit[r * P + i];
    out[i] = {double(count) / double(options.J), options.J};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Refinement

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * double(i) / double(count - 1);
  return out;
}

std::size_t RefineResult::added_points() const {
  std::size_t added = 0;
  for (const auto& it : audit) added += it.added_offset.has_value() ? 1 : 0;
  return added;
}

RefineResult refine(const RefineConfig& config, const Statistic& psi) {
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("refine: epsilon must be positive");
  RefineResult result;
  result.check_offsets =
      config.check_offsets.empty() ? linspace(-50.0, 20.0, 100) : config.check_offsets;

  Grid grid;
  grid.center = config.center;
  grid.mapping = config.mapping;
  grid.T = config.T;
  grid.offsets = config.initial_offsets;
  std::sort(grid.offsets.begin(), grid.offsets.end());

  std::vector<double> check_gammas;
  for (double c : result.check_offsets) check_gammas.push_back(grid.gamma_at(c));

  RejectionOptions ro;
  ro.J = config.J_check;
  ro.seed = derive_seed(config.seed, Stream::CheckGrid, 0);
  ro.threads = config.threads;

  for (std::size_t iter = 0;; ++iter) {
    CalibrationOptions co;
    co.alpha = config.alpha;
    co.beta0 = config.beta0;
    co.J = config.J_calibration * grid.size();
    co.seed = derive_seed(config.seed, Stream::Calibration, iter);
    co.measure = config.measure;
    co.kind = config.kind;
    co.threads = config.threads;
    result.model = calibrate(grid, config.cov, psi, co).model;

    const auto profile = rejection_profile(result.model, check_gammas, config.cov, psi, ro);
    RefineIteration step;
    step.offsets = grid.offsets;
    step.k = result.model.k;
    double worst = -1.0;
    std::size_t worst_at = 0;
    const Eigen::VectorXd grid_gammas = grid.gammas();
    for (std::size_t i = 0; i < profile.size(); ++i) {
      const double dev = std::abs(profile[i].p_hat - config.alpha);
      step.check_p_hat.push_back(profile[i].p_hat);
      step.max_discrepancy = std::max(step.max_discrepancy, dev);
      const bool on_grid =
          ((grid_gammas.array() - check_gammas[i]).abs() <= 1e-9).any();
      if (!on_grid && dev > worst) {
        worst = dev;
        worst_at = i;
      }
    }

    // Violations left only at grid points are Monte Carlo noise on constraints
    // the LP already enforces; adding the point again is impossible.
    if (step.max_discrepancy <= config.epsilon || worst <= config.epsilon) {
      result.audit.push_back(std::move(step));
      result.converged = true;
      return result;
    }
    if (iter >= config.max_iter) {
      result.audit.push_back(std::move(step));
      throw NoConvergence("refine: discrepancy above epsilon after max_iter additions",
                          std::move(result));
    }
    const double add = result.check_offsets[worst_at];
    step.added_offset = add;
    result.audit.push_back(std::move(step));
    grid.offsets.insert(std::upper_bound(grid.offsets.begin(), grid.offsets.end(), add), add);
  }
}

double mc_discrepancy_bound(std::size_t J, double alpha, double epsilon) {
  if (J < 1 || !(alpha > 0.0 && alpha < 1.0) || !(epsilon > 0.0))
    throw std::invalid_argument("mc_discrepancy_bound: need J >= 1, alpha in (0,1), epsilon > 0");
  const double nJ = double(J);
  const double mean = alpha * nJ;
  const double band = epsilon * nJ;
  const double la = std::log(alpha), lb = std::log1p(-alpha);
  const double lgJ = std::lgamma(nJ + 1.0);
  double total = 0.0;
  for (std::size_t k = 0; k <= J; ++k) {
    const double dev = std::abs(double(k) - mean);
    if (dev - band <= 1e-9 * std::max(1.0, band)) continue;
    const double kk = double(k);
    total += std::exp(lgJ - std::lgamma(kk + 1.0) - std::lgamma(nJ - kk + 1.0) + kk * la +
                      (nJ - kk) * lb);
  }
  return std::min(total, 1.0);
}

}  // namespace cvf
