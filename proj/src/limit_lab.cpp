#include "cvf/limit_lab.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "cvf/parallel.hpp"
#include "cvf/predictive_model.hpp"
#include "cvf/random.hpp"

namespace cvf {

const char* reading_name(LimitReading r) {
  return r == LimitReading::FiniteSample ? "finite_sample" : "displayed";
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Stationary: return "stationary";
    case Regime::Integrated: return "integrated";
    case Regime::Explosive: return "explosive";
  }
  return "?";
}

LimitDraw limit_functionals(const Eigen::VectorXd& dw_x, const Eigen::VectorXd& dw_y, double c,
                            double rho, LimitReading reading) {
  const Eigen::Index N = dw_x.size();
  if (N < 1 || dw_y.size() != N) throw std::invalid_argument("limit_functionals: bad increments");
  const double dt = 1.0 / double(N);
  const double k = rho / std::sqrt(1.0 - rho * rho);

  // Left endpoints W(i / N), i = 0..N-1.
  Eigen::VectorXd ou(N), bm(N);
  double w_ou = 0.0, w_bm = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    ou(i) = w_ou;
    bm(i) = w_bm;
    w_ou += c * w_ou * dt + dw_x(i);
    w_bm += dw_x(i);
  }
  const Eigen::VectorXd ou_dm = ou.array() - ou.mean();
  const double sq_dm = ou_dm.squaredNorm() * dt;
  const double sq_raw = ou.squaredNorm() * dt;

  LimitDraw d;
  d.c = c;
  d.N = std::size_t(N);
  d.r_beta = std::sqrt(2.0) * (ou_dm.dot(dw_y) - k * c * sq_dm);
  d.k_betabeta = 2.0 * sq_dm;
  d.k_betagamma = -2.0 * k * sq_dm;
  if (reading == LimitReading::FiniteSample) {
    d.r_gamma = std::sqrt(2.0) * (ou.dot(dw_x) + c * sq_raw) - k * d.r_beta;
    d.k_gammagamma = 2.0 * (k * k * sq_dm + sq_raw);
  } else {
    const Eigen::VectorXd bm_dm = bm.array() - bm.mean();
    d.r_gamma = std::sqrt(2.0) * (bm_dm.dot(dw_x) - k * d.r_beta);
    d.k_gammagamma = 2.0 * (rho / (1.0 - rho * rho) * sq_dm + sq_dm);
  }
  return d;
}

namespace {

void brownian_increments(std::size_t N, Rng& rng, Eigen::VectorXd& dw_x, Eigen::VectorXd& dw_y) {
  std::normal_distribution<double> z;
  const double sd = std::sqrt(1.0 / double(N));
  dw_x.resize(Eigen::Index(N));
  dw_y.resize(Eigen::Index(N));
  for (std::size_t i = 0; i < N; ++i) {
    dw_x(Eigen::Index(i)) = sd * z(rng);
    dw_y(Eigen::Index(i)) = sd * z(rng);
  }
}

}  // namespace

LimitDraw simulate_limit_draw(double c, double rho, std::size_t N, std::uint64_t seed,
                              LimitReading reading) {
  if (N < 1000) throw std::invalid_argument("simulate_limit_draw: need N >= 1000");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("simulate_limit_draw: |rho| < 1");
  Rng rng(seed);
  Eigen::VectorXd dw_x, dw_y;
  brownian_increments(N, rng, dw_x, dw_y);
  return limit_functionals(dw_x, dw_y, c, rho, reading);
}

std::vector<LimitDraw> simulate_limit_draws(double c, double rho, std::size_t N, std::size_t M,
                                            std::uint64_t seed, unsigned threads,
                                            LimitReading reading) {
  std::vector<LimitDraw> out(M);
  parallel_for(M, threads, [&](std::size_t m) {
    out[m] = simulate_limit_draw(c, rho, N, derive_seed(seed, Stream::Limit, m), reading);
  });
  return out;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  return d;
}

double ks_normal(std::vector<double> a, double variance) {
  if (a.empty()) throw std::invalid_argument("ks_normal: empty sample");
  std::sort(a.begin(), a.end());
  const boost::math::normal_distribution<double> law(0.0, std::sqrt(variance));
  const double n = double(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double F = boost::math::cdf(law, a[i]);
    d = std::max({d, double(i + 1) / n - F, F - double(i) / n});
  }
  return d;
}

std::vector<double> ConvergenceReport::ks_path(const std::string& coordinate,
                                               const std::string& reference) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.coordinate == coordinate && r.reference == reference) out.push_back(r.ks);
  return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double cov_of(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / double(a.size() - 1);
}

using Columns = std::vector<std::vector<double>>;  // [coordinate][draw]

const char* kCoordinates[] = {"r_beta", "r_gamma", "k_betabeta", "k_betagamma", "k_gammagamma"};

void store(Columns& cols, std::size_t m, double rb, double rg, double kbb, double kbg, double kgg) {
  cols[0][m] = rb;
  cols[1][m] = rg;
  cols[2][m] = kbb;
  cols[3][m] = kbg;
  cols[4][m] = kgg;
}

Columns make_columns(std::size_t count, std::size_t M) {
  return Columns(count, std::vector<double>(M));
}

DistanceRow describe(Eigen::Index T, const std::string& coord, const std::string& ref,
                     const std::vector<double>& finite, const std::vector<double>& r_beta) {
  DistanceRow row;
  row.T = T;
  row.coordinate = coord;
  row.reference = ref;
  row.finite_mean = mean_of(finite);
  row.finite_var = cov_of(finite, finite);
  row.finite_cov_r_beta = cov_of(finite, r_beta);
  return row;
}

ConvergenceReport integrated(const ConvergenceConfig& cfg) {
  Eigen::Index max_T = 0;
  for (auto T : cfg.T_ladder) max_T = std::max(max_T, T);
  const std::size_t N = cfg.N ? cfg.N : std::size_t(4 * max_T);
  for (auto T : cfg.T_ladder)
    if (N % std::size_t(T) != 0)
      throw std::invalid_argument("convergence_check: N must be a multiple of every T");

  const std::size_t L = cfg.T_ladder.size();
  const std::size_t M = cfg.M;
  std::vector<Columns> finite(L, make_columns(5, M));
  Columns lim_fs = make_columns(5, M), lim_disp = make_columns(5, M);
  const Cov2 cov = Cov2::from_rho(cfg.rho);

  parallel_for(M, cfg.threads, [&](std::size_t m) {
    Rng rng(derive_seed(cfg.seed, Stream::Limit, m));
    Eigen::VectorXd dw_x, dw_y;
    brownian_increments(N, rng, dw_x, dw_y);
    for (auto [cols, reading] : {std::pair{&lim_fs, LimitReading::FiniteSample},
                                 std::pair{&lim_disp, LimitReading::Displayed}}) {
      const LimitDraw d = limit_functionals(dw_x, dw_y, cfg.c, cfg.rho, reading);
      store(*cols, m, d.r_beta, d.r_gamma, d.k_betabeta, d.k_betagamma, d.k_gammagamma);
    }
    for (std::size_t l = 0; l < L; ++l) {
      const Eigen::Index T = cfg.T_ladder[l];
      const Eigen::Index block = Eigen::Index(N) / T;
      const double scale = std::sqrt(double(T));
      Eigen::VectorXd ex(T), ey(T);
      for (Eigen::Index t = 0; t < T; ++t) {
        const double ux = scale * dw_x.segment(t * block, block).sum();
        const double uy = scale * dw_y.segment(t * block, block).sum();
        ex(t) = ux;
        ey(t) = cfg.rho * ux + std::sqrt(1.0 - cfg.rho * cfg.rho) * uy;
      }
      ModelParams p;
      p.gamma = 1.0 + cfg.c / double(T);
      p.cov = cov;
      const auto ls = local_stats(build_sample(p, ey, ex), cov, 1.0, 0.0, Deterministic::Intercept);
      store(finite[l], m, ls.r_beta, ls.r_gamma, ls.k_betabeta, ls.k_betagamma, ls.k_gammagamma);
    }
  });

  ConvergenceReport rep;
  rep.regime = Regime::Integrated;
  for (std::size_t l = 0; l < L; ++l) {
    for (auto [ref, reading] : {std::pair{&lim_fs, LimitReading::FiniteSample},
                                std::pair{&lim_disp, LimitReading::Displayed}}) {
      for (std::size_t k = 0; k < 5; ++k) {
        DistanceRow row =
            describe(cfg.T_ladder[l], kCoordinates[k], reading_name(reading), finite[l][k],
                     finite[l][0]);
        row.ks = ks_two_sample(finite[l][k], (*ref)[k]);
        row.reference_mean = mean_of((*ref)[k]);
        row.reference_var = cov_of((*ref)[k], (*ref)[k]);
        rep.rows.push_back(row);
      }
    }
  }
  return rep;
}

ConvergenceReport stationary_or_explosive(const ConvergenceConfig& cfg) {
  const bool stationary = cfg.regime == Regime::Stationary;
  if (stationary && !(std::abs(cfg.gamma) < 1.0))
    throw std::invalid_argument("convergence_check: stationary regime needs |gamma| < 1");
  if (!stationary && !(cfg.gamma > 1.0))
    throw std::invalid_argument("convergence_check: explosive regime needs gamma > 1");
  const Cov2 cov = Cov2::from_rho(cfg.rho);
  const std::size_t M = cfg.M;

  ConvergenceReport rep;
  rep.regime = cfg.regime;
  for (const Eigen::Index T : cfg.T_ladder) {
    Columns cols = make_columns(stationary ? 5 : 1, M);
    parallel_for(M, cfg.threads, [&](std::size_t m) {
      ModelParams p;
      p.gamma = cfg.gamma;
      p.cov = cov;
      const Sample<double> s = simulate(p, T, derive_seed(cfg.seed, Stream::Finite, m));
      if (stationary) {
        const auto ls = local_stats(s, cov, cfg.gamma, 0.0, Deterministic::Intercept);
        store(cols, m, ls.r_beta, ls.r_gamma, ls.k_betabeta, ls.k_betagamma, ls.k_gammagamma);
      } else {
        cols[0][m] = t_statistic(s, cov.syy, 0.0, Deterministic::Intercept);
      }
    });
    if (stationary) {
      // K^S = [[1, -k], [-k, 1 / (1 - rho^2)]].
      const double k = cov.rho_ratio();
      const double var[2] = {1.0, 1.0 / (1.0 - cfg.rho * cfg.rho)};
      for (std::size_t i = 0; i < 2; ++i) {
        DistanceRow row = describe(T, kCoordinates[i], "normal", cols[i], cols[0]);
        row.ks = ks_normal(cols[i], var[i]);
        row.reference_var = var[i];
        rep.rows.push_back(row);
      }
      const double limits[3] = {1.0, -k, var[1]};
      for (std::size_t i = 2; i < 5; ++i) {
        DistanceRow row = describe(T, kCoordinates[i], "constant", cols[i], cols[0]);
        row.reference_mean = limits[i - 2];
        row.ks = std::abs(row.finite_mean - row.reference_mean);
        rep.rows.push_back(row);
      }
    } else {
      DistanceRow row = describe(T, "t_stat", "normal", cols[0], cols[0]);
      row.ks = ks_normal(cols[0], 1.0);
      row.reference_var = 1.0;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

}  // namespace

ConvergenceReport convergence_check(const ConvergenceConfig& config) {
  if (config.T_ladder.empty() || config.M < 2)
    throw std::invalid_argument("convergence_check: need a T ladder and M >= 2");
  if (!(std::abs(config.rho) < 1.0)) throw std::invalid_argument("convergence_check: |rho| < 1");
  for (auto T : config.T_ladder)
    if (T < 3) throw std::invalid_argument("convergence_check: T must be at least 3");
  return config.regime == Regime::Integrated ? integrated(config)
                                             : stationary_or_explosive(config);
}

}  // namespace cvf
