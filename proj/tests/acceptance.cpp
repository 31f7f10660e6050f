// Acceptance gate: runs criteria 1-12 at their stated budgets and tolerances
// and prints one PASS/FAIL line per criterion. Exit status is nonzero if any
// criterion fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "cvf/baselines.hpp"
#include "cvf/cvf_engine.hpp"
#include "cvf/experiments.hpp"
#include "cvf/limit_lab.hpp"
#include "cvf/lp.hpp"
#include "cvf/predictive_model.hpp"
#include "oracles.hpp"

using namespace cvf;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr std::uint64_t kSeed = 20240917;
constexpr double kAlpha = 0.10;
constexpr Eigen::Index kT = 100;
constexpr std::size_t kMc = 10000;

constexpr double kC1Band = 0.025;
constexpr double kC2MaxRejection = 0.40;
constexpr double kC2UnitRoot = 0.02;
constexpr std::size_t kC3Low = 7, kC3High = 14;
constexpr double kC4Far = 0.85, kC4NearLow = 0.40, kC4NearHigh = 0.60, kC4Null = 0.02;
constexpr double kC5Low = 1.1, kC5High = 1.5;
constexpr std::size_t kC5Draws = 2000;
constexpr std::size_t kC6Reps = 2000;
constexpr std::size_t kC6B = 399;
constexpr double kC6Bootstrap = 0.05, kC6SubAtOne = 0.04, kC6SubNear = 0.03;
constexpr double kC7Rel = 1e-10, kC7Translation = 1e-12, kC7Asymptotic = 0.01;
constexpr int kC7Configs = 1000;
constexpr double kC8Tol = 1e-8;
constexpr int kC8Instances = 200;
constexpr double kC9Spread = 0.15;
// The spread of one calibration carries LP dual noise of the same size as the
// effect, so the criterion is judged on the mean over independent calibrations.
constexpr std::uint64_t kC9Replications = 8;
constexpr double kC10Mean = 0.01, kC10Var = 0.05;
constexpr std::size_t kC10LimitDraws = 100000, kC10Steps = 1000, kC10StationaryM = 10000;
// KS ladder: the reference path is 16 times finer than the largest T so its own
// discretization error stays well below every rung, and rho = -0.95 keeps the
// K_betagamma coordinate non-degenerate.
constexpr std::size_t kC10LadderM = 10000, kC10RefineFactor = 16;
constexpr double kC10Rho = -0.95;
constexpr double kC11Bound = 1e-4;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentConfig base_config() {
  ExperimentConfig cfg;
  cfg.seed = kSeed;
  cfg.T = kT;
  cfg.alpha = kAlpha;
  return cfg;
}

/// Refinement for one rho, shared by criteria 1, 3, 4 and 5.
const RefineResult& refined(double rho) {
  static std::map<double, RefineResult> cache;
  auto it = cache.find(rho);
  if (it == cache.end()) {
    const auto start = std::chrono::steady_clock::now();
    RefineResult r = refine(refine_config(base_config(), rho), t_statistic_fn());
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("  refine rho=%g: %zu grid points, %zu added, %.1f s\n", rho, r.model.grid.size(),
                r.added_points(), secs);
    it = cache.emplace(rho, std::move(r)).first;
  }
  return it->second;
}

std::vector<double> check_gammas(const Grid& grid) {
  std::vector<double> out;
  for (double c : linspace(-50.0, 20.0, 100)) out.push_back(grid.gamma_at(c));
  return out;
}

RejectionOptions fresh(std::uint64_t index) {
  RejectionOptions ro;
  ro.J = kMc;
  ro.seed = derive_seed(kSeed, Stream::Fresh, index);
  return ro;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o{true, ""};
  for (double rho : {0.95, -0.95}) {
    const auto& r = refined(rho);
    const auto profile = rejection_profile(r.model, check_gammas(r.model.grid), Cov2::from_rho(rho),
                                           t_statistic_fn(), fresh(1));
    double worst = 0.0;
    for (const auto& e : profile) worst = std::max(worst, std::abs(e.p_hat - kAlpha));
    o.pass = o.pass && r.converged && worst <= kC1Band;
    o.detail += "rho=" + fmt("%g", rho) + " max|p-0.10|=" + fmt("%.4f", worst) + " ";
  }
  return o;
}

Outcome criterion2() {
  Grid grid;
  grid.offsets = {-50.0, 20.0};
  grid.T = kT;
  CalibrationOptions co;
  co.J = kMc * grid.size();  // kMc draws per grid point, as in refine
  co.alpha = kAlpha;
  Outcome o;

  const Cov2 neg = Cov2::from_rho(-0.95);
  co.seed = derive_seed(kSeed, Stream::Calibration, 2);
  const auto m_neg = calibrate(grid, neg, t_statistic_fn(), co).model;
  double worst = 0.0;
  for (const auto& e : rejection_profile(m_neg, check_gammas(grid), neg, t_statistic_fn(), fresh(2)))
    worst = std::max(worst, e.p_hat);

  const Cov2 pos = Cov2::from_rho(0.95);
  co.seed = derive_seed(kSeed, Stream::Calibration, 3);
  const auto m_pos = calibrate(grid, pos, t_statistic_fn(), co).model;
  const double at_one = null_rejection(m_pos, 1.0, pos, t_statistic_fn(), fresh(3)).p_hat;

  o.pass = worst >= kC2MaxRejection && at_one <= kC2UnitRoot;
  o.detail = "rho=-0.95 max rejection=" + fmt("%.4f", worst) +
             " rho=0.95 rejection at gamma=1: " + fmt("%.4f", at_one);
  return o;
}

Outcome criterion3() {
  const auto& r = refined(0.95);
  const std::size_t added = r.added_points();
  return {added >= kC3Low && added <= kC3High,
          "rho=0.95 added " + std::to_string(added) + " points (rho=-0.95 added " +
              std::to_string(refined(-0.95).added_points()) + ")"};
}

Outcome criterion4() {
  CvfModel model = refined(0.95).model;
  model.cov_mode = CovMode::Estimated;
  const Cov2 cov = Cov2::from_rho(0.95);
  auto power = [&](double c, double b, std::uint64_t index) {
    ModelParams p;
    p.gamma = 1.0 + c / double(kT);
    p.beta = b * power_unit(base_config(), cov, p.gamma);
    p.cov = cov;
    RejectionOptions ro;
    ro.J = kMc;
    ro.seed = derive_seed(kSeed, Stream::Power, index);
    return rejection_rate(model, p, t_statistic_fn(), ro).p_hat;
  };
  const double far = power(-15.0, 10.0, 1);
  const double near = power(0.0, 10.0, 2);
  const double null_far = power(-15.0, 0.0, 3);
  const double null_near = power(0.0, 0.0, 4);
  const bool pass = far >= kC4Far && near >= kC4NearLow && near <= kC4NearHigh &&
                    std::abs(null_far - kAlpha) <= kC4Null && std::abs(null_near - kAlpha) <= kC4Null;
  return {pass, "c=-15,b=10: " + fmt("%.4f", far) + " c=0,b=10: " + fmt("%.4f", near) +
                    " b=0: " + fmt("%.4f", null_far) + " (c=-15) " + fmt("%.4f", null_near) +
                    " (c=0)"};
}

Outcome criterion5() {
  Outcome o{true, ""};
  for (double rho : {0.95, -0.95}) {
    const auto& model = refined(rho).model;
    const Cov2 cov = Cov2::from_rho(rho);
    for (double gamma : {0.2, 1.4}) {
      std::vector<double> kappa(kC5Draws);
      for (std::size_t d = 0; d < kC5Draws; ++d) {
        ModelParams p;
        p.gamma = gamma;
        p.cov = cov;
        kappa[d] = evaluate_cvf(model, simulate(p, kT, derive_seed(kSeed, Stream::Surface, d)), cov);
      }
      std::nth_element(kappa.begin(), kappa.begin() + kC5Draws / 2, kappa.end());
      const double median = kappa[kC5Draws / 2];
      o.pass = o.pass && median >= kC5Low && median <= kC5High;
      o.detail += "rho=" + fmt("%g", rho) + " gamma=" + fmt("%g", gamma) + " median=" +
                  fmt("%.4f", median) + " ";
    }
  }
  return o;
}

/// Null rejection of one baseline at gamma with known variance.
double baseline_rate(BaselineKind kind, double gamma, double rho, std::uint64_t stream) {
  BaselineConfig bc;
  bc.kind = kind;
  bc.B = kC6B;
  bc.alpha = kAlpha;
  bc.sigma_yy = 1.0;
  ModelParams p;
  p.gamma = gamma;
  p.cov = Cov2::from_rho(rho);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < kC6Reps; ++r) {
    const auto s = simulate(p, kT, derive_seed(kSeed, Stream::Baseline, r));
    hits += run_baseline(s, bc, derive_seed(kSeed + stream, Stream::Baseline, r)).reject;
  }
  return double(hits) / double(kC6Reps);
}

Outcome criterion6() {
  const double np = baseline_rate(BaselineKind::BootstrapNonparametric, 1.0, -0.95, 1);
  const double par = baseline_rate(BaselineKind::BootstrapParametric, 1.0, -0.95, 2);
  Outcome o;
  o.detail = "bootstrap_np=" + fmt("%.4f", np) + " bootstrap_param=" + fmt("%.4f", par);
  bool sub_ok = false;
  for (double rho : {-0.95, 0.95}) {
    const double at_one = baseline_rate(BaselineKind::Subsampling, 1.0, rho, 3);
    double worst = 0.0, worst_gamma = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double g = 0.90 + 0.01 * i;
      const double dev = std::abs(baseline_rate(BaselineKind::Subsampling, g, rho, 3) - kAlpha);
      if (dev > worst) {
        worst = dev;
        worst_gamma = g;
      }
    }
    const bool ok = std::abs(at_one - kAlpha) <= kC6SubAtOne && worst > kC6SubNear;
    if (rho == -0.95) sub_ok = ok;
    o.detail += " subsampling rho=" + fmt("%g", rho) + ": at 1 " + fmt("%.4f", at_one) +
                ", max dev " + fmt("%.4f", worst) + " at gamma=" + fmt("%.2f", worst_gamma) +
                (rho == -0.95 ? "" : " (reported only)");
  }
  o.pass = std::abs(np - kAlpha) > kC6Bootstrap && std::abs(par - kAlpha) > kC6Bootstrap && sub_ok;
  return o;
}

Outcome criterion7() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double centers[] = {0.5, 1.0, 1.2};
  const double rhos[] = {0.95, -0.95, 0.5, -0.5};
  double worst_lr = 0.0, worst_translation = 0.0;
  bool identity = true;
  for (int i = 0; i < kC7Configs; ++i) {
    const double center = centers[i % 3];
    const double rho = rhos[(i / 3) % 4];
    const auto kind = (i / 12) % 2 ? Deterministic::Trend : Deterministic::Intercept;
    const Cov2 cov = Cov2::from_rho(rho, 0.5 + (i % 7) * 0.25, 0.6 + (i % 5) * 0.3);
    ModelParams p;
    p.gamma = center;
    p.cov = cov;
    p.kind = kind;
    p.mu = u(rng);
    p.trend = kind == Deterministic::Trend ? 0.01 * u(rng) : 0.0;
    const auto s = simulate(p, kT, derive_seed(kSeed, Stream::Finite, std::uint64_t(i)));
    const auto ls = local_stats(s, cov, center, 0.0, kind);
    // The local parameters are read back from the rounded (beta, gamma) so
    // both sides describe the same alternative.
    const double beta = u(rng) * std::sqrt(cov.syy_x() / cov.sxx) * ls.g;
    const double gamma = center + u(rng) * ls.g;
    const double b = beta / (std::sqrt(cov.syy_x() / cov.sxx) * ls.g);
    const double c = (gamma - center) / ls.g;
    const double direct =
        oracle::log_density_ratio(s, cov, beta, gamma, center, kind == Deterministic::Trend);
    worst_lr = std::max(worst_lr, std::abs(std::expm1(log_lr(ls, b, c) - direct)));
    identity = identity && ls.k_betagamma == -cov.rho_ratio() * ls.k_betabeta;

    Sample<double> shifted = s;
    const double a0 = 10.0 * u(rng), a1 = u(rng);
    for (Eigen::Index t = 0; t < kT; ++t)
      shifted.y(t) += a0 + (kind == Deterministic::Trend ? a1 * double(t + 1) : 0.0);
    const auto lt = local_stats(shifted, cov, center, 0.0, kind);
    for (auto [x, y] : {std::pair{ls.r_beta, lt.r_beta}, std::pair{ls.r_gamma, lt.r_gamma},
                        std::pair{ls.k_gammagamma, lt.k_gammagamma}})
      worst_translation = std::max(worst_translation, std::abs(x - y) / std::max(1.0, std::abs(x)));
  }
  const double T4 = 1e4;
  const double ga = scaling_g(0.5, 10000) / (std::sqrt(0.75) / std::sqrt(T4)) - 1.0;
  const double gb = scaling_g(1.0, 10000) / (std::sqrt(2.0) / T4) - 1.0;
  const double gc = std::expm1(std::log(scaling_g(1.05, 10000)) -
                               (std::log(1 - std::pow(1.05, -2)) - (T4 - 2) * std::log(1.05)));
  const double worst_g = std::max({std::abs(ga), std::abs(gb), std::abs(gc)});
  const bool pass = worst_lr <= kC7Rel && identity && worst_translation <= kC7Translation &&
                    worst_g <= kC7Asymptotic;
  return {pass, "max|exp(lr)/direct-1|=" + fmt("%.2e", worst_lr) + " K_bg identity " +
                    (identity ? "exact" : "broken") + " translation=" + fmt("%.1e", worst_translation) +
                    " g_T rel err a/b/c=" + fmt("%.4f", ga) + "/" + fmt("%.4f", gb) + "/" +
                    fmt("%.4f", gc)};
}

Outcome criterion8() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  double worst_obj = 0.0, worst_kkt = 0.0;
  for (int trial = 0; trial < kC8Instances; ++trial) {
    const int n = 1 + trial % 4;
    const int J = n + 1 + int(rng() % std::uint64_t(12 - n));
    LpProblem p;
    p.constraint_matrix.resize(n, J);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < J; ++j) p.constraint_matrix(i, j) = 2.0 * u(rng);
    p.objective.resize(J);
    for (int j = 0; j < J; ++j) p.objective(j) = z(rng);
    Eigen::VectorXd m0(J);
    for (int j = 0; j < J; ++j) m0(j) = u(rng);
    p.rhs = p.constraint_matrix * m0;

    const auto s = solve_boxed_lp(p);
    const auto best = oracle::enumerate_vertices(p);
    worst_obj = std::max(worst_obj, std::abs(s.objective_value - best.objective) /
                                        std::max(1.0, std::abs(best.objective)));
    const Eigen::VectorXd red = p.objective - p.constraint_matrix.transpose() * s.k;
    double kkt = (p.constraint_matrix * s.m - p.rhs).cwiseAbs().maxCoeff();
    kkt = std::max({kkt, -s.m.minCoeff(), s.m.maxCoeff() - 1.0});
    for (Eigen::Index j = 0; j < J; ++j) {
      // complementary slackness: positive reduced cost at the upper bound,
      // negative at the lower bound
      kkt = std::max(kkt, std::max(red(j), 0.0) * (1.0 - s.m(j)));
      kkt = std::max(kkt, std::max(-red(j), 0.0) * s.m(j));
    }
    const double gap =
        std::abs(p.objective.dot(s.m) - (p.rhs.dot(s.k) + red.cwiseMax(0.0).sum()));
    worst_kkt = std::max(kkt, std::max(worst_kkt, gap));
  }

  // n = 1: the dual is the empirical (1 - alpha) quantile, bit for bit.
  bool quantile_exact = true;
  for (std::size_t J : {1005ul, 2000ul, 777ul}) {
    std::vector<double> psi(J);
    for (auto& v : psi) v = z(rng);
    LpProblem p;
    p.objective = Eigen::Map<Eigen::VectorXd>(psi.data(), Eigen::Index(J)) / double(J);
    p.constraint_matrix = Eigen::RowVectorXd::Constant(Eigen::Index(J), 1.0 / double(J));
    p.rhs = Eigen::VectorXd::Constant(1, kAlpha);
    const auto s = solve_boxed_lp(p);
    std::sort(psi.begin(), psi.end());
    const double target = kAlpha * double(J);
    if (std::abs(target - std::round(target)) < 1e-9) continue;  // dual not unique
    const auto rank = std::size_t(std::ceil((1.0 - kAlpha) * double(J)));
    quantile_exact = quantile_exact && s.k(0) == psi[rank - 1];
  }
  return {worst_obj <= kC8Tol && worst_kkt <= kC8Tol && quantile_exact,
          "objective vs enumeration=" + fmt("%.1e", worst_obj) + " KKT/CS/gap=" +
              fmt("%.1e", worst_kkt) + " n=1 quantile " + (quantile_exact ? "exact" : "off")};
}

Outcome criterion9() {
  const double target = normal_quantile(1.0 - kAlpha);
  std::vector<double> spread;
  std::string detail;
  for (Eigen::Index T : {200, 800, 3200}) {
    Grid grid;
    grid.center = 0.5;
    grid.mapping = GridMapping::Absolute;
    grid.offsets = {-0.05, 0.0, 0.05};
    grid.T = T;
    std::vector<double> reps;
    for (std::uint64_t r = 0; r < kC9Replications; ++r) {
      CalibrationOptions co;
      co.J = kMc * grid.size();
      co.alpha = kAlpha;
      co.seed = derive_seed(kSeed, Stream::Calibration, std::uint64_t(T) * kC9Replications + r);
      const auto model = calibrate(grid, Cov2{}, t_statistic_fn(), co).model;
      const double n = double(grid.size());
      reps.push_back(((n * model.k).array() - target).abs().maxCoeff());
    }
    const double mean = std::accumulate(reps.begin(), reps.end(), 0.0) / double(reps.size());
    double ss = 0.0;
    for (double v : reps) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / double(reps.size() - 1) / double(reps.size()));
    spread.push_back(mean);
    detail += "T=" + std::to_string(T) + " mean spread=" + fmt("%.4f", mean) + " (se " +
              fmt("%.4f", se) + ") ";
  }
  const bool decreasing = spread[0] > spread[1] && spread[1] > spread[2];
  return {decreasing && spread[2] <= kC9Spread, detail};
}

Outcome criterion10() {
  const auto draws = simulate_limit_draws(0.0, 0.0, kC10Steps, kC10LimitDraws, kSeed);
  double kbb = 0.0;
  for (const auto& d : draws) kbb += d.k_betabeta;
  kbb /= double(draws.size());

  ConvergenceConfig st;
  st.regime = Regime::Stationary;
  st.gamma = 0.5;
  st.T_ladder = {4000};
  st.M = kC10StationaryM;
  st.seed = kSeed;
  double var_rb = 0.0;
  for (const auto& row : convergence_check(st).rows)
    if (row.coordinate == "r_beta") var_rb = row.finite_var;

  ConvergenceConfig in;
  in.regime = Regime::Integrated;
  in.T_ladder = {100, 400, 1600};
  in.N = kC10RefineFactor * 1600;
  in.M = kC10LadderM;
  in.rho = kC10Rho;
  in.seed = kSeed;
  in.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto rep = convergence_check(in);
  bool decreasing = true;
  std::string paths;
  for (const char* coord : {"r_beta", "r_gamma", "k_betabeta", "k_betagamma", "k_gammagamma"}) {
    const auto ks = rep.ks_path(coord, "finite_sample");
    decreasing = decreasing && ks[0] > ks[1] && ks[1] > ks[2];
    paths += std::string(coord) + "=" + fmt("%.4f", ks[0]) + ">" + fmt("%.4f", ks[1]) + ">" +
             fmt("%.4f", ks[2]) + " ";
  }
  const bool pass =
      std::abs(kbb - 1.0 / 3.0) <= kC10Mean && std::abs(var_rb - 1.0) <= kC10Var && decreasing;
  return {pass, "E[K_bb(0)]=" + fmt("%.4f", kbb) + " Var(R_b) at T=4000: " + fmt("%.4f", var_rb) +
                    " KS " + paths};
}

Outcome criterion11() {
  const double bound = mc_discrepancy_bound(10000, 0.10, 0.015);
  boost::math::binomial_distribution<double> bin(10000.0, 0.10);
  // |k - 1000| > 150: k <= 849 or k >= 1151
  const double exact = cdf(bin, 849.0) + cdf(complement(bin, 1150.0));
  const bool agree = std::abs(bound - exact) <= 1e-9 * exact;
  return {bound <= kC11Bound && agree,
          "bound=" + fmt("%.3e", bound) + " binomial oracle=" + fmt("%.3e", exact)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion12() {
  const fs::path root = fs::temp_directory_path() / "cvf_acceptance_determinism";
  fs::remove_all(root);
  const std::string flags =
      " --seed 77 --T 60 --epsilon 0.05 --J-calibration 2000 --J-check 500 --max-iter 3"
      " --c-count 5 --J 300 --J-baseline 100 --B 99 --power-c -15 0 --b-min 0 --b-max 3"
      " --surface-gamma 0.5 1.0 1.2 --surface-draws 50 --integrated-T 30 60"
      " --stationary-T 30 60 --explosive-T 30 60 --limit-M 100 --limit-draws 200";
  bool all_equal = true;
  std::size_t files = 0;
  std::string failures;
  for (const char* cmd : {"calibrate", "size", "power", "cvf-surface", "compare", "limits"}) {
    std::vector<fs::path> dirs;
    for (const char* run : {"a_t1", "b_t1", "c_t4"}) {
      const fs::path dir = root / cmd / run;
      const std::string threads = run[2] == '1' ? "1" : "4";
      const std::string line = std::string(CVF_CLI_PATH) + flags + " --threads " + threads + " " +
                               cmd + " --out " + dir.string() + " >/dev/null 2>&1";
      // Calibration may stop without converging at this budget (exit 3) but
      // still writes its audit; outputs must match either way.
      const int status = std::system(line.c_str());
      if (!WIFEXITED(status) || (WEXITSTATUS(status) != 0 && WEXITSTATUS(status) != 3)) {
        all_equal = false;
        failures += std::string(cmd) + " exit " + std::to_string(WEXITSTATUS(status)) + " ";
      }
      dirs.push_back(dir);
    }
    if (!fs::exists(dirs[0])) {
      all_equal = false;
      continue;
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const std::string name = entry.path().filename().string();
      const std::string ref = slurp(entry.path());
      ++files;
      for (std::size_t k = 1; k < dirs.size(); ++k)
        if (!fs::exists(dirs[k] / name) || slurp(dirs[k] / name) != ref) {
          all_equal = false;
          failures += std::string(cmd) + "/" + name + " ";
        }
    }
  }
  return {all_equal && files > 0,
          std::to_string(files) + " files compared across threads 1, 1, 4" +
              (failures.empty() ? "" : "; mismatches: " + failures)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"similarity after refinement", criterion1},
      {"endpoint-only grid pathology", criterion2},
      {"refinement effort", criterion3},
      {"feasible test power", criterion4},
      {"CVF magnitude off the unit root", criterion5},
      {"baseline distortion", criterion6},
      {"exact identities", criterion7},
      {"LP correctness", criterion8},
      {"stationary multipliers", criterion9},
      {"limit laws", criterion10},
      {"Monte Carlo discrepancy bound", criterion11},
      {"CLI determinism", criterion12},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s: %s [%.1f s] %s\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
