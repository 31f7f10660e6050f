// Experiment runner.
//
//   cvf_cli <calibrate|size|power|cvf-surface|compare|limits> [--config FILE] [flags]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "cvf/experiments.hpp"

namespace {

using namespace cvf;

/// "--a-b,--a_b" so that config files may spell keys either way.
std::string names(const std::string& key) {
  std::string alt = key;
  for (auto& ch : alt)
    if (ch == '-') ch = '_';
  return alt == key ? "--" + key : "--" + key + ",--" + alt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Similar t-test experiments: calibration, size, power, CVF surface, limits"};
  app.set_config("--config", "", "key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();

  ExperimentConfig cfg;
  std::uint64_t seed = 0;
  std::string cov_mode, measure = "nu_star", flattening = "none", power_scale = "local", t_var = "syy";
  std::vector<std::string> baselines;
  bool trend = false;

  app.add_option("--seed", seed, "master seed (required)")->required();
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option(names("model-dir"), cfg.model_dir, "load cvf_rho_<rho>.cvf models from here");
  app.add_option("--T", cfg.T, "sample size");
  app.add_option("--alpha", cfg.alpha, "nominal level");
  app.add_option("--rho", cfg.rho, "innovation correlations")->expected(1, -1);
  app.add_flag("--trend", trend, "project on intercept and linear trend");
  app.add_option(names("cov-mode"), cov_mode, "known or estimated")
      ->check(CLI::IsMember({"known", "estimated"}));
  app.add_option("--measure", measure, "nu_star or nu_dagger")
      ->check(CLI::IsMember({"nu_star", "nu_dagger"}));
  app.add_option("--flattening", flattening, "none, ratio, information or both")
      ->check(CLI::IsMember({"none", "ratio", "information", "both"}));
  app.add_option(names("t-variance"), t_var, "t-statistic variance: syy or syy_x")
      ->check(CLI::IsMember({"syy", "syy_x"}));
  app.add_option("--epsilon", cfg.epsilon, "refinement tolerance");
  app.add_option(names("J-calibration"), cfg.J_calibration, "calibration draws per grid point");
  app.add_option(names("J-check"), cfg.J_check, "check-grid draws per point");
  app.add_option(names("max-iter"), cfg.max_iter, "refinement iterations");
  app.add_option(names("c-min"), cfg.c_min, "lowest c of the sweep");
  app.add_option(names("c-max"), cfg.c_max, "highest c of the sweep");
  app.add_option(names("c-count"), cfg.c_count, "points in the sweep");
  app.add_option("--J", cfg.J, "Monte Carlo replications");
  app.add_option("--baselines", baselines, "baseline tests")
      ->expected(0, -1)
      ->check(CLI::IsMember({"normal_quantile", "bootstrap_np", "bootstrap_param", "subsampling"}));
  app.add_option(names("J-baseline"), cfg.J_baseline, "replications for baseline tests");
  app.add_option("--B", cfg.B, "bootstrap draws");
  app.add_option(names("block-size"), cfg.block_size, "subsampling block (0: floor(T^(2/3)))");
  app.add_option(names("power-c"), cfg.power_c, "c values of the power study")->expected(1, -1);
  app.add_option(names("power-scale"), power_scale, "unit of b: local or variance")
      ->check(CLI::IsMember({"local", "variance"}));
  app.add_option(names("b-min"), cfg.b_min, "lowest b");
  app.add_option(names("b-max"), cfg.b_max, "highest b");
  app.add_option("--overlay", cfg.overlays, "name=path power overlay CSV")->expected(0, -1);
  app.add_option(names("surface-gamma"), cfg.surface_gamma, "gammas for the surface")
      ->expected(1, -1);
  app.add_option(names("surface-draws"), cfg.surface_draws, "draws per surface gamma");
  app.add_option(names("integrated-T"), cfg.integrated_T, "T ladder at gamma = 1")->expected(1, -1);
  app.add_option(names("stationary-T"), cfg.stationary_T, "stationary T ladder")->expected(1, -1);
  app.add_option(names("explosive-T"), cfg.explosive_T, "explosive T ladder")->expected(1, -1);
  app.add_option(names("stationary-gamma"), cfg.stationary_gamma, "stationary gamma");
  app.add_option(names("explosive-gamma"), cfg.explosive_gamma, "explosive gamma");
  app.add_option(names("limit-M"), cfg.limit_M, "draws per convergence check");
  app.add_option(names("limit-draws"), cfg.limit_draws, "limit functional draws");
  app.add_option(names("limit-steps"), cfg.limit_steps, "Euler steps per limit draw");

  const std::pair<ExperimentKind, const char*> commands[] = {
      {ExperimentKind::Calibrate, "refine the CVF grid and save one model per rho"},
      {ExperimentKind::Size, "null rejection of the CVF test and the baselines over c"},
      {ExperimentKind::Power, "rejection over (c, b) with the feasible test"},
      {ExperimentKind::CvfSurface, "CVF values against the t-statistic, raw and transformed"},
      {ExperimentKind::Compare, "null rejection under each flattening scheme"},
      {ExperimentKind::Limits, "limit functionals and convergence checks"}};
  for (const auto& [k, about] : commands)
    app.add_subcommand(experiment_name(k), about)->callback([&cfg, k = k] { cfg.kind = k; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.seed = seed;
    cfg.det = trend ? Deterministic::Trend : Deterministic::Intercept;
    if (!cov_mode.empty()) cfg.cov_mode = cov_mode == "known" ? CovMode::Known : CovMode::Estimated;
    cfg.t_variance = t_var == "syy" ? TVariance::Syy : TVariance::SyyX;
    cfg.power_scale = power_scale == "local" ? PowerScale::Local : PowerScale::Variance;
    cfg.measure = measure == "nu_star" ? BaselineMeasure::NuStar : BaselineMeasure::NuDagger;
    const std::map<std::string, FlatteningScheme> schemes{
        {"none", FlatteningScheme::None},
        {"ratio", FlatteningScheme::Ratio},
        {"information", FlatteningScheme::Information},
        {"both", FlatteningScheme::Both}};
    cfg.flattening = schemes.at(flattening);
    if (app.count("--baselines")) {
      cfg.baselines.clear();
      for (const auto& b : baselines)
        for (auto k : {BaselineKind::NormalQuantile, BaselineKind::BootstrapNonparametric,
                       BaselineKind::BootstrapParametric, BaselineKind::Subsampling})
          if (b == baseline_name(k)) cfg.baselines.push_back(k);
    }
    for (const auto& path : run_experiment(cfg)) std::cout << path << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const DegenerateSample& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 4;
  } catch (const BadOverlay& e) {
    std::cerr << "i/o error: bad overlay: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
