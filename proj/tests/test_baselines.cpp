#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cvf/baselines.hpp"
#include "cvf/cvf_engine.hpp"

using namespace cvf;

namespace {

Sample<double> draw(double gamma, double rho, Eigen::Index T, std::uint64_t seed) {
  ModelParams p;
  p.gamma = gamma;
  p.cov = Cov2::from_rho(rho);
  p.mu = 2.5;
  return simulate(p, T, seed);
}

BaselineConfig config(BaselineKind kind, double alpha = 0.10) {
  BaselineConfig c;
  c.kind = kind;
  c.alpha = alpha;
  c.B = 199;
  return c;
}

}  // namespace

TEST_CASE("names") {
  CHECK(std::string(baseline_name(BaselineKind::NormalQuantile)) == "normal_quantile");
  CHECK(std::string(baseline_name(BaselineKind::BootstrapNonparametric)) == "bootstrap_np");
  CHECK(std::string(baseline_name(BaselineKind::BootstrapParametric)) == "bootstrap_param");
  CHECK(std::string(baseline_name(BaselineKind::Subsampling)) == "subsampling");
}

TEST_CASE("normal quantile test thresholds") {
  CHECK(normal_quantile_test(1.29, 0.10));
  CHECK_FALSE(normal_quantile_test(1.28, 0.10));
  CHECK(normal_quantile_test(1.65, 0.05));
  CHECK_FALSE(normal_quantile_test(1.64, 0.05));
}

TEST_CASE("order statistic quantile") {
  const std::vector<double> v{5, 1, 4, 2, 3};
  CHECK(order_statistic_quantile(v, 0.9, 5) == 5);
  CHECK(order_statistic_quantile(v, 0.8, 5) == 4);
  CHECK(order_statistic_quantile(v, 0.2, 5) == 1);
  CHECK(order_statistic_quantile(v, 0.9, 10) == std::numeric_limits<double>::infinity());
}

TEST_CASE("configuration checks") {
  auto c = config(BaselineKind::Subsampling);
  CHECK(c.block_for(100) == 21);
  CHECK(c.block_for(1000) == 100);
  CHECK(c.block_for(50) == 13);
  c.block_size = 1;
  CHECK_THROWS_AS(c.validate(100), ConfigError);
  c.block_size = 101;
  CHECK_THROWS_AS(c.validate(100), ConfigError);
  c.block_size = 100;
  CHECK_NOTHROW(c.validate(100));
  c = config(BaselineKind::BootstrapNonparametric);
  c.B = 50;
  CHECK_THROWS_AS(c.validate(100), ConfigError);
  c.B = 199;
  c.alpha = 1.0;
  CHECK_THROWS_AS(c.validate(100), ConfigError);
}

TEST_CASE("subsampling: whole-sample block is degenerate") {
  auto c = config(BaselineKind::Subsampling);
  c.block_size = 100;
  const auto s = draw(1.0, -0.95, 100, 1);
  const auto d = subsampling_test(s, c);
  CHECK(d.degenerate);
  CHECK(d.replications == 1);
  CHECK(d.critical_value == d.psi);
  CHECK_FALSE(d.reject);
}

TEST_CASE("subsampling: block statistics equal a naive re-slice") {
  auto c = config(BaselineKind::Subsampling);
  c.block_size = 17;
  const auto s = draw(0.95, 0.95, 60, 2);
  const auto stats = subsample_statistics(s, c);
  REQUIRE(stats.size() == 44);
  for (Eigen::Index start = 0; start < 44; ++start) {
    Sample<double> blk;
    blk.y.resize(17);
    blk.x.resize(17);
    for (Eigen::Index t = 0; t < 17; ++t) {
      blk.y(t) = s.y(start + t);
      blk.x(t) = s.x(start + t) - (start ? s.x(start - 1) : 0.0);
    }
    const double syy = estimate_cov(blk, Deterministic::Intercept).syy;
    CHECK(stats[std::size_t(start)] ==
          doctest::Approx(t_statistic(blk, syy, 0.0, Deterministic::Intercept)).epsilon(1e-12));
  }
}

TEST_CASE("baselines are unchanged by the intercept") {
  const auto s = draw(0.98, -0.95, 100, 3);
  Sample<double> shifted = s;
  shifted.y.array() += 100.0;
  for (auto kind : {BaselineKind::NormalQuantile, BaselineKind::BootstrapNonparametric,
                    BaselineKind::BootstrapParametric, BaselineKind::Subsampling}) {
    const auto a = run_baseline(s, config(kind), 7);
    const auto b = run_baseline(shifted, config(kind), 7);
    CHECK(a.psi == doctest::Approx(b.psi).epsilon(1e-9));
    CHECK(a.critical_value == doctest::Approx(b.critical_value).epsilon(1e-7));
    CHECK(a.reject == b.reject);
  }
}

TEST_CASE("rejection regions nest across levels and runs are reproducible") {
  for (auto kind : {BaselineKind::NormalQuantile, BaselineKind::BootstrapNonparametric,
                    BaselineKind::BootstrapParametric, BaselineKind::Subsampling})
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto s = draw(1.0, -0.95, 80, 100 + seed);
      const auto loose = run_baseline(s, config(kind, 0.10), seed);
      const auto strict = run_baseline(s, config(kind, 0.05), seed);
      CHECK(strict.critical_value >= loose.critical_value);
      if (strict.reject) CHECK(loose.reject);
      const auto again = run_baseline(s, config(kind, 0.10), seed);
      CHECK(again.critical_value == loose.critical_value);
    }
}

TEST_CASE("known variance replaces the per-sample estimate") {
  auto c = config(BaselineKind::NormalQuantile);
  c.sigma_yy = 1.0;
  const auto s = draw(0.9, 0.5, 100, 4);
  CHECK(baseline_statistic(s, c) == t_statistic(s, 1.0, 0.0, Deterministic::Intercept));
  c.sigma_yy = 0.0;
  c.variance = TVariance::SyyX;
  CHECK(baseline_statistic(s, c) ==
        t_statistic(s, estimate_cov(s, Deterministic::Intercept).syy_x(), 0.0, Deterministic::Intercept));
}

TEST_CASE("bootstrap size is close to nominal in the stationary case") {
  const std::size_t reps = 600;
  for (auto kind : {BaselineKind::BootstrapNonparametric, BaselineKind::BootstrapParametric}) {
    std::size_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r)
      hits += run_baseline(draw(0.3, 0.0, 200, 5000 + r), config(kind), r).reject;
    const double p = double(hits) / double(reps);
    CHECK(std::abs(p - 0.10) <= 4 * std::sqrt(0.09 / double(reps)));
  }
}
