#include "cvf/experiments.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvf/limit_lab.hpp"
#include "cvf/parallel.hpp"

namespace cvf {

namespace fs = std::filesystem;

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Calibrate: return "calibrate";
    case ExperimentKind::Size: return "size";
    case ExperimentKind::Power: return "power";
    case ExperimentKind::CvfSurface: return "cvf-surface";
    case ExperimentKind::Compare: return "compare";
    case ExperimentKind::Limits: return "limits";
  }
  return "?";
}

ExperimentKind parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::Calibrate, ExperimentKind::Size, ExperimentKind::Power,
                 ExperimentKind::CvfSurface, ExperimentKind::Compare, ExperimentKind::Limits})
    if (name == experiment_name(k)) return k;
  throw ConfigError("unknown experiment '" + name + "'");
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t rho_key(double rho) { return std::bit_cast<std::uint64_t>(rho + 0.0); }

template <typename T, typename F>
std::string join(const std::vector<T>& v, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + f(v[i]);
  return out;
}

const char* scheme_key(FlatteningScheme s) {
  switch (s) {
    case FlatteningScheme::None: return "none";
    case FlatteningScheme::Ratio: return "ratio";
    case FlatteningScheme::Information: return "information";
    case FlatteningScheme::Both: return "both";
  }
  return "?";
}

class CsvFile {
 public:
  CsvFile(const std::string& path, const ExperimentConfig& cfg, const std::string& header)
      : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open " + path + " for writing");
    char buf[128];
    std::snprintf(buf, sizeof buf, "# experiment=%s config_hash=%016llx seed=%llu\n",
                  experiment_name(cfg.kind), static_cast<unsigned long long>(cfg.hash()),
                  static_cast<unsigned long long>(*cfg.seed));
    out_ << buf << header << '\n';
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
    out_ << '\n';
  }

  const std::string& close() {
    out_.close();
    if (!out_) throw IoError("write failed: " + path_);
    return path_;
  }

 private:
  std::string path_;
  std::ofstream out_;
};

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

double gamma_of(const ExperimentConfig& cfg, double c) { return 1.0 + c / double(cfg.T); }

std::string se(double p, std::size_t J) { return num(std::sqrt(p * (1.0 - p) / double(J))); }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!seed) fail("seed is required");
  if (T < 10 || T > 100000) fail("T must lie in [10, 100000]");
  if (!(alpha > 0.0 && alpha < 0.5)) fail("alpha must lie in (0, 0.5)");
  if (rho.empty()) fail("rho list is empty");
  for (double r : rho)
    if (!(std::abs(r) < 1.0)) fail("every rho must satisfy |rho| < 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) fail("epsilon must lie in (0, 0.5)");
  if (J_calibration < 200 || J_check < 100) fail("J_calibration >= 200 and J_check >= 100");
  if (!(c_min < c_max) || c_count < 2) fail("need c_min < c_max and c_count >= 2");
  if (J < 100 || J_baseline < 100) fail("J and J_baseline must be at least 100");
  if (B < 99) fail("B must be at least 99");
  if (block_size == 1 || block_size > std::size_t(T)) fail("block_size must lie in [2, T]");
  if (b_min > b_max) fail("b_min must not exceed b_max");
  if (power_c.empty()) fail("power_c list is empty");
  if (surface_gamma.empty() || surface_draws < 1) fail("surface needs gammas and draws");
  for (double g : surface_gamma)
    if (std::pow(std::abs(g), double(T)) > 1e100) fail("surface gamma explodes beyond range");
  for (const auto* ladder : {&integrated_T, &stationary_T, &explosive_T}) {
    if (ladder->empty()) fail("limit T ladders must be non-empty");
    for (auto t : *ladder)
      if (t < 10) fail("limit T values must be at least 10");
  }
  if (!(std::abs(stationary_gamma) < 1.0)) fail("stationary_gamma must satisfy |gamma| < 1");
  if (!(explosive_gamma > 1.0)) fail("explosive_gamma must exceed 1");
  for (auto t : explosive_T)
    if (double(t) * std::log(explosive_gamma) > 300.0) fail("explosive_T too long for doubles");
  if (limit_M < 10 || limit_draws < 10) fail("limit_M and limit_draws must be at least 10");
  if (limit_steps < 1000) fail("limit_steps must be at least 1000");
  for (const auto& o : overlays)
    if (o.find('=') == std::string::npos || o.front() == '=')
      fail("overlay must be name=path: " + o);
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream s;
  s << "T=" << T << '\n'
    << "alpha=" << exact(alpha) << '\n'
    << "rho=" << join(rho, exact) << '\n'
    << "deterministic=" << (det == Deterministic::Intercept ? "intercept" : "trend") << '\n'
    << "cov_mode="
    << (cov_mode ? (*cov_mode == CovMode::Known ? "known" : "estimated") : "default") << '\n'
    << "measure=" << (measure == BaselineMeasure::NuStar ? "nu_star" : "nu_dagger") << '\n'
    << "flattening=" << scheme_key(flattening) << '\n'
    << "t_variance=" << (t_variance == TVariance::Syy ? "syy" : "syy_x") << '\n'
    << "epsilon=" << exact(epsilon) << '\n'
    << "J_calibration=" << J_calibration << '\n'
    << "J_check=" << J_check << '\n'
    << "max_iter=" << max_iter << '\n'
    << "c_min=" << exact(c_min) << '\n'
    << "c_max=" << exact(c_max) << '\n'
    << "c_count=" << c_count << '\n'
    << "J=" << J << '\n'
    << "baselines=" << join(baselines, [](BaselineKind k) { return std::string(baseline_name(k)); })
    << '\n'
    << "J_baseline=" << J_baseline << '\n'
    << "B=" << B << '\n'
    << "block_size=" << block_size << '\n'
    << "power_c=" << join(power_c, exact) << '\n'
    << "power_scale=" << (power_scale == PowerScale::Local ? "local" : "variance") << '\n'
    << "b_min=" << b_min << '\n'
    << "b_max=" << b_max << '\n'
    << "overlays=" << join(overlays, [](const std::string& o) { return o; }) << '\n'
    << "surface_gamma=" << join(surface_gamma, exact) << '\n'
    << "surface_draws=" << surface_draws << '\n'
    << "integrated_T=" << join(integrated_T, [](Eigen::Index t) { return std::to_string(t); })
    << '\n'
    << "stationary_T=" << join(stationary_T, [](Eigen::Index t) { return std::to_string(t); })
    << '\n'
    << "explosive_T=" << join(explosive_T, [](Eigen::Index t) { return std::to_string(t); })
    << '\n'
    << "stationary_gamma=" << exact(stationary_gamma) << '\n'
    << "explosive_gamma=" << exact(explosive_gamma) << '\n'
    << "limit_M=" << limit_M << '\n'
    << "limit_draws=" << limit_draws << '\n'
    << "limit_steps=" << limit_steps << '\n'
    << "model_dir=" << (model_dir.empty() ? "" : "set") << '\n';
  return s.str();
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double power_unit(const ExperimentConfig& cfg, const Cov2& cov, double gamma) {
  const double g = scaling_g(gamma, cfg.T);
  return cfg.power_scale == PowerScale::Local ? std::sqrt(cov.syy_x() / cov.sxx) * g
                                              : cov.syy_x() * g;
}

CovMode ExperimentConfig::cov_mode_for(ExperimentKind k) const {
  if (cov_mode) return *cov_mode;
  return k == ExperimentKind::Power ? CovMode::Estimated : CovMode::Known;
}

std::vector<double> c_sweep(const ExperimentConfig& cfg) {
  return linspace(cfg.c_min, cfg.c_max, cfg.c_count);
}

std::string model_file_name(double rho, TVariance variance) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "cvf_rho_%g%s.cvf", rho,
                variance == TVariance::Syy ? "" : "_syy_x");
  return buf;
}

RefineConfig refine_config(const ExperimentConfig& cfg, double rho) {
  RefineConfig rc;
  rc.center = 1.0;
  rc.mapping = GridMapping::PerT;
  rc.T = cfg.T;
  rc.alpha = cfg.alpha;
  rc.epsilon = cfg.epsilon;
  rc.max_iter = cfg.max_iter;
  rc.J_calibration = cfg.J_calibration;
  rc.J_check = cfg.J_check;
  rc.cov = Cov2::from_rho(rho);
  rc.kind = cfg.det;
  rc.measure = cfg.measure;
  rc.seed = derive_seed(*cfg.seed, Stream::Calibration, rho_key(rho));
  rc.threads = cfg.threads;
  return rc;
}

CvfModel obtain_model(const ExperimentConfig& cfg, double rho) {
  CvfModel model;
  if (!cfg.model_dir.empty()) {
    model = load_model((fs::path(cfg.model_dir) / model_file_name(rho, cfg.t_variance)).string());
    if (model.grid.T != cfg.T || model.alpha != cfg.alpha || model.kind != cfg.det ||
        std::abs(model.cov.rho() - rho) > 1e-12)
      throw ConfigError("model in " + cfg.model_dir + " does not match T, alpha, rho or kind");
  } else {
    model = refine(refine_config(cfg, rho), t_statistic_fn(0.0, cfg.t_variance)).model;
  }
  model.flattening.scheme = cfg.flattening;
  return model;
}

// ---------------------------------------------------------------------------
// Runners

std::vector<std::string> run_calibrate(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::string> written;
  CsvFile audit(out_path(cfg, "calibrate.csv"), cfg,
                "rho,iteration,n_points,max_discrepancy,added_c,converged");
  CsvFile points(out_path(cfg, "calibrate_points.csv"), cfg, "rho,iteration,c,gamma,k");
  CsvFile check(out_path(cfg, "calibrate_check.csv"), cfg, "rho,iteration,c,gamma,p_hat");

  auto emit = [&](double rho, const RefineResult& r) {
    for (std::size_t it = 0; it < r.audit.size(); ++it) {
      const auto& step = r.audit[it];
      const bool last = it + 1 == r.audit.size();
      audit.row({num(rho), std::to_string(it), std::to_string(step.offsets.size()),
                 num(step.max_discrepancy), step.added_offset ? num(*step.added_offset) : "",
                 last && r.converged ? "1" : "0"});
      for (std::size_t i = 0; i < step.offsets.size(); ++i)
        points.row({num(rho), std::to_string(it), num(step.offsets[i]),
                    num(gamma_of(cfg, step.offsets[i])), num(step.k(Eigen::Index(i)))});
      for (std::size_t i = 0; i < r.check_offsets.size(); ++i)
        check.row({num(rho), std::to_string(it), num(r.check_offsets[i]),
                   num(gamma_of(cfg, r.check_offsets[i])), num(step.check_p_hat[i])});
    }
  };

  for (double rho : cfg.rho) {
    RefineResult r;
    try {
      r = refine(refine_config(cfg, rho), t_statistic_fn(0.0, cfg.t_variance));
    } catch (const NoConvergence& e) {
      emit(rho, e.partial());
      audit.close();
      points.close();
      check.close();
      throw;
    }
    emit(rho, r);
    const std::string path = out_path(cfg, model_file_name(rho, cfg.t_variance));
    save_model(path, r.model);
    written.push_back(path);
  }
  written.push_back(audit.close());
  written.push_back(points.close());
  written.push_back(check.close());
  return written;
}

namespace {

constexpr const char* kRejectionHeader = "method,rho,gamma,c,p_hat,std_err,J,seed";

void emit_profile(CsvFile& csv, const ExperimentConfig& cfg, const std::string& method,
                  double rho, const std::vector<double>& cs,
                  const std::vector<RejectionEstimate>& est) {
  for (std::size_t i = 0; i < cs.size(); ++i)
    csv.row({method, num(rho), num(gamma_of(cfg, cs[i])), num(cs[i]), num(est[i].p_hat),
             se(est[i].p_hat, est[i].reps), std::to_string(est[i].reps),
             std::to_string(*cfg.seed)});
}

std::vector<RejectionEstimate> cvf_profile(const ExperimentConfig& cfg, CvfModel model,
                                           double rho, const std::vector<double>& cs) {
  model.cov_mode = cfg.cov_mode_for(cfg.kind);
  std::vector<double> gammas;
  for (double c : cs) gammas.push_back(gamma_of(cfg, c));
  RejectionOptions ro;
  ro.J = cfg.J;
  ro.seed = derive_seed(*cfg.seed, Stream::Fresh, rho_key(rho));
  ro.threads = cfg.threads;
  return rejection_profile(model, gammas, Cov2::from_rho(rho), t_statistic_fn(0.0, cfg.t_variance),
                           ro);
}

/// Rejection rates of every configured baseline at every gamma, with common
/// innovations across gammas and methods.
std::vector<std::vector<RejectionEstimate>> baseline_profiles(const ExperimentConfig& cfg,
                                                              double rho,
                                                              const std::vector<double>& cs) {
  const Cov2 cov = Cov2::from_rho(rho);
  const std::size_t P = cs.size(), K = cfg.baselines.size(), R = cfg.J_baseline;
  std::vector<unsigned char> hit(R * P * K, 0);
  const std::uint64_t base = derive_seed(*cfg.seed, Stream::Baseline, rho_key(rho));
  const bool known = cfg.cov_mode_for(cfg.kind) == CovMode::Known;

  parallel_for(R, cfg.threads, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(base, Stream::Baseline, r);
    Rng rng(rep_seed);
    Eigen::VectorXd ey, ex;
    draw_innovations(cov, cfg.T, rng, ey, ex);
    ModelParams p;
    p.kind = cfg.det;
    p.cov = cov;
    for (std::size_t i = 0; i < P; ++i) {
      p.gamma = gamma_of(cfg, cs[i]);
      const Sample<double> s = build_sample(p, ey, ex);
      for (std::size_t k = 0; k < K; ++k) {
        BaselineConfig bc;
        bc.kind = cfg.baselines[k];
        bc.B = cfg.B;
        bc.block_size = cfg.block_size;
        bc.alpha = cfg.alpha;
        bc.det = cfg.det;
        bc.sigma_yy = known ? t_variance(cov, cfg.t_variance) : 0.0;
        bc.variance = cfg.t_variance;
        const auto d = run_baseline(s, bc, derive_seed(rep_seed, Stream::Baseline, i));
        hit[(r * P + i) * K + k] = d.reject ? 1 : 0;
      }
    }
  });

  std::vector<std::vector<RejectionEstimate>> out(K, std::vector<RejectionEstimate>(P));
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i < P; ++i) {
      std::size_t count = 0;
      for (std::size_t r = 0; r < R; ++r) count += hit[(r * P + i) * K + k];
      out[k][i] = {double(count) / double(R), R};
    }
  return out;
}

}  // namespace

std::vector<std::string> run_size(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto cs = c_sweep(cfg);
  CsvFile csv(out_path(cfg, "size.csv"), cfg, kRejectionHeader);
  for (double rho : cfg.rho) {
    emit_profile(csv, cfg, "cvf", rho, cs, cvf_profile(cfg, obtain_model(cfg, rho), rho, cs));
    const auto base = baseline_profiles(cfg, rho, cs);
    for (std::size_t k = 0; k < cfg.baselines.size(); ++k)
      emit_profile(csv, cfg, baseline_name(cfg.baselines[k]), rho, cs, base[k]);
  }
  return {csv.close()};
}

std::vector<std::string> run_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto cs = c_sweep(cfg);
  CsvFile csv(out_path(cfg, "compare.csv"), cfg, kRejectionHeader);
  for (double rho : cfg.rho) {
    CvfModel model = obtain_model(cfg, rho);
    for (auto scheme : {FlatteningScheme::None, FlatteningScheme::Ratio,
                        FlatteningScheme::Information, FlatteningScheme::Both}) {
      model.flattening.scheme = scheme;
      emit_profile(csv, cfg, std::string("cvf_flat_") + scheme_key(scheme), rho, cs,
                   cvf_profile(cfg, model, rho, cs));
    }
  }
  return {csv.close()};
}

double logistic_scale(double z) { return std::tanh(0.5 * z); }

std::vector<OverlayRow> read_overlay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open overlay " + path);
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) {
      const auto a = f.find_first_not_of(" \t\r");
      const auto b = f.find_last_not_of(" \t\r");
      out.push_back(a == std::string::npos ? "" : f.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
  };
  auto bad = [&](const std::string& what) { throw BadOverlay(path + ": " + what); };

  std::string line;
  do {
    if (!std::getline(in, line)) bad("missing header");
  } while (line.empty() || line[0] == '#');
  const auto header = split(line);
  int col_b = -1, col_p = -1, col_rho = -1, col_c = -1;
  for (int i = 0; i < int(header.size()); ++i) {
    if (header[i] == "b") col_b = i;
    else if (header[i] == "power") col_p = i;
    else if (header[i] == "rho") col_rho = i;
    else if (header[i] == "c") col_c = i;
  }
  if (col_b < 0 || col_p < 0) bad("header needs columns b and power");

  std::vector<OverlayRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto f = split(line);
    if (f.size() != header.size()) bad("row has " + std::to_string(f.size()) + " fields");
    auto value = [&](int i) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(f[std::size_t(i)], &used);
      } catch (const std::exception&) {
        bad("non-numeric field '" + f[std::size_t(i)] + "'");
      }
      if (used != f[std::size_t(i)].size() || !std::isfinite(v))
        bad("non-numeric field '" + f[std::size_t(i)] + "'");
      return v;
    };
    OverlayRow r;
    r.b = value(col_b);
    r.power = value(col_p);
    if (r.power < 0.0 || r.power > 1.0) bad("power outside [0, 1]");
    if (col_rho >= 0) r.rho = value(col_rho);
    if (col_c >= 0) r.c = value(col_c);
    rows.push_back(r);
  }
  if (rows.empty()) bad("no data rows");
  return rows;
}

std::vector<std::string> run_power(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::string> names;
  std::vector<std::vector<OverlayRow>> overlays;
  for (const auto& o : cfg.overlays) {
    const auto eq = o.find('=');
    names.push_back(o.substr(0, eq));
    overlays.push_back(read_overlay(o.substr(eq + 1)));
  }
  std::string header = "method,rho,c,gamma,b,beta,p_hat,std_err,J,seed";
  for (const auto& n : names) header += ",overlay_" + n;
  CsvFile csv(out_path(cfg, "power.csv"), cfg, header);

  const int nb = cfg.b_max - cfg.b_min + 1;
  const std::size_t C = cfg.power_c.size();
  for (double rho : cfg.rho) {
    CvfModel model = obtain_model(cfg, rho);
    model.cov_mode = cfg.cov_mode_for(ExperimentKind::Power);
    const Cov2 cov = Cov2::from_rho(rho);
    const Statistic psi = t_statistic_fn(0.0, cfg.t_variance);
    const std::uint64_t base = derive_seed(*cfg.seed, Stream::Power, rho_key(rho));

    std::vector<unsigned char> hit(cfg.J * C * std::size_t(nb), 0);
    parallel_for(cfg.J, cfg.threads, [&](std::size_t r) {
      Rng rng(derive_seed(base, Stream::Power, r));
      Eigen::VectorXd ey, ex;
      draw_innovations(cov, cfg.T, rng, ey, ex);
      ModelParams p;
      p.kind = cfg.det;
      p.cov = cov;
      for (std::size_t ci = 0; ci < C; ++ci) {
        p.gamma = gamma_of(cfg, cfg.power_c[ci]);
        const double unit = power_unit(cfg, cov, p.gamma);
        for (int bi = 0; bi < nb; ++bi) {
          p.beta = double(cfg.b_min + bi) * unit;
          const bool rej = evaluate_test(model, build_sample(p, ey, ex), cov, psi).reject;
          hit[(r * C + ci) * std::size_t(nb) + std::size_t(bi)] = rej ? 1 : 0;
        }
      }
    });

    for (std::size_t ci = 0; ci < C; ++ci) {
      const double c = cfg.power_c[ci];
      const double gamma = gamma_of(cfg, c);
      const double unit = power_unit(cfg, cov, gamma);
      for (int bi = 0; bi < nb; ++bi) {
        const int b = cfg.b_min + bi;
        std::size_t count = 0;
        for (std::size_t r = 0; r < cfg.J; ++r)
          count += hit[(r * C + ci) * std::size_t(nb) + std::size_t(bi)];
        const double p_hat = double(count) / double(cfg.J);
        std::vector<std::string> row{"cvf_feasible", num(rho), num(c), num(gamma),
                                     std::to_string(b), num(double(b) * unit), num(p_hat),
                                     se(p_hat, cfg.J), std::to_string(cfg.J),
                                     std::to_string(*cfg.seed)};
        for (const auto& ov : overlays) {
          std::string cell;
          for (const auto& o : ov) {
            if (std::abs(o.b - b) > 1e-9) continue;
            if (o.rho && std::abs(*o.rho - rho) > 1e-9) continue;
            if (o.c && std::abs(*o.c - c) > 1e-9) continue;
            cell = num(o.power);
            break;
          }
          row.push_back(cell);
        }
        csv.row(row);
      }
    }
  }
  return {csv.close()};
}

std::vector<std::string> run_cvf_surface(const ExperimentConfig& cfg) {
  cfg.validate();
  CsvFile csv(out_path(cfg, "cvf_surface.csv"), cfg,
              "rho,gamma,R_gamma,K_gammagamma,kappa,G_R_ratio,G_K");
  for (double rho : cfg.rho) {
    CvfModel model = obtain_model(cfg, rho);
    model.cov_mode = cfg.cov_mode_for(ExperimentKind::CvfSurface);
    const Cov2 cov = Cov2::from_rho(rho);
    const std::size_t G = cfg.surface_gamma.size(), D = cfg.surface_draws;
    std::vector<std::array<double, 3>> vals(G * D);
    const std::uint64_t base = derive_seed(*cfg.seed, Stream::Surface, rho_key(rho));
    parallel_for(G * D, cfg.threads, [&](std::size_t idx) {
      ModelParams p;
      p.gamma = cfg.surface_gamma[idx / D];
      p.kind = cfg.det;
      p.cov = cov;
      const Sample<double> s = simulate(p, cfg.T, derive_seed(base, Stream::Surface, idx));
      const Cov2 used = model.cov_mode == CovMode::Known ? cov : estimate_cov(s, cfg.det);
      const auto ls = local_stats(s, used, model.grid.center, model.beta0, model.kind);
      vals[idx] = {ls.r_gamma, ls.k_gammagamma, evaluate_cvf(model, ls)};
    });
    for (std::size_t idx = 0; idx < G * D; ++idx) {
      const auto& v = vals[idx];
      csv.row({num(rho), num(cfg.surface_gamma[idx / D]), num(v[0]), num(v[1]), num(v[2]),
               num(logistic_scale(v[0] / v[1])), num(logistic_scale(v[1]))});
    }
  }
  return {csv.close()};
}

std::vector<std::string> run_limits(const ExperimentConfig& cfg) {
  cfg.validate();
  CsvFile dist(out_path(cfg, "limits.csv"), cfg,
               "regime,rho,T,coordinate,reference,ks,finite_mean,finite_var,reference_mean,"
               "reference_var,finite_cov_r_beta");
  CsvFile moments(out_path(cfg, "limits_moments.csv"), cfg,
                  "rho,c,N,M,mean_r_beta,se_r_beta,mean_k_betabeta,se_k_betabeta,"
                  "max_k_betagamma_identity_residual");
  for (double rho : cfg.rho) {
    for (auto regime : {Regime::Stationary, Regime::Integrated, Regime::Explosive}) {
      ConvergenceConfig cc;
      cc.regime = regime;
      cc.rho = rho;
      cc.M = cfg.limit_M;
      cc.threads = cfg.threads;
      cc.seed = derive_seed(*cfg.seed, Stream::Limit, rho_key(rho) ^ std::uint64_t(regime));
      if (regime == Regime::Stationary) {
        cc.gamma = cfg.stationary_gamma;
        cc.T_ladder = cfg.stationary_T;
      } else if (regime == Regime::Integrated) {
        cc.T_ladder = cfg.integrated_T;
      } else {
        cc.gamma = cfg.explosive_gamma;
        cc.T_ladder = cfg.explosive_T;
      }
      const auto rep = convergence_check(cc);
      for (const auto& r : rep.rows)
        dist.row({regime_name(regime), num(rho), std::to_string(r.T), r.coordinate, r.reference,
                  num(r.ks), num(r.finite_mean), num(r.finite_var), num(r.reference_mean),
                  num(r.reference_var), num(r.finite_cov_r_beta)});
    }
    const auto draws = simulate_limit_draws(
        0.0, rho, cfg.limit_steps, cfg.limit_draws,
        derive_seed(*cfg.seed, Stream::Limit, rho_key(rho)), cfg.threads);
    double m_rb = 0, m_k = 0, v_rb = 0, v_k = 0, resid = 0;
    const double kr = rho / std::sqrt(1.0 - rho * rho);
    for (const auto& d : draws) {
      m_rb += d.r_beta;
      m_k += d.k_betabeta;
      resid = std::max(resid, std::abs(d.k_betagamma + kr * d.k_betabeta));
    }
    const double M = double(draws.size());
    m_rb /= M;
    m_k /= M;
    for (const auto& d : draws) {
      v_rb += (d.r_beta - m_rb) * (d.r_beta - m_rb);
      v_k += (d.k_betabeta - m_k) * (d.k_betabeta - m_k);
    }
    moments.row({num(rho), "0", std::to_string(cfg.limit_steps), std::to_string(draws.size()),
                 num(m_rb), num(std::sqrt(v_rb / (M - 1) / M)), num(m_k),
                 num(std::sqrt(v_k / (M - 1) / M)), num(resid)});
  }
  return {dist.close(), moments.close()};
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::Calibrate: return run_calibrate(cfg);
    case ExperimentKind::Size: return run_size(cfg);
    case ExperimentKind::Power: return run_power(cfg);
    case ExperimentKind::CvfSurface: return run_cvf_surface(cfg);
    case ExperimentKind::Compare: return run_compare(cfg);
    case ExperimentKind::Limits: return run_limits(cfg);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace cvf
