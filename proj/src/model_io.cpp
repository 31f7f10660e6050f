#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cvf/cvf_engine.hpp"

namespace cvf {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* mapping_name(GridMapping m) {
  switch (m) {
    case GridMapping::PerT: return "per-T";
    case GridMapping::Local: return "local";
    case GridMapping::Absolute: return "absolute";
  }
  return "?";
}

const char* scheme_name(FlatteningScheme s) {
  switch (s) {
    case FlatteningScheme::None: return "none";
    case FlatteningScheme::Ratio: return "ratio";
    case FlatteningScheme::Information: return "information";
    case FlatteningScheme::Both: return "both";
  }
  return "?";
}

[[noreturn]] void bad(const std::string& what) {
  throw IoError("CVF/1: " + what);
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    bad("bad number '" + s + "'");
  }
  if (used != s.size()) bad("bad number '" + s + "'");
  return v;
}

}  // namespace

void write_model(std::ostream& out, const CvfModel& model) {
  out << "CVF/1\n";
  out << "alpha " << fmt_double(model.alpha) << '\n';
  out << "beta0 " << fmt_double(model.beta0) << '\n';
  out << "T " << model.grid.T << '\n';
  out << "center " << fmt_double(model.grid.center) << '\n';
  out << "mapping " << mapping_name(model.grid.mapping) << '\n';
  out << "measure " << (model.measure == BaselineMeasure::NuStar ? "nu_star" : "nu_dagger") << '\n';
  out << "cov_mode " << (model.cov_mode == CovMode::Known ? "known" : "estimated") << '\n';
  out << "cov " << fmt_double(model.cov.syy) << ' ' << fmt_double(model.cov.sxy) << ' '
      << fmt_double(model.cov.sxx) << '\n';
  out << "deterministic " << (model.kind == Deterministic::Intercept ? "intercept" : "trend")
      << '\n';
  const Flattening& f = model.flattening;
  out << "flattening " << scheme_name(f.scheme) << ' ' << fmt_double(f.ratio_threshold) << ' '
      << fmt_double(f.k_low) << ' ' << fmt_double(f.k_high) << ' ' << fmt_double(f.flat_value)
      << '\n';
  out << "points " << model.grid.size() << '\n';
  for (std::size_t i = 0; i < model.grid.size(); ++i)
    out << fmt_double(model.grid.offsets[i]) << ' ' << fmt_double(model.k(Eigen::Index(i)))
        << '\n';
  out << "end\n";
}

CvfModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "CVF/1") bad("missing version header");

  CvfModel m;
  std::map<std::string, bool> seen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::vector<std::string> vals;
    for (std::string v; ls >> v;) vals.push_back(v);
    auto need = [&](std::size_t n) {
      if (vals.size() != n) bad("wrong arity for '" + key + "'");
    };
    seen[key] = true;
    if (key == "alpha") {
      need(1);
      m.alpha = parse_double(vals[0]);
    } else if (key == "beta0") {
      need(1);
      m.beta0 = parse_double(vals[0]);
    } else if (key == "T") {
      need(1);
      m.grid.T = static_cast<Eigen::Index>(parse_double(vals[0]));
    } else if (key == "center") {
      need(1);
      m.grid.center = parse_double(vals[0]);
    } else if (key == "mapping") {
      need(1);
      if (vals[0] == "per-T") m.grid.mapping = GridMapping::PerT;
      else if (vals[0] == "local") m.grid.mapping = GridMapping::Local;
      else if (vals[0] == "absolute") m.grid.mapping = GridMapping::Absolute;
      else bad("unknown mapping");
    } else if (key == "measure") {
      need(1);
      if (vals[0] == "nu_star") m.measure = BaselineMeasure::NuStar;
      else if (vals[0] == "nu_dagger") m.measure = BaselineMeasure::NuDagger;
      else bad("unknown measure");
    } else if (key == "cov_mode") {
      need(1);
      if (vals[0] == "known") m.cov_mode = CovMode::Known;
      else if (vals[0] == "estimated") m.cov_mode = CovMode::Estimated;
      else bad("unknown cov_mode");
    } else if (key == "cov") {
      need(3);
      m.cov = {parse_double(vals[0]), parse_double(vals[1]), parse_double(vals[2])};
    } else if (key == "deterministic") {
      need(1);
      if (vals[0] == "intercept") m.kind = Deterministic::Intercept;
      else if (vals[0] == "trend") m.kind = Deterministic::Trend;
      else bad("unknown deterministic kind");
    } else if (key == "flattening") {
      need(5);
      const std::string& s = vals[0];
      if (s == "none") m.flattening.scheme = FlatteningScheme::None;
      else if (s == "ratio") m.flattening.scheme = FlatteningScheme::Ratio;
      else if (s == "information") m.flattening.scheme = FlatteningScheme::Information;
      else if (s == "both") m.flattening.scheme = FlatteningScheme::Both;
      else bad("unknown flattening scheme");
      m.flattening.ratio_threshold = parse_double(vals[1]);
      m.flattening.k_low = parse_double(vals[2]);
      m.flattening.k_high = parse_double(vals[3]);
      m.flattening.flat_value = parse_double(vals[4]);
    } else if (key == "points") {
      need(1);
      const auto n = static_cast<std::size_t>(parse_double(vals[0]));
      m.grid.offsets.resize(n);
      m.k.resize(Eigen::Index(n));
      for (std::size_t i = 0; i < n; ++i) {
        double c, k;
        if (!std::getline(in, line)) bad("truncated point list");
        std::istringstream ps(line);
        std::string a, b, extra;
        if (!(ps >> a >> b) || (ps >> extra)) bad("bad point line");
        c = parse_double(a);
        k = parse_double(b);
        m.grid.offsets[i] = c;
        m.k(Eigen::Index(i)) = k;
      }
    } else if (key == "end") {
      for (const char* req : {"alpha", "T", "points", "cov"})
        if (!seen.count(req)) bad(std::string("missing '") + req + "'");
      m.grid.validate();
      return m;
    } else {
      bad("unknown key '" + key + "'");
    }
  }
  bad("missing 'end'");
}

void save_model(const std::string& path, const CvfModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_model(out, model);
  if (!out) throw IoError("write failed: " + path);
}

CvfModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_model(in);
}

}  // namespace cvf
