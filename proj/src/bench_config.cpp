#include <cmath>
#include <numeric>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dpreg/bench.hpp"

namespace dpreg {

namespace {

double get_d(const std::map<std::string, std::string>& kv, const std::string& key,
             double dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (!end || *end != '\0') throw InvalidParameter("bad numeric value for " + key);
  return v;
}

long long get_i(const std::map<std::string, std::string>& kv, const std::string& key,
                long long dflt) {
  auto it = kv.find(key);
  if (it == kv.end()) return dflt;
  return std::strtoll(it->second.c_str(), nullptr, 10);
}

std::string get_s(const std::map<std::string, std::string>& kv,
                  const std::string& key, const std::string& dflt) {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : it->second;
}

std::vector<int> parse_index_list(const std::string& s, int p) {
  std::vector<int> out;
  if (s.empty() || s == "all") {
    out.resize(p);
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  if (s.rfind("first:", 0) == 0) {
    const int k = std::min(p, std::atoi(s.c_str() + 6));
    for (int j = 0; j < k; ++j) out.push_back(j);
    return out;
  }
  if (s.rfind("stride:", 0) == 0) {
    const int k = std::max(1, std::atoi(s.c_str() + 7));
    for (int j = 0; j < p; j += k) out.push_back(j);
    return out;
  }
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (!tok.empty()) out.push_back(std::atoi(tok.c_str()));
  }
  return out;
}

}  // namespace

ScenarioConfig scenario_from_map(const std::map<std::string, std::string>& kv) {
  ScenarioConfig cfg;
  cfg.name = get_s(kv, "scenario", "scenario");

  const std::string design = get_s(kv, "design", "identity");
  if (design == "identity") cfg.design.covariance = DesignSpec::Covariance::Identity;
  else if (design == "toeplitz") cfg.design.covariance = DesignSpec::Covariance::ToeplitzAR;
  else if (design == "blocked_equi") cfg.design.covariance = DesignSpec::Covariance::BlockedEqui;
  else throw InvalidParameter("unknown design: " + design);
  cfg.design.rho = get_d(kv, "rho", 0.0);
  cfg.design.n = static_cast<int>(get_i(kv, "n", 100));
  cfg.design.p = static_cast<int>(get_i(kv, "p", 10));
  cfg.design.s0 = static_cast<int>(get_i(kv, "s0", 1));
  const std::string support = get_s(kv, "support", "prefix");
  cfg.design.support_pattern = support == "random"
                                   ? DesignSpec::SupportPattern::RandomUniform
                                   : DesignSpec::SupportPattern::Prefix;
  const std::string signal = get_s(kv, "signal", "fixed");
  cfg.design.signal = signal == "gaussian" ? DesignSpec::Signal::GaussianAmplitude
                                           : DesignSpec::Signal::Fixed;
  cfg.design.signal_value = get_d(kv, "signal_value", 1.0);
  cfg.design.signal_xi = get_d(kv, "signal_xi", 1.0);
  cfg.design.sigma = get_d(kv, "sigma", 1.0);
  const double cx = get_d(kv, "cx_trunc", 6.0);
  if (cx > 0.0) cfg.design.cx_trunc = cx;

  {
    std::istringstream is(get_s(kv, "methods", "dp_corrected"));
    std::string tok;
    while (std::getline(is, tok, ',')) {
      const auto a = tok.find_first_not_of(" \t");
      const auto b = tok.find_last_not_of(" \t");
      if (a != std::string::npos) cfg.methods.push_back(tok.substr(a, b - a + 1));
    }
  }

  cfg.epsilon = get_d(kv, "epsilon", 0.5);
  const std::string delta = get_s(kv, "delta", "auto");
  cfg.delta = delta == "auto" ? 0.0 : std::strtod(delta.c_str(), nullptr);
  cfg.reps = static_cast<int>(get_i(kv, "reps", 1));
  cfg.alpha = get_d(kv, "alpha", 0.05);
  cfg.seed = static_cast<std::uint64_t>(get_i(kv, "seed", 1));
  cfg.workers = static_cast<int>(get_i(kv, "workers", 0));
  cfg.redraw_design = get_i(kv, "redraw_design", 1) != 0;
  cfg.out_path = get_s(kv, "out", "");
  cfg.details_path = get_s(kv, "details_out", "");
  const NoiseMode mode = get_s(kv, "noise", "calibrated") == "disabled"
                             ? NoiseMode::Disabled
                             : NoiseMode::Calibrated;

  IhtConfig& iht = cfg.inference.regression;
  iht.R = get_d(kv, "R", 1.0);
  iht.C = get_d(kv, "C", 1.0);
  iht.T = static_cast<int>(get_i(kv, "T", 10));
  iht.L = get_d(kv, "L", 1.0);
  iht.c_x = get_d(kv, "cx", cx > 0.0 ? cx : 6.0);
  iht.eta0 = get_d(kv, "eta0", 0.0);
  iht.B = get_d(kv, "B", 0.0);
  iht.noise_mode = mode;

  PrecisionConfig& w = cfg.inference.precision;
  w.iht = iht;
  w.iht.R = get_d(kv, "wR", 2.0 * iht.L * std::sqrt(std::log(cfg.design.n)));
  w.iht.C = get_d(kv, "wC", iht.L + 1.0);
  w.iht.B = get_d(kv, "wB", 0.0);
  w.gradient_sign = get_s(kv, "gradient_sign", "descent") == "literal"
                        ? GradientSign::Literal
                        : GradientSign::Descent;

  AdaptiveConfig& a = cfg.inference.adaptive;
  a.c0 = get_d(kv, "c0_bic", 1.0);
  a.force_K = static_cast<int>(get_i(kv, "force_K", -1));
  a.max_K = static_cast<int>(get_i(kv, "max_K", 12));
  const std::string base = get_s(kv, "log_base", "e");
  a.log_base = base == "e" ? 0.0 : std::strtod(base.c_str(), nullptr);

  MirrorConfig& m = cfg.mirror;
  m.q = get_d(kv, "q", 0.1);
  const std::string f = get_s(kv, "f_kind", "min_twice");
  if (f == "min_twice") m.f_kind = MirrorKind::MinTwice;
  else if (f == "product") m.f_kind = MirrorKind::Product;
  else if (f == "sum") m.f_kind = MirrorKind::Sum;
  else throw InvalidParameter("unknown f_kind: " + f);
  m.B1 = get_d(kv, "B1", 0.0);
  m.B2 = get_d(kv, "B2", 0.0);

  const double lam = get_d(kv, "lasso_lambda", -1.0);
  if (lam >= 0.0) cfg.lasso.lambda = lam;
  cfg.lasso.cv_grid = static_cast<int>(get_i(kv, "lasso_grid", 50));
  cfg.lasso.cv_grid_min_ratio = get_d(kv, "lasso_grid_min", 1e-2);
  cfg.db_lasso.main = cfg.lasso;
  const double lam_node = get_d(kv, "lambda_node", -1.0);
  if (lam_node >= 0.0) cfg.db_lasso.lambda_node = lam_node;
  cfg.db_lasso.node_scale = get_d(kv, "node_scale", 1.0);
  cfg.db_lasso.nodewise_ols = get_s(kv, "nodewise", "lasso") == "ols";

  cfg.tracked = parse_index_list(get_s(kv, "tracked", "all"), cfg.design.p);
  cfg.tracked_db = parse_index_list(get_s(kv, "tracked_db",
                                          get_s(kv, "tracked", "all")),
                                    cfg.design.p);
  return cfg;
}

std::map<std::string, std::string> scenario_to_map(const ScenarioConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["scenario"] = cfg.name;
  switch (cfg.design.covariance) {
    case DesignSpec::Covariance::Identity: kv["design"] = "identity"; break;
    case DesignSpec::Covariance::ToeplitzAR: kv["design"] = "toeplitz"; break;
    case DesignSpec::Covariance::BlockedEqui: kv["design"] = "blocked_equi"; break;
  }
  kv["rho"] = format_double(cfg.design.rho);
  kv["n"] = std::to_string(cfg.design.n);
  kv["p"] = std::to_string(cfg.design.p);
  kv["s0"] = std::to_string(cfg.design.s0);
  kv["support"] = cfg.design.support_pattern == DesignSpec::SupportPattern::Prefix
                      ? "prefix" : "random";
  kv["signal"] = cfg.design.signal == DesignSpec::Signal::Fixed ? "fixed" : "gaussian";
  kv["signal_value"] = format_double(cfg.design.signal_value);
  kv["signal_xi"] = format_double(cfg.design.signal_xi);
  kv["sigma"] = format_double(cfg.design.sigma);
  kv["cx_trunc"] = cfg.design.cx_trunc ? format_double(*cfg.design.cx_trunc) : "0";
  {
    std::string ms;
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
      ms += (i ? "," : "") + cfg.methods[i];
    }
    kv["methods"] = ms;
  }
  kv["epsilon"] = format_double(cfg.epsilon);
  kv["delta"] = cfg.delta > 0.0 ? format_double(cfg.delta) : "auto";
  kv["reps"] = std::to_string(cfg.reps);
  kv["alpha"] = format_double(cfg.alpha);
  kv["redraw_design"] = cfg.redraw_design ? "1" : "0";
  kv["noise"] = cfg.inference.regression.noise_mode == NoiseMode::Disabled
                    ? "disabled" : "calibrated";
  const IhtConfig& iht = cfg.inference.regression;
  kv["R"] = format_double(iht.R);
  kv["C"] = format_double(iht.C);
  kv["T"] = std::to_string(iht.T);
  kv["L"] = format_double(iht.L);
  kv["cx"] = format_double(iht.c_x);
  kv["eta0"] = format_double(iht.eta0);
  kv["B"] = format_double(iht.B);
  kv["wR"] = format_double(cfg.inference.precision.iht.R);
  kv["wC"] = format_double(cfg.inference.precision.iht.C);
  kv["wB"] = format_double(cfg.inference.precision.iht.B);
  kv["gradient_sign"] =
      cfg.inference.precision.gradient_sign == GradientSign::Literal ? "literal"
                                                                     : "descent";
  kv["c0_bic"] = format_double(cfg.inference.adaptive.c0);
  kv["force_K"] = std::to_string(cfg.inference.adaptive.force_K);
  kv["max_K"] = std::to_string(cfg.inference.adaptive.max_K);
  kv["log_base"] = cfg.inference.adaptive.log_base > 0.0
                       ? format_double(cfg.inference.adaptive.log_base) : "e";
  kv["q"] = format_double(cfg.mirror.q);
  switch (cfg.mirror.f_kind) {
    case MirrorKind::MinTwice: kv["f_kind"] = "min_twice"; break;
    case MirrorKind::Product: kv["f_kind"] = "product"; break;
    case MirrorKind::Sum: kv["f_kind"] = "sum"; break;
  }
  kv["B1"] = format_double(cfg.mirror.B1);
  kv["B2"] = format_double(cfg.mirror.B2);
  kv["node_scale"] = format_double(cfg.db_lasso.node_scale);
  kv["nodewise"] = cfg.db_lasso.nodewise_ols ? "ols" : "lasso";
  if (cfg.db_lasso.lambda_node) {
    kv["lambda_node"] = format_double(*cfg.db_lasso.lambda_node);
  }
  if (cfg.lasso.lambda) kv["lasso_lambda"] = format_double(*cfg.lasso.lambda);
  {
    std::string t;
    for (std::size_t i = 0; i < cfg.tracked.size(); ++i) {
      t += (i ? "," : "") + std::to_string(cfg.tracked[i]);
    }
    kv["tracked"] = t;
    t.clear();
    for (std::size_t i = 0; i < cfg.tracked_db.size(); ++i) {
      t += (i ? "," : "") + std::to_string(cfg.tracked_db[i]);
    }
    kv["tracked_db"] = t;
  }
  return kv;
}

Dataset ingest_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidParameter("empty CSV: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::istringstream is(line);
    std::string tok;
    while (std::getline(is, tok, ',')) header.push_back(tok);
  }
  int target = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == target_column) target = static_cast<int>(c);
  }
  if (target < 0) {
    throw InvalidParameter("target column '" + target_column + "' not found in " + path);
  }
  const int width = static_cast<int>(header.size());

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream is(line);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (!end || end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw InvalidParameter("non-numeric cell '" + tok + "' at line " +
                               std::to_string(lineno) + " of " + path);
      }
      row.push_back(v);
    }
    if (static_cast<int>(row.size()) != width) {
      throw InvalidParameter("ragged row (" + std::to_string(row.size()) +
                             " cells, expected " + std::to_string(width) +
                             ") at line " + std::to_string(lineno) + " of " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidParameter("CSV has no data rows: " + path);

  Dataset data;
  const int n = static_cast<int>(rows.size());
  data.X.resize(n, width - 1);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    int c = 0;
    for (int j = 0; j < width; ++j) {
      if (j == target) data.y[i] = rows[i][j];
      else data.X(i, c++) = rows[i][j];
    }
  }
  return data;
}

void dump_csv(const Dataset& data, const std::string& path) {
  std::ostringstream os;
  for (int j = 0; j < data.p(); ++j) os << "x" << (j + 1) << ",";
  os << "y\n";
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) os << format_double(data.X(i, j)) << ",";
    os << format_double(data.y[i]) << "\n";
  }
  write_text_file(path, os.str());
}

}  // namespace dpreg
