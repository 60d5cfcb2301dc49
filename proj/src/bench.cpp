#include "dpreg/bench.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

namespace dpreg {

namespace {

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, sep)) {
    const auto a = tok.find_first_not_of(" \t");
    const auto b = tok.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(tok.substr(a, b - a + 1));
  }
  return out;
}

// Tracked-coordinate spec: "all", "first:N", "stride:N", or an index list.
std::vector<int> parse_tracked(const std::string& s, int p) {
  std::vector<int> out;
  if (s.empty() || s == "all") {
    out.resize(p);
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  if (s.rfind("first:", 0) == 0) {
    const int k = std::min(p, std::atoi(s.c_str() + 6));
    out.resize(std::max(k, 0));
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  if (s.rfind("stride:", 0) == 0) {
    const int k = std::max(1, std::atoi(s.c_str() + 7));
    for (int j = 0; j < p; j += k) out.push_back(j);
    return out;
  }
  for (const auto& tok : split_list(s)) out.push_back(std::atoi(tok.c_str()));
  return out;
}

struct CiRecord {
  int rep = 0;
  int j = 0;
  std::string method;
  bool is_private = true;
  InferenceResult res;
  bool covered_naive = false;
  bool covered_corr = false;
};

struct RepOutcome {
  bool errored = false;
  std::string error;
  std::vector<CiRecord> ci;      // dp rows
  std::vector<CiRecord> db;      // db_lasso rows (naive == corrected interval)
  std::optional<RepDetail> dp_fdr;
  std::optional<RepDetail> np_fdr;
  double dp_fdr_eps = 0.0, dp_fdr_delta = 0.0;
};

bool has_method(const ScenarioConfig& cfg, const std::string& m) {
  for (const auto& s : cfg.methods) {
    if (s == m) return true;
  }
  return false;
}

RepDetail detail_from_selection(int rep, const FdrSelection& sel, double q) {
  RepDetail d;
  d.rep = rep;
  d.fdp = sel.fdp.value_or(0.0);
  d.power = sel.power.value_or(0.0);
  d.tau = sel.tau;
  d.support_size = static_cast<int>(sel.support_A.size());
  d.selected_size = static_cast<int>(sel.selected.size());
  d.stage1_empty = sel.stage1_empty;
  if (std::isfinite(sel.tau)) {
    int neg = 0, pos = 0;
    for (int i = 0; i < sel.mirrors.size(); ++i) {
      if (sel.mirrors[i] < -sel.tau) ++neg;
      if (sel.mirrors[i] > sel.tau) ++pos;
    }
    d.ratio_ok = static_cast<double>(neg) / std::max(pos, 1) <= q;
  }
  return d;
}

MirrorConfig resolve_mirror(const ScenarioConfig& cfg) {
  MirrorConfig m = cfg.mirror;
  const int n = cfg.design.n;
  const int n1 = n - n / 2;  // first half takes the extra row
  const auto& iht = cfg.inference.regression;
  const int K = adaptive_sparsity_exponent(n1, cfg.design.p, cfg.inference.adaptive);
  const double K_A = std::pow(2.0, K);
  if (m.B1 <= 0.0) m.B1 = 4.0 * K_A * iht.c_x * iht.c_x / n;
  if (m.B2 <= 0.0) m.B2 = 4.0 * iht.R * std::sqrt(K_A) * iht.c_x / n;
  return m;
}

RepOutcome run_replication(const ScenarioConfig& cfg, int rep, RandomStream rng,
                           const Matrix* fixed_X, const Vector* fixed_beta,
                           const std::vector<int>& support_true_fixed,
                           const std::vector<int>& tracked,
                           const std::vector<int>& tracked_db,
                           const MirrorConfig& mirror) {
  RepOutcome out;
  try {
    Dataset data;
    Vector beta_true;
    std::vector<int> support_true;
    if (cfg.redraw_design) {
      GeneratedData g = generate(cfg.design, rng);
      data = std::move(g.data);
      beta_true = std::move(g.beta_true);
      support_true = std::move(g.support_true);
    } else {
      data.X = *fixed_X;
      beta_true = *fixed_beta;
      support_true = support_true_fixed;
      data.y = generate_response(data.X, beta_true, cfg.design.sigma, rng);
    }
    const double delta = cfg.resolved_delta();

    if (has_method(cfg, "dp_corrected") || has_method(cfg, "dp_naive")) {
      for (int j : tracked) {
        RandomStream rj = rng.split();
        CiRecord rec;
        rec.rep = rep;
        rec.j = j;
        rec.method = "dp";
        rec.res = dp_confidence_interval(data, j, cfg.alpha, cfg.epsilon, delta,
                                         cfg.inference, rj);
        rec.covered_naive =
            beta_true[j] >= rec.res.lo_naive && beta_true[j] <= rec.res.hi_naive;
        rec.covered_corr =
            beta_true[j] >= rec.res.lo_corr && beta_true[j] <= rec.res.hi_corr;
        out.ci.push_back(std::move(rec));
      }
    }

    if (has_method(cfg, "db_lasso")) {
      RandomStream rdb = rng.split();
      baselines::LassoResult main = baselines::lasso(data, cfg.db_lasso.main, rdb);
      const Vector resid = data.y - data.X * main.beta;
      int nnz = 0;
      for (int q = 0; q < data.p(); ++q) nnz += main.beta[q] != 0.0;
      const double sigma2 = resid.squaredNorm() / std::max(1, data.n() - nnz);
      const double lambda_node =
          cfg.db_lasso.lambda_node
              ? *cfg.db_lasso.lambda_node
              : cfg.db_lasso.node_scale * std::sqrt(std::log(data.p()) / data.n());
      Matrix omega;  // unpenalized node-wise columns, shared across j
      if (cfg.db_lasso.nodewise_ols) omega = baselines::gram_inverse(data);
      const double z = stats::two_sided_z(cfg.alpha);
      for (int j : tracked_db) {
        const Vector w = cfg.db_lasso.nodewise_ols
                             ? Vector(omega.col(j))
                             : baselines::nodewise_precision_column(
                                   data, j, lambda_node, cfg.db_lasso.max_iter,
                                   cfg.db_lasso.tol);
        CiRecord rec;
        rec.rep = rep;
        rec.j = j;
        rec.method = "db_lasso";
        rec.is_private = false;
        rec.res.j = j;
        rec.res.beta_db = main.beta[j] + w.dot(data.X.transpose() * resid) / data.n();
        rec.res.sigma2_hat = sigma2;
        rec.res.w_jj_hat = w[j];
        const Vector xw = data.X * w;
        rec.res.V_hat = sigma2 * xw.squaredNorm() / data.n();
        rec.res.V_c = 0.0;
        rec.res.alpha = cfg.alpha;
        const double half = z * std::sqrt(rec.res.V_hat / data.n());
        rec.res.lo_naive = rec.res.lo_corr = rec.res.beta_db - half;
        rec.res.hi_naive = rec.res.hi_corr = rec.res.beta_db + half;
        rec.covered_naive = rec.covered_corr =
            beta_true[j] >= rec.res.lo_corr && beta_true[j] <= rec.res.hi_corr;
        out.db.push_back(std::move(rec));
      }
    }

    if (has_method(cfg, "dp_fdr")) {
      RandomStream rf = rng.split();
      FdrSelection sel = dp_fdr_pipeline(data, cfg.inference.regression,
                                         cfg.inference.adaptive, mirror, cfg.epsilon,
                                         delta, support_true, rf);
      out.dp_fdr = detail_from_selection(rep, sel, mirror.q);
      out.dp_fdr_eps = sel.eps_charged;
      out.dp_fdr_delta = sel.delta_charged;
    }
    if (has_method(cfg, "nonprivate_fdr")) {
      RandomStream rf = rng.split();
      FdrSelection sel = baselines::nonprivate_mirror_fdr(
          data, mirror.q, mirror.f_kind, baselines::Stage1::Lasso,
          cfg.inference.regression, cfg.inference.adaptive, cfg.lasso, support_true,
          rf);
      out.np_fdr = detail_from_selection(rep, sel, mirror.q);
    }
  } catch (const std::exception& e) {
    out.errored = true;
    out.error = e.what();
  }
  return out;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

int resolve_workers(int configured) {
  if (const char* env = std::getenv("DPREG_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  if (configured > 0) return configured;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

int ScenarioResult::exit_code() const {
  int total = 0;
  for (const auto& row : rows) total = std::max(total, row.reps);
  if (total == 0) return 0;
  return errored_reps * 10 > total ? 2 : 0;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  cfg.design.validate();
  if (cfg.reps < 1) throw InvalidParameter("run_scenario: reps must be >= 1");
  if (cfg.methods.empty()) throw InvalidParameter("run_scenario: empty method set");

  const std::vector<int> tracked = cfg.tracked.empty()
                                       ? parse_tracked("all", cfg.design.p)
                                       : cfg.tracked;
  const std::vector<int> tracked_db = cfg.tracked_db.empty() ? tracked : cfg.tracked_db;
  const bool wants_fdr =
      has_method(cfg, "dp_fdr") || has_method(cfg, "nonprivate_fdr");
  const MirrorConfig mirror = wants_fdr ? resolve_mirror(cfg) : cfg.mirror;

  RandomStream master(cfg.seed);
  RandomStream design_stream = master.split();
  Matrix fixed_X;
  Vector fixed_beta;
  std::vector<int> fixed_support;
  if (!cfg.redraw_design) {
    fixed_X = generate_design(cfg.design, design_stream);
    auto [b, s] = generate_coefficients(cfg.design, design_stream);
    fixed_beta = b;
    fixed_support = s;
  }
  std::vector<RandomStream> rep_streams;
  rep_streams.reserve(cfg.reps);
  for (int r = 0; r < cfg.reps; ++r) rep_streams.push_back(master.split());

  std::vector<RepOutcome> outcomes(cfg.reps);
  const int workers = std::min(resolve_workers(cfg.workers), cfg.reps);
  std::atomic<int> next{0};
  auto work = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= cfg.reps) return;
      outcomes[r] = run_replication(cfg, r, rep_streams[r], &fixed_X, &fixed_beta,
                                    fixed_support, tracked, tracked_db, mirror);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // Deterministic reduction in replication order.
  ScenarioResult result;
  const double delta = cfg.resolved_delta();
  auto make_row = [&](const std::string& method) {
    MetricsRow row;
    row.scenario = cfg.name;
    row.method = method;
    row.rho = cfg.design.rho;
    row.reps = cfg.reps;
    return row;
  };

  struct CiAgg {
    double cov = 0, len = 0;
    long count = 0;
    int degenerate = 0;
    double max_gap = 0, eps = 0, del = 0;
  };
  CiAgg corr, naive, db;
  RepDetail dummy;
  std::vector<RepDetail> dp_fdr_reps, np_fdr_reps;
  double dp_fdr_gap = 0.0, dp_fdr_eps = 0.0, dp_fdr_delta = 0.0;

  for (int r = 0; r < cfg.reps; ++r) {
    const RepOutcome& o = outcomes[r];
    if (o.errored) {
      ++result.errored_reps;
      continue;
    }
    for (const auto& rec : o.ci) {
      corr.cov += rec.covered_corr;
      corr.len += rec.res.hi_corr - rec.res.lo_corr;
      naive.cov += rec.covered_naive;
      naive.len += rec.res.hi_naive - rec.res.lo_naive;
      corr.degenerate += rec.res.degenerate;
      naive.degenerate += rec.res.degenerate;
      ++corr.count;
      ++naive.count;
      corr.eps = rec.res.eps_charged;
      corr.del = rec.res.delta_charged;
      corr.max_gap = std::max(
          {corr.max_gap, std::fabs(rec.res.eps_charged - cfg.epsilon),
           std::fabs(rec.res.delta_charged - delta)});
    }
    for (const auto& rec : o.db) {
      db.cov += rec.covered_corr;
      db.len += rec.res.hi_corr - rec.res.lo_corr;
      ++db.count;
    }
    if (o.dp_fdr) {
      dp_fdr_reps.push_back(*o.dp_fdr);
      dp_fdr_eps = o.dp_fdr_eps;
      dp_fdr_delta = o.dp_fdr_delta;
      dp_fdr_gap = std::max({dp_fdr_gap, std::fabs(o.dp_fdr_eps - cfg.epsilon),
                             std::fabs(o.dp_fdr_delta - delta)});
    }
    if (o.np_fdr) np_fdr_reps.push_back(*o.np_fdr);
  }

  auto push_ci_row = [&](const std::string& method, const CiAgg& a, bool naive_side) {
    MetricsRow row = make_row(method);
    if (a.count > 0) {
      row.avg_coverage = a.cov / a.count;
      row.avg_length = a.len / a.count;
    }
    row.degenerate = a.degenerate;
    row.errors = result.errored_reps;
    row.eps_charged = a.eps;
    row.delta_charged = a.del;
    row.max_budget_gap = a.max_gap;
    (void)naive_side;
    result.rows.push_back(row);
    result.methods[method].row = row;
  };
  if (has_method(cfg, "dp_corrected")) push_ci_row("dp_corrected", corr, false);
  if (has_method(cfg, "dp_naive")) {
    naive.eps = corr.eps;
    naive.del = corr.del;
    naive.max_gap = corr.max_gap;
    push_ci_row("dp_naive", naive, true);
  }
  if (has_method(cfg, "db_lasso")) push_ci_row("db_lasso", db, false);

  auto push_fdr_row = [&](const std::string& method, std::vector<RepDetail>& reps,
                          double eps, double del, double gap) {
    MetricsRow row = make_row(method);
    double fdp = 0.0, power = 0.0;
    int degenerate = 0;
    for (const auto& d : reps) {
      fdp += d.fdp;
      power += d.power;
      degenerate += d.stage1_empty;
    }
    if (!reps.empty()) {
      row.empirical_fdr = fdp / reps.size();
      row.avg_power = power / reps.size();
    }
    row.degenerate = degenerate;
    row.errors = result.errored_reps;
    row.eps_charged = eps;
    row.delta_charged = del;
    row.max_budget_gap = gap;
    result.rows.push_back(row);
    result.methods[method].row = row;
    result.methods[method].reps = std::move(reps);
  };
  if (has_method(cfg, "dp_fdr")) {
    push_fdr_row("dp_fdr", dp_fdr_reps, dp_fdr_eps, dp_fdr_delta, dp_fdr_gap);
  }
  if (has_method(cfg, "nonprivate_fdr")) {
    push_fdr_row("nonprivate_fdr", np_fdr_reps, 0.0, 0.0, 0.0);
  }

  // Manifest + outputs.
  RunManifest manifest;
  manifest.seed = cfg.seed;
  manifest.artifact_version = kArtifactVersion;
  manifest.config = scenario_to_map(cfg);
  manifest.config_hash = config_hash(manifest.config);
  manifest.eps_total = cfg.epsilon;
  manifest.delta_total = delta;
  {
    char buf[32];
    const std::time_t now = std::time(nullptr);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    manifest.timestamp = buf;
  }
  result.manifest = manifest;

  if (!cfg.out_path.empty()) {
    CsvWriter csv({"scenario", "method", "rho", "avg_coverage", "avg_length",
                   "empirical_fdr", "avg_power", "reps", "degenerate", "errors",
                   "eps_charged", "delta_charged", "max_budget_gap"});
    for (const auto& row : result.rows) {
      csv.add_row({row.scenario, row.method, fmt(row.rho), fmt(row.avg_coverage),
                   fmt(row.avg_length), fmt(row.empirical_fdr), fmt(row.avg_power),
                   std::to_string(row.reps), std::to_string(row.degenerate),
                   std::to_string(row.errors), fmt(row.eps_charged),
                   fmt(row.delta_charged), fmt(row.max_budget_gap)});
    }
    csv.save(cfg.out_path);
    write_text_file(cfg.out_path + ".manifest", manifest.to_text());
  }
  if (!cfg.details_path.empty()) {
    CsvWriter ci({"rep", "method", "private", "j", "beta_db", "sigma2_hat",
                  "w_jj_hat", "V_hat", "V_c", "lo_naive", "hi_naive", "lo_corr",
                  "hi_corr", "degenerate"});
    CsvWriter fdr({"rep", "method", "support_size", "tau", "selected_size", "fdp",
                   "power", "stage1_empty", "ratio_ok"});
    for (int r = 0; r < cfg.reps; ++r) {
      const RepOutcome& o = outcomes[r];
      auto emit_ci = [&](const CiRecord& rec) {
        ci.add_row({std::to_string(rec.rep), rec.method,
                    rec.is_private ? "true" : "false", std::to_string(rec.j),
                    fmt(rec.res.beta_db), fmt(rec.res.sigma2_hat),
                    fmt(rec.res.w_jj_hat), fmt(rec.res.V_hat), fmt(rec.res.V_c),
                    fmt(rec.res.lo_naive), fmt(rec.res.hi_naive),
                    fmt(rec.res.lo_corr), fmt(rec.res.hi_corr),
                    rec.res.degenerate ? "1" : "0"});
      };
      for (const auto& rec : o.ci) emit_ci(rec);
      for (const auto& rec : o.db) emit_ci(rec);
      auto emit_fdr = [&](const char* method, const RepDetail& d) {
        fdr.add_row({std::to_string(d.rep), method, std::to_string(d.support_size),
                     fmt(d.tau), std::to_string(d.selected_size), fmt(d.fdp),
                     fmt(d.power), d.stage1_empty ? "1" : "0",
                     d.ratio_ok ? "1" : "0"});
      };
      if (o.dp_fdr) emit_fdr("dp_fdr", *o.dp_fdr);
      if (o.np_fdr) emit_fdr("nonprivate_fdr", *o.np_fdr);
    }
    ci.save(cfg.details_path + "_ci.csv");
    fdr.save(cfg.details_path + "_fdr.csv");
  }
  return result;
}

}  // namespace dpreg
