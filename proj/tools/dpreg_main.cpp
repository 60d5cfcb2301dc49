#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "dpreg/bench.hpp"

namespace {

using namespace dpreg;

void add_common_estimator_flags(CLI::App* cmd, std::map<std::string, std::string>& kv) {
  // Every scenario key is also a flag; flags win over config-file entries.
  static const char* keys[] = {
      "scenario", "design", "rho", "n", "p", "s0", "support", "signal",
      "signal_value", "signal_xi", "sigma", "cx_trunc", "methods", "epsilon",
      "delta", "reps", "alpha", "seed", "workers", "redraw_design", "out",
      "details_out", "noise", "R", "C", "T", "L", "cx", "eta0", "B", "wR", "wC",
      "wB", "gradient_sign", "c0_bic", "force_K", "max_K", "log_base", "q",
      "f_kind", "B1", "B2", "lasso_lambda", "lambda_node", "node_scale",
      "tracked", "tracked_db", "nodewise", "R_pilot_eps", "R_pilot_bound"};
  for (const char* k : keys) {
    cmd->add_option_function<std::string>(
        std::string("--") + k, [&kv, k](const std::string& v) { kv[k] = v; });
  }
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  if (path.empty()) return {};
  return parse_key_value(read_text_file(path));
}

// Optional clipped-MAD pilot: spends its own (pure-epsilon) slice to estimate
// sigma from the response and derives R = sigma_hat sqrt(2 log n).
void maybe_pilot_R(std::map<std::string, std::string>& kv, const Dataset& data,
                   std::uint64_t seed, NoiseMode mode) {
  auto it = kv.find("R_pilot_eps");
  if (it == kv.end()) return;
  const double peps = std::strtod(it->second.c_str(), nullptr);
  if (!(peps > 0.0)) return;
  double bound = 10.0;
  if (auto b = kv.find("R_pilot_bound"); b != kv.end()) {
    bound = std::strtod(b->second.c_str(), nullptr);
  }
  PrivacyBudget pilot_budget(peps, 1e-15);
  RandomStream rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const double sigma =
      mad_scale_pilot(data.y, bound, peps, mode, pilot_budget, rng);
  const double R = sigma * std::sqrt(2.0 * std::log(static_cast<double>(data.n())));
  kv["R"] = format_double(R);
  std::printf(
      "MAD pilot: sigma_hat=%.4f -> R=%.4f (pilot epsilon %.4g charged in "
      "addition to the main budget)\n",
      sigma, R, peps);
}

void warn_if_disabled(const ScenarioConfig& cfg) {
  if (cfg.inference.regression.noise_mode == NoiseMode::Disabled) {
    std::fprintf(stderr,
                 "*** NOISE DISABLED: this run is NOT differentially private; "
                 "Disabled mode exists for oracle tests only ***\n");
  }
}

void print_rows(const ScenarioResult& result) {
  for (const auto& row : result.rows) {
    std::printf(
        "  %-16s rho=%.2f coverage=%.4f length=%.4f fdr=%.4f power=%.4f "
        "degenerate=%d eps=%.6g budget_gap=%.3g\n",
        row.method.c_str(), row.rho, row.avg_coverage, row.avg_length,
        row.empirical_fdr, row.avg_power, row.degenerate, row.eps_charged,
        row.max_budget_gap);
  }
}

int cmd_bench(const std::string& config_path, const std::string& replay_path,
              const std::string& sweep_xi, const std::string& sweep_n,
              std::map<std::string, std::string> overrides) {
  std::map<std::string, std::string> kv;
  if (!replay_path.empty()) {
    RunManifest m = RunManifest::from_text(read_text_file(replay_path));
    kv = m.config;
    kv["seed"] = std::to_string(m.seed);
  } else {
    kv = load_config_file(config_path);
  }
  for (const auto& [k, v] : overrides) kv[k] = v;

  // Parameter sweeps emit one metrics row per point into a single CSV: the
  // plot data for the FDR/power curves.
  if (!sweep_xi.empty() || !sweep_n.empty()) {
    const bool xi = !sweep_xi.empty();
    const std::string key = xi ? "signal_xi" : "n";
    std::vector<std::string> points;
    {
      std::istringstream is(xi ? sweep_xi : sweep_n);
      std::string tok;
      while (std::getline(is, tok, ',')) points.push_back(tok);
    }
    const std::string base = kv.count("scenario") ? kv["scenario"] : "sweep";
    const std::string out = kv.count("out") ? kv["out"] : "";
    kv.erase("out");
    int worst = 0;
    CsvWriter csv({"scenario", "method", "sweep_value", "rho", "avg_coverage",
                   "avg_length", "empirical_fdr", "avg_power", "reps",
                   "degenerate", "errors"});
    for (const auto& v : points) {
      auto kv2 = kv;
      kv2[key] = v;
      kv2["scenario"] = base + "_" + key + "_" + v;
      ScenarioConfig cfg = scenario_from_map(kv2);
      warn_if_disabled(cfg);
      ScenarioResult result = run_scenario(cfg);
      std::printf("scenario %s: %d replications, %d errored\n", cfg.name.c_str(),
                  cfg.reps, result.errored_reps);
      print_rows(result);
      worst = std::max(worst, result.exit_code());
      for (const auto& row : result.rows) {
        csv.add_row({row.scenario, row.method, v, format_double(row.rho),
                     format_double(row.avg_coverage), format_double(row.avg_length),
                     format_double(row.empirical_fdr), format_double(row.avg_power),
                     std::to_string(row.reps), std::to_string(row.degenerate),
                     std::to_string(row.errors)});
      }
    }
    if (!out.empty()) {
      csv.save(out);
      std::printf("sweep curve data written to %s\n", out.c_str());
    }
    return worst;
  }

  ScenarioConfig cfg = scenario_from_map(kv);
  warn_if_disabled(cfg);
  ScenarioResult result = run_scenario(cfg);
  std::printf("scenario %s: %d replications, %d errored\n", cfg.name.c_str(),
              cfg.reps, result.errored_reps);
  print_rows(result);
  if (!cfg.out_path.empty()) {
    std::printf("metrics written to %s (+ .manifest)\n", cfg.out_path.c_str());
  }
  return result.exit_code();
}

int cmd_simulate(std::map<std::string, std::string> kv) {
  kv["methods"] = "dp_corrected";  // unused; keeps parsing happy
  const auto it = kv.find("out");
  if (it == kv.end() || it->second.empty()) {
    std::fprintf(stderr, "simulate: --out is required\n");
    return 1;
  }
  const std::string out = it->second;
  ScenarioConfig cfg = scenario_from_map(kv);
  RandomStream rng(cfg.seed);
  GeneratedData g = generate(cfg.design, rng);
  dump_csv(g.data, out);
  double cx = 0.0;
  for (int i = 0; i < g.data.n(); ++i) {
    cx = std::max(cx, g.data.X.row(i).cwiseAbs().maxCoeff());
  }
  std::printf("wrote %s: n=%d p=%d true support size=%zu max|X|=%.4f seed=%llu\n",
              out.c_str(), g.data.n(), g.data.p(), g.support_true.size(), cx,
              static_cast<unsigned long long>(cfg.seed));
  return 0;
}

int cmd_estimate(const std::string& csv, const std::string& target,
                 std::map<std::string, std::string> kv) {
  Dataset data = ingest_csv(csv, target);
  maybe_pilot_R(kv, data,
                static_cast<std::uint64_t>(std::strtoull(
                    kv.count("seed") ? kv["seed"].c_str() : "1", nullptr, 10)),
                kv.count("noise") && kv["noise"] == "disabled"
                    ? NoiseMode::Disabled : NoiseMode::Calibrated);
  ScenarioConfig cfg = scenario_from_map(kv);
  warn_if_disabled(cfg);
  std::printf("loaded %s: n=%d p=%d\n", csv.c_str(), data.n(), data.p());
  const double delta = cfg.delta > 0.0 ? cfg.delta
                                       : std::pow(static_cast<double>(data.n()), -1.1);
  PrivacyBudget budget(cfg.epsilon, delta);
  RandomStream rng(cfg.seed);
  SparseEstimate est = adaptive_dp_regression(
      data, {cfg.epsilon, delta}, cfg.inference.regression, cfg.inference.adaptive,
      budget, rng);
  std::printf("selected k=%d (s=%d), bic=%.6g, support:", est.k, 1 << est.k,
              est.bic_value.value_or(0.0));
  for (int j : est.support) std::printf(" %d", j);
  std::printf("\nvalues:");
  for (int j : est.support) std::printf(" %.6g", est.beta[j]);
  std::printf("\nbudget charged: eps=%.12g delta=%.12g\n", budget.spent_epsilon(),
              budget.spent_delta());
  return 0;
}

int cmd_ci(const std::string& csv, const std::string& target, int j, double alpha,
           std::map<std::string, std::string> kv) {
  Dataset data = ingest_csv(csv, target);
  maybe_pilot_R(kv, data,
                static_cast<std::uint64_t>(std::strtoull(
                    kv.count("seed") ? kv["seed"].c_str() : "1", nullptr, 10)),
                kv.count("noise") && kv["noise"] == "disabled"
                    ? NoiseMode::Disabled : NoiseMode::Calibrated);
  ScenarioConfig cfg = scenario_from_map(kv);
  warn_if_disabled(cfg);
  const double delta = cfg.delta > 0.0 ? cfg.delta
                                       : std::pow(static_cast<double>(data.n()), -1.1);
  RandomStream rng(cfg.seed);
  InferenceResult res =
      dp_confidence_interval(data, j, alpha, cfg.epsilon, delta, cfg.inference, rng);
  std::printf("j=%d beta_db=%.6g sigma2=%.6g w_jj=%.6g V_hat=%.6g V_c=%.6g\n",
              res.j, res.beta_db, res.sigma2_hat, res.w_jj_hat, res.V_hat, res.V_c);
  std::printf("naive     CI: [%.6g, %.6g]\n", res.lo_naive, res.hi_naive);
  std::printf("corrected CI: [%.6g, %.6g]%s\n", res.lo_corr, res.hi_corr,
              res.degenerate ? "  (degenerate plug-in variance; V_c-only interval)"
                             : "");
  std::printf("budget charged: eps=%.12g delta=%.12g\n", res.eps_charged,
              res.delta_charged);
  return 0;
}

int cmd_fdr(const std::string& csv, const std::string& target,
            std::map<std::string, std::string> kv) {
  Dataset data = ingest_csv(csv, target);
  maybe_pilot_R(kv, data,
                static_cast<std::uint64_t>(std::strtoull(
                    kv.count("seed") ? kv["seed"].c_str() : "1", nullptr, 10)),
                kv.count("noise") && kv["noise"] == "disabled"
                    ? NoiseMode::Disabled : NoiseMode::Calibrated);
  ScenarioConfig cfg = scenario_from_map(kv);
  warn_if_disabled(cfg);
  const double delta = cfg.delta > 0.0 ? cfg.delta
                                       : std::pow(static_cast<double>(data.n()), -1.1);
  // Dataset-driven lower bounds for B1/B2 when not supplied.
  MirrorConfig mirror = cfg.mirror;
  {
    const int n1 = data.n() - data.n() / 2;
    const int K =
        adaptive_sparsity_exponent(n1, data.p(), cfg.inference.adaptive);
    const double K_A = std::pow(2.0, K);
    const auto& iht = cfg.inference.regression;
    if (mirror.B1 <= 0.0) mirror.B1 = 4.0 * K_A * iht.c_x * iht.c_x / data.n();
    if (mirror.B2 <= 0.0) {
      mirror.B2 = 4.0 * iht.R * std::sqrt(K_A) * iht.c_x / data.n();
    }
  }
  RandomStream rng(cfg.seed);
  FdrSelection sel =
      dp_fdr_pipeline(data, cfg.inference.regression, cfg.inference.adaptive, mirror,
                      cfg.epsilon, delta, std::nullopt, rng);
  std::printf("stage-1 support size: %zu, tau=%.6g, selected %zu:",
              sel.support_A.size(), sel.tau, sel.selected.size());
  for (int j : sel.selected) std::printf(" %d", j);
  std::printf("\nbudget charged: eps=%.12g delta=%.12g\n", sel.eps_charged,
              sel.delta_charged);
  return 0;
}

int cmd_noise_calc(double epsilon, double delta, double l1, double l2, double lambda,
                   int s, int k) {
  if (l1 > 0.0) {
    std::printf("laplace mechanism scale (Delta1/eps): %.10g\n",
                laplace_mechanism_scale(l1, epsilon));
  }
  if (l2 > 0.0) {
    std::printf("gaussian mechanism std (sqrt(2 log(1.25/delta)) Delta2/eps): %.10g\n",
                gaussian_mechanism_std(l2, epsilon, delta));
  }
  if (lambda > 0.0 && s > 0) {
    NoisyHtParams params;
    params.s = s;
    params.epsilon = epsilon;
    params.delta = delta;
    params.lambda = lambda;
    std::printf("peeling per-round Laplace scale: %.10g\n", noisy_ht_scale(params));
  }
  if (k > 0) {
    std::printf("advanced composition epsilon' for k=%d steps: %.10g\n", k,
                advanced_composition_epsilon(epsilon, k, delta));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpreg: differentially private sparse regression, inference and FDR control"};
  app.require_subcommand(1);

  std::map<std::string, std::string> kv;
  std::string config_path, replay_path, csv_path, target = "y";
  int j = 0;
  double alpha = 0.05;
  double l1 = 0.0, l2 = 0.0, lambda = 0.0;
  int s = 0, k = 0;
  double eps = 1.0, delta = 1e-6;

  std::string sweep_xi, sweep_n;
  auto* bench = app.add_subcommand("bench", "run a scenario file");
  bench->add_option("--config", config_path, "scenario key=value file");
  bench->add_option("--replay", replay_path, "replay a run manifest");
  bench->add_option("--sweep_xi", sweep_xi, "signal-variance sweep (comma list)");
  bench->add_option("--sweep_n", sweep_n, "sample-size sweep (comma list)");
  add_common_estimator_flags(bench, kv);

  auto* simulate = app.add_subcommand("simulate", "generate and dump a dataset");
  add_common_estimator_flags(simulate, kv);

  auto* estimate = app.add_subcommand("estimate", "adaptive DP sparse regression on a CSV");
  estimate->add_option("--data", csv_path, "input CSV")->required();
  estimate->add_option("--target", target, "response column name");
  add_common_estimator_flags(estimate, kv);

  auto* ci = app.add_subcommand("ci", "DP confidence interval for one coordinate");
  ci->add_option("--data", csv_path, "input CSV")->required();
  ci->add_option("--target", target, "response column name");
  ci->add_option("--j", j, "coordinate (0-based)")->required();
  ci->add_option("--ci-alpha", alpha, "two-sided level");
  add_common_estimator_flags(ci, kv);

  auto* fdr = app.add_subcommand("fdr", "DP mirror-statistic selection on a CSV");
  fdr->add_option("--data", csv_path, "input CSV")->required();
  fdr->add_option("--target", target, "response column name");
  add_common_estimator_flags(fdr, kv);

  auto* nc = app.add_subcommand("noise-calc", "mechanism noise calculator");
  nc->add_option("--epsilon", eps);
  nc->add_option("--delta", delta);
  nc->add_option("--l1-sensitivity", l1);
  nc->add_option("--l2-sensitivity", l2);
  nc->add_option("--lambda", lambda, "peeling per-entry sensitivity");
  nc->add_option("--s", s, "peeling sparsity");
  nc->add_option("--k", k, "advanced-composition fold count");

  try {
    app.parse(argc, argv);
    if (bench->parsed()) {
      return cmd_bench(config_path, replay_path, sweep_xi, sweep_n, kv);
    }
    if (simulate->parsed()) return cmd_simulate(kv);
    if (estimate->parsed()) return cmd_estimate(csv_path, target, kv);
    if (ci->parsed()) return cmd_ci(csv_path, target, j, alpha, kv);
    if (fdr->parsed()) return cmd_fdr(csv_path, target, kv);
    if (nc->parsed()) return cmd_noise_calc(eps, delta, l1, l2, lambda, s, k);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
