#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpreg/baselines.hpp"
#include "dpreg/dp_inference.hpp"
#include "dpreg/report.hpp"
#include "dpreg/synth_data.hpp"

namespace dpreg {

// A scenario = one synthetic design + a method set + a replication loop.
// Everything needed to reproduce the run byte for byte lives here.
struct ScenarioConfig {
  std::string name = "scenario";
  DesignSpec design;
  std::vector<std::string> methods;  // dp_corrected dp_naive db_lasso dp_fdr nonprivate_fdr
  double epsilon = 0.5;
  double delta = 0.0;        // <= 0: auto n^{-1.1}
  int reps = 1;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  int workers = 0;           // 0: DPREG_WORKERS env or hardware count
  bool redraw_design = true; // false: X and beta fixed, errors redrawn per rep
  std::string out_path;      // metrics CSV ("" = don't write)
  std::string details_path;  // per-replication CSV ("" = don't write)

  InferenceConfig inference;     // regression / precision / adaptive settings
  MirrorConfig mirror;           // FDR settings (B1/B2 <= 0: lemma lower bounds)
  baselines::LassoConfig lasso;  // stage-1 lasso of the non-private pipeline
  baselines::DebiasedLassoConfig db_lasso;

  std::vector<int> tracked;      // CI coordinates for the DP methods; empty = all
  std::vector<int> tracked_db;   // CI coordinates for DB-Lasso; empty = tracked

  double resolved_delta() const {
    return delta > 0.0 ? delta : std::pow(static_cast<double>(design.n), -1.1);
  }
};

struct MetricsRow {
  std::string scenario;
  std::string method;
  double rho = 0.0;
  double avg_coverage = 0.0;
  double avg_length = 0.0;
  double empirical_fdr = 0.0;
  double avg_power = 0.0;
  int reps = 0;
  int degenerate = 0;            // flagged CI results / degenerate refits
  int errors = 0;                // replications that threw
  double eps_charged = 0.0;      // per-replication charge (should equal epsilon)
  double delta_charged = 0.0;
  double max_budget_gap = 0.0;   // max |charged - configured| over reps
};

// Per-replication details kept for auditing and the acceptance gates.
struct RepDetail {
  int rep = 0;
  // FDR pipelines
  double fdp = 0.0, power = 0.0, tau = 0.0;
  int support_size = 0, selected_size = 0;
  bool ratio_ok = true;          // #{M < -tau}/max(#{M > tau},1) <= q
  bool stage1_empty = false;
  bool errored = false;
};

struct MethodSummary {
  MetricsRow row;
  std::vector<RepDetail> reps;   // FDR methods only
};

struct ScenarioResult {
  std::vector<MetricsRow> rows;
  std::map<std::string, MethodSummary> methods;
  RunManifest manifest;
  int errored_reps = 0;

  // exit codes: 0 ok, 2 when more than 10% of replications errored
  int exit_code() const;
};

// Executes the replication loop (concurrently up to the worker count, with a
// deterministic by-rep-index reduction), aggregates metrics, and writes the
// metrics CSV + manifest when paths are set.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Scenario parsing from the simple key=value format (flags in the CLI
// override file entries before this is called).
ScenarioConfig scenario_from_map(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> scenario_to_map(const ScenarioConfig& cfg);

// Rectangular numeric CSV with a header row; the named column becomes y.
// Parse failures carry the 1-based line number.
Dataset ingest_csv(const std::string& path, const std::string& target_column);
void dump_csv(const Dataset& data, const std::string& path);

int resolve_workers(int configured);

}  // namespace dpreg
