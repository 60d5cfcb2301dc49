#pragma once

#include "dpreg/dp_precision.hpp"
#include "dpreg/dp_regression.hpp"

namespace dpreg {

// Bundle for the four-step confidence interval pipeline. Steps 3 and 4
// (debiasing and sigma^2) clip at regression.R; the precision stage carries
// its own truncation level inside precision.iht.
struct InferenceConfig {
  IhtConfig regression;
  PrecisionConfig precision;
  AdaptiveConfig adaptive;
};

struct InferenceResult {
  int j = 0;
  double beta_db = 0.0;       // debiased point estimate
  double sigma2_hat = 0.0;    // noisy sigma^2, raw (may be negative)
  double w_jj_hat = 0.0;
  double V_hat = 0.0;         // w_jj_hat * sigma2_hat (raw product)
  double V_c = 0.0;           // variance of the injected Gaussian z_j
  double alpha = 0.05;
  double lo_naive = 0.0, hi_naive = 0.0;
  double lo_corr = 0.0, hi_corr = 0.0;
  bool degenerate = false;    // sigma2_hat < 0 or w_jj_hat <= 0
  double eps_charged = 0.0;
  double delta_charged = 0.0;
};

// Variance of the Gaussian injected into the debiased estimate for a step
// running on its own (eps, delta) slice: (4R^2/n)^2 * 2 log(1.25/delta) / eps^2.
// The four-way-split pipeline passes (eps/4, delta/4), which reproduces the
// 16 * (4R^2/n)^2 * 2 log(4*1.25/delta) / eps^2 constants.
double debias_noise_variance(double R, int n, const BudgetSlice& slice);

// Noise std for the private sigma^2 release on its own slice:
// (2(2R)^2/n) * sqrt(2 log(1.25/delta)) / eps.
double sigma2_noise_std(double R, int n, const BudgetSlice& slice);

// beta_hat_j + (1/n) sum_i clip(x_i' w_hat, R) (clip(y_i, R) - clip(x_i' beta_hat, R)) + z_j,
// z_j ~ N(0, debias_noise_variance). Charges the slice.
double debias(const Dataset& data, const SparseEstimate& beta_hat,
              const PrecisionColumnEstimate& w_hat, double R,
              const BudgetSlice& slice, NoiseMode mode, PrivacyBudget& budget,
              RandomStream& rng);

// (1/n) sum_i (clip(y_i,R) - clip(x_i' beta_hat,R))^2 + Z. Returns the raw
// value; callers clamp at zero before taking square roots.
double dp_sigma2(const Dataset& data, const SparseEstimate& beta_hat, double R,
                 const BudgetSlice& slice, NoiseMode mode, PrivacyBudget& budget,
                 RandomStream& rng);

// Full Algorithm: adaptive regression, adaptive precision for column j,
// debiasing, sigma^2 — each step on (eps/4, delta/4) — then
//   naive:     beta_db +- z_{alpha/2} sqrt(V_hat / n)
//   corrected: beta_db +- z_{alpha/2} sqrt(V_hat / n + V_c).
// A degenerate plug-in variance (sigma2 < 0 or w_jj <= 0) is flagged and the
// intervals fall back to V_c alone rather than aborting.
InferenceResult dp_confidence_interval(const Dataset& data, int j, double alpha,
                                       double epsilon, double delta,
                                       const InferenceConfig& cfg, RandomStream& rng);

// Explicit opt-in shared-budget semantics for multiple coordinates: the
// regression fit and sigma^2 release run once on their (eps/4, delta/4)
// slices and are reused across all requested columns, while the precision
// and debiasing steps run per column on fresh (eps/4, delta/4) slices. The
// total charge is (eps/4, delta/4) * (2 + 2 |js|), reported per result. The
// default, literal per-column pipeline is dp_confidence_interval.
std::vector<InferenceResult> dp_confidence_intervals_shared(
    const Dataset& data, const std::vector<int>& js, double alpha, double epsilon,
    double delta, const InferenceConfig& cfg, RandomStream& rng);

}  // namespace dpreg
