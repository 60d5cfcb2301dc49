#pragma once

#include <optional>
#include <vector>

#include "dpreg/dataset.hpp"
#include "dpreg/noisy_ht.hpp"

namespace dpreg {

// Configuration of one private IHT fit. The defaults follow the tuning the
// analysis prescribes: eta0 = 1/(6L) and, for the regression loss,
// B = 2(R + C c_x) c_x when c_x is supplied (so B >= 4 R c_x holds).
struct IhtConfig {
  double eta0 = 0.0;   // step size; <= 0 derives 1/(6L)
  int T = 10;          // iterations == data splits; each split used once
  double R = 1.0;      // scalar truncation level
  double C = 1.0;      // l2 feasibility radius
  double B = 0.0;      // gradient noise scale base; <= 0 derives the default
  double L = 1.0;      // covariance eigenvalue bound (drives eta0 default)
  double c_x = 0.0;    // covariate sup-norm bound (drives B default)
  NoiseMode noise_mode = NoiseMode::Calibrated;

  double step_size() const { return eta0 > 0.0 ? eta0 : 1.0 / (6.0 * L); }
  double regression_B() const { return B > 0.0 ? B : 2.0 * (R + C * c_x) * c_x; }
};

// Sparsity-search settings for the adaptive (BIC) fits.
struct AdaptiveConfig {
  double c0 = 1.0;        // BIC penalty constant
  double log_base = 0.0;  // base of log^2 p inside the K formula; 0 = natural
  int force_K = -1;       // >= 0 overrides the K formula
  int max_K = 12;         // runtime clamp
};

struct SparseEstimate {
  Vector beta;                    // length p, zero off support
  std::vector<int> support;       // sorted
  int k = -1;                     // log2 of the sparsity candidate; -1 = fixed mode
  std::optional<double> bic_value;
};

// One clipped gradient half-step over the given rows:
//   beta - (eta0/|rows|) sum_i (clip(x_i' beta, R) - clip(y_i, R)) x_i.
Vector clipped_gradient(const Vector& beta, const Dataset& data,
                        const std::vector<int>& rows, double eta0, double R);

// T-step private IHT at fixed sparsity with the given per-NoisyHT budget and
// pre-made splits. Every iterate is projected to the C-ball and kept s-sparse;
// the per-call noise scale is eta0 * B / n. Charges per_call to `budget` once
// per iteration.
SparseEstimate dp_iht_core(const Dataset& data, int s, const BudgetSlice& per_call,
                           const IhtConfig& cfg, const Vector& beta0,
                           const std::vector<std::vector<int>>& splits,
                           PrivacyBudget& budget, RandomStream& rng);

// Standalone fixed-sparsity fit: random T splits, per-call budget
// (slice.epsilon/T, slice.delta/T).
SparseEstimate dp_iht_fixed_sparsity(const Dataset& data, int s,
                                     const BudgetSlice& slice, const IhtConfig& cfg,
                                     const Vector& beta0, PrivacyBudget& budget,
                                     RandomStream& rng);

// Noisy BIC selection across candidates indexed by k = 0..K:
//   sum_i (clip(y_i) - clip(x_i' beta(k)))^2
//   + c0 { log(p) log(n) 2^k + log^2(p) 2^{2k} log(1/delta) log^7(n) / (n eps^2) }
//   + z_k,   z_k ~ Laplace(2 (4R)^2 / eps_slice).
// penalty_eps/penalty_delta are the (epsilon, delta) totals of the adaptive
// run, which the printed penalty references. Charges (eps_slice, 0).
SparseEstimate dp_bic_select(const Dataset& data,
                             const std::vector<SparseEstimate>& candidates,
                             double eps_slice, double R, double c0,
                             double penalty_eps, double penalty_delta,
                             NoiseMode noise_mode, PrivacyBudget& budget,
                             RandomStream& rng);

// K = floor(log2(sqrt(n) / log^2 p)), with the log base configurable and an
// override for forced K; throws InvalidParameter when the formula is negative
// and no override is given (the caller is pointed at fixed-sparsity mode).
int adaptive_sparsity_exponent(int n, int p, const AdaptiveConfig& acfg);

// Algorithm: candidates s = 2^k for k = 0..K from a shared zero initial
// value, per-call NoisyHT budget (eps/{T(K+2)}, delta/{T(K+1)}), then noisy
// BIC selection at eps/(K+2). Total charge is exactly (slice.epsilon,
// slice.delta).
SparseEstimate adaptive_dp_regression(const Dataset& data, const BudgetSlice& slice,
                                      const IhtConfig& cfg, const AdaptiveConfig& acfg,
                                      PrivacyBudget& budget, RandomStream& rng);

}  // namespace dpreg
