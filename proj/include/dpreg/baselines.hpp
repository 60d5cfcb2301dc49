#pragma once

#include <optional>

#include "dpreg/dp_fdr.hpp"

namespace dpreg {
namespace baselines {

// Non-private reference methods: coordinate-descent Lasso, OLS, the classical
// debiased Lasso, a deterministic IHT twin of the private solver, and the
// plain data-splitting mirror-FDR pipeline. These serve as comparison columns
// in the benchmarks and as oracles for the zero-noise equivalence tests.

struct LassoConfig {
  std::optional<double> lambda;  // absent => 5-fold cross-validation
  int max_iter = 1000;           // full passes
  double tol = 1e-7;             // KKT tolerance
  int cv_folds = 5;
  int cv_grid = 50;              // log-spaced grid between lambda_max and
  double cv_grid_min_ratio = 1e-2;  // lambda_max * ratio
};

struct LassoResult {
  Vector beta;
  double lambda = 0.0;
  bool converged = true;
  double kkt_residual = 0.0;
};

// Cyclic coordinate descent on (1/2n)||y - X beta||^2 + lambda ||beta||_1.
LassoResult lasso(const Dataset& data, const LassoConfig& cfg, RandomStream& rng);
LassoResult lasso_at(const Dataset& data, double lambda, int max_iter, double tol,
                     const Vector* warm = nullptr);

// Deterministic fold assignment derived from the stream.
double cross_validated_lambda(const Dataset& data, const LassoConfig& cfg,
                              RandomStream& rng);

Vector ols(const Matrix& X, const Vector& y);

// Exact OLS restricted to columns A.
Vector ols_on_support(const Dataset& data, const std::vector<int>& A);

// Classical debiasing correction beta_j + w' X' (y - X beta) / n. Written
// directly from the formula; the private path must reduce to this when noise
// and clipping are off.
double debias_correction(const Dataset& data, const Vector& beta, const Vector& w,
                         int j);

struct CiResult {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double sigma2 = 0.0;
  double variance = 0.0;  // plug-in variance of the point estimate (times n)
};

struct DebiasedLassoConfig {
  LassoConfig main;
  std::optional<double> lambda_node;  // absent => node_scale * sqrt(log p / n)
  double node_scale = 1.0;
  int max_iter = 1000;
  double tol = 1e-7;
  // Unpenalized node-wise regression (p < n only): the precision column is a
  // column of the Gram inverse and the remainder bias vanishes exactly.
  bool nodewise_ols = false;
};

// Debiased Lasso interval for beta_j via node-wise regression.
CiResult debiased_lasso_ci(const Dataset& data, int j, double alpha,
                           const DebiasedLassoConfig& cfg, RandomStream& rng);

// Node-wise precision column for beta_j (exposed for reuse across j loops).
Vector nodewise_precision_column(const Dataset& data, int j, double lambda_node,
                                 int max_iter, double tol);

// All unpenalized node-wise columns at once: the inverse of X'X/n.
Matrix gram_inverse(const Dataset& data);

// Deterministic IHT twin: same half-step / hard-threshold / projection
// schedule as the private solver with all noise removed. Ties in the
// threshold break to the lowest index.
Vector iht_fit(const Dataset& data, int s, const IhtConfig& cfg,
               const std::vector<std::vector<int>>& splits, const Vector& beta0);

struct IhtBicFit {
  Vector beta;
  int k = -1;
};

// Adaptive (BIC) twin of the private sparsity search, noise-free. When
// penalty_eps > 0 the BIC penalty includes the same privacy term the private
// selector scores with, so a zero-noise private run and this twin make
// identical selections.
IhtBicFit iht_bic_fit(const Dataset& data, const IhtConfig& cfg,
                      const AdaptiveConfig& acfg, RandomStream& rng,
                      double penalty_eps = 0.0, double penalty_delta = 0.0);

enum class Stage1 { Lasso, Iht };

// Plain data-splitting mirror pipeline: split halves, fit stage 1 (Lasso or
// the deterministic IHT twin), exact OLS refit on the second half, then the
// shared mirror/cutoff machinery. stage1_eps/delta feed the IHT twin's BIC
// penalty when mirroring a private run.
FdrSelection nonprivate_mirror_fdr(const Dataset& data, double q, MirrorKind f_kind,
                                   Stage1 stage1, const IhtConfig& iht_cfg,
                                   const AdaptiveConfig& acfg, const LassoConfig& lcfg,
                                   const std::optional<std::vector<int>>& truth,
                                   RandomStream& rng, double stage1_eps = 0.0,
                                   double stage1_delta = 0.0);

}  // namespace baselines
}  // namespace dpreg
