#pragma once

#include "dpreg/dp_regression.hpp"

namespace dpreg {

// Estimation of w_j, the j-th column of the precision matrix Sigma^{-1},
// by private IHT on the quadratic loss (1/2) w' Sigma_hat w - w' e_j.
//
// The printed half-step is w - eta0 (e_j - sum_i x_i clip(x_i' w) / |S_t|),
// which ascends that loss; its fixed point is not Sigma_hat w = e_j. The
// `descent` sign (default) flips the bracket so the fixed point is correct;
// `literal` reproduces the printed formula.
enum class GradientSign { Descent, Literal };

struct PrecisionConfig {
  IhtConfig iht;                 // R default 2 L sqrt(log n); B default 2 (L c_x) c_x
  GradientSign gradient_sign = GradientSign::Descent;

  double precision_B(int /*n*/) const {
    return iht.B > 0.0 ? iht.B : 2.0 * (iht.L * iht.c_x) * iht.c_x;
  }
};

struct PrecisionColumnEstimate {
  int j = 0;
  Vector w;                      // length p, zero off support
  std::vector<int> support;      // sorted
  int k = -1;                    // sparsity exponent, -1 in fixed mode
  std::optional<double> bic_value;
};

// One half-step of the quadratic-loss iteration over the given rows.
Vector precision_gradient(const Vector& w, const Dataset& data,
                          const std::vector<int>& rows, int j, double eta0,
                          double R, GradientSign sign = GradientSign::Descent);

// Fixed-sparsity variant: T random splits, per-step budget
// (slice.epsilon/T, slice.delta/T), NoisyHT scale eta0 * B / n, projection to
// the C-ball. w starts at w0 when given, else at e_j.
PrecisionColumnEstimate dp_precision_fixed(const Dataset& data, int j, int s_star,
                                           const BudgetSlice& slice,
                                           const PrecisionConfig& cfg,
                                           PrivacyBudget& budget, RandomStream& rng,
                                           const Vector* w0 = nullptr);

// Adaptive variant: candidates k = 0..K with per-step budget
// (eps/{T(K+2)}, delta/{T(K+1)}), selected by the quadratic-loss BIC
//   n (w' Sigma_hat w / 2 - w' e_j)
//   + c0 { log(p) log(n) 2^k + log^2(p) 2^{2k} log(1/delta) log^7(n) / (n^2 eps^2) }
//   + z_k,   z_k ~ Laplace(R^2 (K+2) / eps),
// with Sigma_hat = X'X/n computed once on the full data.
PrecisionColumnEstimate adaptive_dp_precision(const Dataset& data, int j,
                                              const BudgetSlice& slice,
                                              const PrecisionConfig& cfg,
                                              const AdaptiveConfig& acfg,
                                              PrivacyBudget& budget,
                                              RandomStream& rng);

}  // namespace dpreg
