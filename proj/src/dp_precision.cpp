#include "dpreg/dp_precision.hpp"

#include <cmath>

namespace dpreg {

namespace {

PrecisionColumnEstimate finish(const Vector& w, int j, int k) {
  PrecisionColumnEstimate est;
  est.j = j;
  est.w = w;
  for (int q = 0; q < w.size(); ++q) {
    if (w[q] != 0.0) est.support.push_back(q);
  }
  est.k = k;
  return est;
}

Vector iterate(const Dataset& data, int j, int s, const BudgetSlice& per_call,
               const PrecisionConfig& cfg, const std::vector<std::vector<int>>& splits,
               PrivacyBudget& budget, RandomStream& rng, const Vector* w0 = nullptr) {
  const double eta0 = cfg.iht.step_size();
  NoisyHtParams ht;
  ht.s = s;
  ht.epsilon = per_call.epsilon;
  ht.delta = per_call.delta;
  ht.lambda = eta0 * cfg.precision_B(data.n()) / data.n();
  ht.noise_mode = cfg.iht.noise_mode;

  Vector w;
  if (w0 && w0->size() == data.p()) {
    w = *w0;
  } else {
    w = Vector::Zero(data.p());
    w[j] = 1.0;  // e_j: feasible for C > 1 and exact in the identity case
  }
  for (const auto& rows : splits) {
    Vector half = precision_gradient(w, data, rows, j, eta0, cfg.iht.R,
                                     cfg.gradient_sign);
    budget.charge(per_call.epsilon, per_call.delta);
    SparseSelection sel = noisy_hard_threshold(half, ht, rng);
    w = project_l2(sel.dense, cfg.iht.C);
  }
  return w;
}

}  // namespace

Vector precision_gradient(const Vector& w, const Dataset& data,
                          const std::vector<int>& rows, int j, double eta0,
                          double R, GradientSign sign) {
  if (rows.empty()) throw InvalidParameter("precision_gradient: empty row slice");
  if (j < 0 || j >= data.p()) throw InvalidParameter("precision_gradient: bad column");
  const std::vector<int> support = nonzero_support(w);
  Vector sigma_w = Vector::Zero(w.size());
  for (int i : rows) {
    sigma_w.noalias() +=
        clip_scalar(dot_on_support(data.X, i, support, w), R) *
        data.X.row(i).transpose();
  }
  sigma_w /= static_cast<double>(rows.size());
  Vector bracket = -sigma_w;
  bracket[j] += 1.0;  // e_j - Sigma_hat_clip w
  if (sign == GradientSign::Literal) return w - eta0 * bracket;
  return w + eta0 * bracket;  // descent on (1/2) w'Sigma w - w'e_j
}

PrecisionColumnEstimate dp_precision_fixed(const Dataset& data, int j, int s_star,
                                           const BudgetSlice& slice,
                                           const PrecisionConfig& cfg,
                                           PrivacyBudget& budget, RandomStream& rng,
                                           const Vector* w0) {
  data.validate();
  if (s_star < 1 || s_star > data.p()) {
    throw InvalidParameter("dp_precision_fixed: s_star must be in [1, p]");
  }
  auto splits = split_rows(data.n(), cfg.iht.T, rng);
  const BudgetSlice per_call{slice.epsilon / cfg.iht.T, slice.delta / cfg.iht.T};
  Vector w = iterate(data, j, s_star, per_call, cfg, splits, budget, rng, w0);
  return finish(w, j, -1);
}

PrecisionColumnEstimate adaptive_dp_precision(const Dataset& data, int j,
                                              const BudgetSlice& slice,
                                              const PrecisionConfig& cfg,
                                              const AdaptiveConfig& acfg,
                                              PrivacyBudget& budget,
                                              RandomStream& rng) {
  data.validate();
  const int K = adaptive_sparsity_exponent(data.n(), data.p(), acfg);
  const BudgetSlice per_call{slice.epsilon / (cfg.iht.T * (K + 2)),
                             slice.delta / (cfg.iht.T * (K + 1))};
  auto splits = split_rows(data.n(), cfg.iht.T, rng);

  std::vector<PrecisionColumnEstimate> candidates;
  for (int k = 0; k <= K; ++k) {
    const int s = 1 << k;
    if (s > data.p()) break;
    Vector w = iterate(data, j, s, per_call, cfg, splits, budget, rng);
    PrecisionColumnEstimate est = finish(w, j, k);
    candidates.push_back(std::move(est));
  }

  // Quadratic-loss BIC on the full-data Gram: w' Sigma_hat w is evaluated as
  // ||X w||^2 / n over the sparse support, never forming the p x p matrix.
  const double n = data.n();
  const double logp = std::log(static_cast<double>(data.p()));
  const double logn = std::log(n);
  const double log7n = std::pow(logn, 7);
  const double eps_slice = slice.epsilon / (K + 2);
  const double scale = cfg.iht.R * cfg.iht.R / eps_slice;
  budget.charge(eps_slice, 0.0);

  int best = -1;
  double best_score = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Vector& w = candidates[c].w;
    double xw_sq = 0.0;
    for (int i = 0; i < data.n(); ++i) {
      const double xw = dot_on_support(data.X, i, candidates[c].support, w);
      xw_sq += xw * xw;
    }
    const double loss = n * (0.5 * xw_sq / n - w[j]);
    const double two_k = std::pow(2.0, candidates[c].k);
    const double penalty =
        acfg.c0 * (logp * logn * two_k +
                   logp * logp * two_k * two_k * std::log(1.0 / slice.delta) * log7n /
                       (n * n * slice.epsilon * slice.epsilon));
    const double z = laplace_noise(scale, 1, cfg.iht.noise_mode, rng)[0];
    const double score = loss + penalty + z;
    if (best < 0 || score < best_score) {
      best = static_cast<int>(c);
      best_score = score;
    }
  }
  PrecisionColumnEstimate out = candidates[best];
  out.bic_value = best_score;
  return out;
}

}  // namespace dpreg
