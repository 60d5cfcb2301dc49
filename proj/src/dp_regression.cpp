#include "dpreg/dp_regression.hpp"

#include <cmath>

namespace dpreg {

namespace {

void check_partition(const std::vector<std::vector<int>>& splits, int n) {
  std::vector<char> seen(n, 0);
  int total = 0;
  for (const auto& s : splits) {
    total += static_cast<int>(s.size());
    for (int i : s) {
      if (i < 0 || i >= n || seen[i]) {
        throw InvalidParameter("splits do not partition the row index set");
      }
      seen[i] = 1;
    }
  }
  if (total != n) throw InvalidParameter("splits do not cover all rows");
}

void check_iterate(const Vector& beta, int s, double C) {
  int nnz = 0;
  for (int j = 0; j < beta.size(); ++j) nnz += beta[j] != 0.0;
  if (nnz > s || beta.norm() > C * (1.0 + 1e-9) + 1e-12) {
    throw std::logic_error("IHT iterate violates sparsity/feasibility invariant");
  }
}

SparseEstimate finish_estimate(const Vector& beta, int k) {
  SparseEstimate est;
  est.beta = beta;
  for (int j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) est.support.push_back(j);
  }
  est.k = k;
  return est;
}

}  // namespace

Vector clipped_gradient(const Vector& beta, const Dataset& data,
                        const std::vector<int>& rows, double eta0, double R) {
  if (rows.empty()) throw InvalidParameter("clipped_gradient: empty row slice");
  const std::vector<int> support = nonzero_support(beta);
  Vector g = Vector::Zero(beta.size());
  for (int i : rows) {
    const double pred = clip_scalar(dot_on_support(data.X, i, support, beta), R);
    const double resp = clip_scalar(data.y[i], R);
    g.noalias() += (pred - resp) * data.X.row(i).transpose();
  }
  return beta - (eta0 / static_cast<double>(rows.size())) * g;
}

SparseEstimate dp_iht_core(const Dataset& data, int s, const BudgetSlice& per_call,
                           const IhtConfig& cfg, const Vector& beta0,
                           const std::vector<std::vector<int>>& splits,
                           PrivacyBudget& budget, RandomStream& rng) {
  data.validate();
  if (s < 1 || s > data.p()) throw InvalidParameter("dp_iht: s must be in [1, p]");
  check_partition(splits, data.n());

  const double eta0 = cfg.step_size();
  const double lambda = eta0 * cfg.regression_B() / data.n();
  NoisyHtParams ht;
  ht.s = s;
  ht.epsilon = per_call.epsilon;
  ht.delta = per_call.delta;
  ht.lambda = lambda;
  ht.noise_mode = cfg.noise_mode;

  Vector beta = beta0.size() == data.p() ? beta0 : Vector::Zero(data.p());
  for (const auto& rows : splits) {
    Vector half = clipped_gradient(beta, data, rows, eta0, cfg.R);
    budget.charge(per_call.epsilon, per_call.delta);
    SparseSelection sel = noisy_hard_threshold(half, ht, rng);
    beta = project_l2(sel.dense, cfg.C);
    check_iterate(beta, s, cfg.C);
  }
  return finish_estimate(beta, -1);
}

SparseEstimate dp_iht_fixed_sparsity(const Dataset& data, int s,
                                     const BudgetSlice& slice, const IhtConfig& cfg,
                                     const Vector& beta0, PrivacyBudget& budget,
                                     RandomStream& rng) {
  auto splits = split_rows(data.n(), cfg.T, rng);
  const BudgetSlice per_call{slice.epsilon / cfg.T, slice.delta / cfg.T};
  return dp_iht_core(data, s, per_call, cfg, beta0, splits, budget, rng);
}

SparseEstimate dp_bic_select(const Dataset& data,
                             const std::vector<SparseEstimate>& candidates,
                             double eps_slice, double R, double c0,
                             double penalty_eps, double penalty_delta,
                             NoiseMode noise_mode, PrivacyBudget& budget,
                             RandomStream& rng) {
  if (candidates.empty()) throw InvalidParameter("dp_bic_select: empty candidate list");
  const double n = data.n();
  const double logp = std::log(static_cast<double>(data.p()));
  const double logn = std::log(n);
  const double log7n = std::pow(logn, 7);
  const double scale = 2.0 * (4.0 * R) * (4.0 * R) / eps_slice;
  budget.charge(eps_slice, 0.0);

  int best = -1;
  double best_score = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& cand = candidates[c];
    double rss = 0.0;
    for (int i = 0; i < data.n(); ++i) {
      const double r = clip_scalar(data.y[i], R) -
                       clip_scalar(dot_on_support(data.X, i, cand.support, cand.beta), R);
      rss += r * r;
    }
    const double two_k = std::pow(2.0, cand.k);
    const double penalty =
        c0 * (logp * logn * two_k +
              logp * logp * two_k * two_k * std::log(1.0 / penalty_delta) * log7n /
                  (n * penalty_eps * penalty_eps));
    const double z = laplace_noise(scale, 1, noise_mode, rng)[0];
    const double score = rss + penalty + z;
    if (best < 0 || score < best_score) {
      best = static_cast<int>(c);
      best_score = score;
    }
  }
  SparseEstimate out = candidates[best];
  out.bic_value = best_score;
  return out;
}

int adaptive_sparsity_exponent(int n, int p, const AdaptiveConfig& acfg) {
  if (acfg.force_K >= 0) return std::min(acfg.force_K, acfg.max_K);
  const double logp = acfg.log_base > 0.0
                          ? std::log(static_cast<double>(p)) / std::log(acfg.log_base)
                          : std::log(static_cast<double>(p));
  const int K = static_cast<int>(
      std::floor(std::log2(std::sqrt(static_cast<double>(n)) / (logp * logp))));
  if (K < 0) {
    throw InvalidParameter(
        "adaptive sparsity search: K = floor(log2(sqrt(n)/log^2 p)) is negative at "
        "this (n, p); use fixed-sparsity mode or force K explicitly");
  }
  return std::min(K, acfg.max_K);
}

SparseEstimate adaptive_dp_regression(const Dataset& data, const BudgetSlice& slice,
                                      const IhtConfig& cfg, const AdaptiveConfig& acfg,
                                      PrivacyBudget& budget, RandomStream& rng) {
  data.validate();
  const int K = adaptive_sparsity_exponent(data.n(), data.p(), acfg);
  const BudgetSlice per_call{slice.epsilon / (cfg.T * (K + 2)),
                             slice.delta / (cfg.T * (K + 1))};
  auto splits = split_rows(data.n(), cfg.T, rng);
  const Vector beta0 = Vector::Zero(data.p());

  std::vector<SparseEstimate> candidates;
  for (int k = 0; k <= K; ++k) {
    const int s = 1 << k;
    if (s > data.p()) break;  // larger candidates cannot be represented
    SparseEstimate est =
        dp_iht_core(data, s, per_call, cfg, beta0, splits, budget, rng);
    est.k = k;
    candidates.push_back(std::move(est));
  }
  return dp_bic_select(data, candidates, slice.epsilon / (K + 2), cfg.R, acfg.c0,
                       slice.epsilon, slice.delta, cfg.noise_mode, budget, rng);
}

}  // namespace dpreg
