#include "dpreg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dpreg {
namespace baselines {

namespace {

inline double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

double kkt_residual(const Dataset& data, const Vector& beta, const Vector& resid,
                    double lambda) {
  const double n = data.n();
  double worst = 0.0;
  for (int j = 0; j < data.p(); ++j) {
    const double g = -data.X.col(j).dot(resid) / n;
    double viol;
    if (beta[j] > 0.0) {
      viol = std::fabs(g + lambda);
    } else if (beta[j] < 0.0) {
      viol = std::fabs(g - lambda);
    } else {
      viol = std::max(0.0, std::fabs(g) - lambda);
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

}  // namespace

// Coordinate descent over a candidate set with a final whole-vector KKT sweep
// that pulls violators in (sequential strong rule workflow).
LassoResult lasso_cd(const Dataset& data, double lambda, int max_iter, double tol,
                     Vector beta, std::vector<char> candidate) {
  const int n = data.n();
  const int p = data.p();
  Vector col_sq(p);
  for (int j = 0; j < p; ++j) col_sq[j] = data.X.col(j).squaredNorm() / n;
  Vector resid = data.y - data.X * beta;

  LassoResult out;
  for (int round = 0; round < 50; ++round) {
    bool active_only = false;
    for (int pass = 0; pass < max_iter; ++pass) {
      double max_delta = 0.0;
      for (int j = 0; j < p; ++j) {
        if (!candidate[j]) continue;
        if (active_only && beta[j] == 0.0) continue;
        if (col_sq[j] == 0.0) continue;
        const double old = beta[j];
        const double rho = data.X.col(j).dot(resid) / n + col_sq[j] * old;
        const double next = soft_threshold(rho, lambda) / col_sq[j];
        if (next != old) {
          resid.noalias() -= (next - old) * data.X.col(j);
          beta[j] = next;
          max_delta = std::max(max_delta, std::fabs(next - old) * std::sqrt(col_sq[j]));
        }
      }
      if (max_delta <= tol) {
        if (!active_only) break;
        active_only = false;  // one confirming sweep over the candidate set
      } else {
        active_only = true;
      }
    }
    // whole-vector KKT check; admit any violator and re-solve
    bool clean = true;
    for (int j = 0; j < p; ++j) {
      if (candidate[j]) continue;
      if (std::fabs(data.X.col(j).dot(resid)) / n > lambda) {
        candidate[j] = 1;
        clean = false;
      }
    }
    if (clean) break;
  }
  out.kkt_residual = kkt_residual(data, beta, resid, lambda);
  out.converged = out.kkt_residual <= std::max(tol * 10.0, 1e-6);
  out.beta = std::move(beta);
  out.lambda = lambda;
  return out;
}

LassoResult lasso_at(const Dataset& data, double lambda, int max_iter, double tol,
                     const Vector* warm) {
  const int p = data.p();
  Vector beta = warm && warm->size() == p ? *warm : Vector::Zero(p);
  return lasso_cd(data, lambda, max_iter, tol, std::move(beta),
                  std::vector<char>(p, 1));
}

// Warm-started path solve over a decreasing lambda sequence with the
// sequential strong rule screen |x_j' r| / n >= 2 lambda_g - lambda_{g-1}.
std::vector<Vector> lasso_path(const Dataset& data, const std::vector<double>& grid,
                               int max_iter, double tol) {
  const int n = data.n();
  const int p = data.p();
  std::vector<Vector> out;
  out.reserve(grid.size());
  Vector beta = Vector::Zero(p);
  double prev_lambda = (data.X.transpose() * data.y).cwiseAbs().maxCoeff() / n;
  for (double lambda : grid) {
    const Vector resid = data.y - data.X * beta;
    std::vector<char> candidate(p, 0);
    const double thr = 2.0 * lambda - prev_lambda;
    for (int j = 0; j < p; ++j) {
      candidate[j] = beta[j] != 0.0 ||
                     std::fabs(data.X.col(j).dot(resid)) / n >= thr;
    }
    LassoResult fit = lasso_cd(data, lambda, max_iter, tol, beta, std::move(candidate));
    beta = fit.beta;
    out.push_back(beta);
    prev_lambda = lambda;
  }
  return out;
}

double cross_validated_lambda(const Dataset& data, const LassoConfig& cfg,
                              RandomStream& rng) {
  const int n = data.n();
  const double lambda_max =
      (data.X.transpose() * data.y).cwiseAbs().maxCoeff() / n;
  const int G = cfg.cv_grid;
  std::vector<double> grid(G);
  const double lo = lambda_max * cfg.cv_grid_min_ratio;
  for (int g = 0; g < G; ++g) {
    grid[g] = lambda_max * std::pow(lo / lambda_max, static_cast<double>(g) / (G - 1));
  }

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  std::vector<double> cv_err(G, 0.0);
  for (int fold = 0; fold < cfg.cv_folds; ++fold) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) {
      (i % cfg.cv_folds == fold ? test : train).push_back(perm[i]);
    }
    Dataset dtr = data.rows(train);
    Dataset dte = data.rows(test);
    std::vector<Vector> path = lasso_path(dtr, grid, cfg.max_iter, cfg.tol);
    for (int g = 0; g < G; ++g) {
      cv_err[g] += (dte.y - dte.X * path[g]).squaredNorm();
    }
  }
  int best = 0;
  for (int g = 1; g < G; ++g) {
    if (cv_err[g] < cv_err[best]) best = g;
  }
  return grid[best];
}

LassoResult lasso(const Dataset& data, const LassoConfig& cfg, RandomStream& rng) {
  data.validate();
  const double lambda =
      cfg.lambda ? *cfg.lambda : cross_validated_lambda(data, cfg, rng);
  if (lambda == 0.0) {
    LassoResult out;
    out.beta = ols(data.X, data.y);
    out.lambda = 0.0;
    out.kkt_residual =
        (data.X.transpose() * (data.y - data.X * out.beta)).cwiseAbs().maxCoeff() /
        data.n();
    return out;
  }
  // Pathwise warm start stabilizes cold solves at small lambda.
  const double lambda_max =
      (data.X.transpose() * data.y).cwiseAbs().maxCoeff() / data.n();
  Vector warm = Vector::Zero(data.p());
  if (lambda < lambda_max / 4.0) {
    for (double l = lambda_max / 2.0; l > lambda; l /= 2.0) {
      warm = lasso_at(data, l, cfg.max_iter, cfg.tol, &warm).beta;
    }
  }
  return lasso_at(data, lambda, cfg.max_iter, cfg.tol, &warm);
}

Vector ols(const Matrix& X, const Vector& y) {
  return X.colPivHouseholderQr().solve(y);
}

Vector ols_on_support(const Dataset& data, const std::vector<int>& A) {
  if (A.empty()) throw InvalidParameter("ols_on_support: empty support");
  Matrix XA(data.n(), static_cast<int>(A.size()));
  for (std::size_t c = 0; c < A.size(); ++c) XA.col(static_cast<int>(c)) = data.X.col(A[c]);
  return ols(XA, data.y);
}

double debias_correction(const Dataset& data, const Vector& beta, const Vector& w,
                         int j) {
  const Vector resid = data.y - data.X * beta;
  return beta[j] + w.dot(data.X.transpose() * resid) / data.n();
}

Vector nodewise_precision_column(const Dataset& data, int j, double lambda_node,
                                 int max_iter, double tol) {
  const int n = data.n();
  const int p = data.p();
  Dataset node;
  node.X.resize(n, p - 1);
  int c = 0;
  for (int q = 0; q < p; ++q) {
    if (q != j) node.X.col(c++) = data.X.col(q);
  }
  node.y = data.X.col(j);
  LassoResult gamma = lasso_at(node, lambda_node, max_iter, tol, nullptr);
  const Vector resid = node.y - node.X * gamma.beta;
  const double tau2 = node.y.dot(resid) / n;

  Vector w = Vector::Zero(p);
  w[j] = 1.0 / tau2;
  c = 0;
  for (int q = 0; q < p; ++q) {
    if (q != j) w[q] = -gamma.beta[c++] / tau2;
  }
  return w;
}

Matrix gram_inverse(const Dataset& data) {
  if (data.p() >= data.n()) {
    throw InvalidParameter("gram_inverse: needs p < n");
  }
  const Matrix gram = data.X.transpose() * data.X / static_cast<double>(data.n());
  return gram.ldlt().solve(Matrix::Identity(data.p(), data.p()));
}

CiResult debiased_lasso_ci(const Dataset& data, int j, double alpha,
                           const DebiasedLassoConfig& cfg, RandomStream& rng) {
  data.validate();
  const int n = data.n();
  const int p = data.p();
  LassoResult main = lasso(data, cfg.main, rng);
  const Vector resid = data.y - data.X * main.beta;
  int nnz = 0;
  for (int q = 0; q < p; ++q) nnz += main.beta[q] != 0.0;
  const double dof = std::max(1, n - nnz);
  const double sigma2 = resid.squaredNorm() / dof;

  Vector w;
  if (cfg.nodewise_ols) {
    w = gram_inverse(data).col(j);
  } else {
    const double lambda_node = cfg.lambda_node
                                   ? *cfg.lambda_node
                                   : cfg.node_scale * std::sqrt(std::log(p) / n);
    w = nodewise_precision_column(data, j, lambda_node, cfg.max_iter, cfg.tol);
  }
  CiResult out;
  out.point = main.beta[j] + w.dot(data.X.transpose() * resid) / n;
  out.sigma2 = sigma2;
  // Plug-in variance w' Sigma_hat w, evaluated without forming Sigma_hat.
  const Vector xw = data.X * w;
  out.variance = sigma2 * xw.squaredNorm() / n;
  const double half = stats::two_sided_z(alpha) * std::sqrt(out.variance / n);
  out.lo = out.point - half;
  out.hi = out.point + half;
  return out;
}

Vector iht_fit(const Dataset& data, int s, const IhtConfig& cfg,
               const std::vector<std::vector<int>>& splits, const Vector& beta0) {
  const double eta0 = cfg.step_size();
  const int p = data.p();
  Vector beta = beta0.size() == p ? beta0 : Vector::Zero(p);
  std::vector<int> order(p);
  for (const auto& rows : splits) {
    // half-step (same arithmetic sequence as the private solver)
    const std::vector<int> support = nonzero_support(beta);
    Vector g = Vector::Zero(p);
    for (int i : rows) {
      const double pred = clip_scalar(dot_on_support(data.X, i, support, beta), cfg.R);
      const double resp = clip_scalar(data.y[i], cfg.R);
      g.noalias() += (pred - resp) * data.X.row(i).transpose();
    }
    Vector half = beta - (eta0 / static_cast<double>(rows.size())) * g;
    // top-s by magnitude, ties to the lowest index
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&half](int a, int b) {
      return std::fabs(half[a]) > std::fabs(half[b]);
    });
    Vector next = Vector::Zero(p);
    for (int r = 0; r < s; ++r) next[order[r]] = half[order[r]];
    const double norm = next.norm();
    beta = norm > cfg.C ? Vector((cfg.C / norm) * next) : next;
  }
  return beta;
}

IhtBicFit iht_bic_fit(const Dataset& data, const IhtConfig& cfg,
                      const AdaptiveConfig& acfg, RandomStream& rng,
                      double penalty_eps, double penalty_delta) {
  const int K = adaptive_sparsity_exponent(data.n(), data.p(), acfg);
  auto splits = split_rows(data.n(), cfg.T, rng);
  const double n = data.n();
  const double logp = std::log(static_cast<double>(data.p()));
  const double logn = std::log(n);
  const double log7n = std::pow(logn, 7);

  IhtBicFit best;
  double best_score = 0.0;
  for (int k = 0; k <= K; ++k) {
    const int s = 1 << k;
    if (s > data.p()) break;
    Vector beta = iht_fit(data, s, cfg, splits, Vector::Zero(data.p()));
    const std::vector<int> bsupp = nonzero_support(beta);
    double rss = 0.0;
    for (int i = 0; i < data.n(); ++i) {
      const double r = clip_scalar(data.y[i], cfg.R) -
                       clip_scalar(dot_on_support(data.X, i, bsupp, beta), cfg.R);
      rss += r * r;
    }
    const double two_k = std::pow(2.0, k);
    double penalty = acfg.c0 * logp * logn * two_k;
    if (penalty_eps > 0.0) {
      penalty += acfg.c0 * logp * logp * two_k * two_k *
                 std::log(1.0 / penalty_delta) * log7n /
                 (n * penalty_eps * penalty_eps);
    }
    const double score = rss + penalty;
    if (best.k < 0 || score < best_score) {
      best.beta = beta;
      best.k = k;
      best_score = score;
    }
  }
  return best;
}

FdrSelection nonprivate_mirror_fdr(const Dataset& data, double q, MirrorKind f_kind,
                                   Stage1 stage1, const IhtConfig& iht_cfg,
                                   const AdaptiveConfig& acfg, const LassoConfig& lcfg,
                                   const std::optional<std::vector<int>>& truth,
                                   RandomStream& rng, double stage1_eps,
                                   double stage1_delta) {
  data.validate();
  auto halves = split_rows(data.n(), 2, rng);
  Dataset d1 = data.rows(halves[0]);
  Dataset d2 = data.rows(halves[1]);

  FdrSelection out;
  Vector beta1;
  if (stage1 == Stage1::Iht) {
    beta1 = iht_bic_fit(d1, iht_cfg, acfg, rng, stage1_eps, stage1_delta).beta;
  } else {
    beta1 = lasso(d1, lcfg, rng).beta;
  }
  for (int j = 0; j < data.p(); ++j) {
    if (beta1[j] != 0.0) out.support_A.push_back(j);
  }
  if (out.support_A.empty()) {
    out.stage1_empty = true;
    if (truth) {
      auto [fdp, power] = score_selection({}, *truth);
      out.fdp = fdp;
      out.power = power;
    }
    return out;
  }

  const int m = static_cast<int>(out.support_A.size());
  out.beta1.resize(m);
  for (int c = 0; c < m; ++c) out.beta1[c] = beta1[out.support_A[c]];
  out.beta2 = ols_on_support(d2, out.support_A);

  out.mirrors.resize(m);
  for (int c = 0; c < m; ++c) {
    out.mirrors[c] = mirror_statistic(out.beta1[c], out.beta2[c], f_kind);
  }
  auto [tau, sel_local] = mirror_cutoff(out.mirrors, q);
  out.tau = tau;
  for (int c : sel_local) out.selected.push_back(out.support_A[c]);
  if (truth) {
    auto [fdp, power] = score_selection(out.selected, *truth);
    out.fdp = fdp;
    out.power = power;
  }
  return out;
}

}  // namespace baselines
}  // namespace dpreg
