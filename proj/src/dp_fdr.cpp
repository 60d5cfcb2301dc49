#include "dpreg/dp_fdr.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace dpreg {

double mirror_statistic(double u, double v, MirrorKind f_kind) {
  const double prod = u * v;
  const double sign = prod > 0.0 ? 1.0 : (prod < 0.0 ? -1.0 : 0.0);
  if (sign == 0.0) return 0.0;
  const double au = std::fabs(u);
  const double av = std::fabs(v);
  switch (f_kind) {
    case MirrorKind::MinTwice: return sign * 2.0 * std::min(au, av);
    case MirrorKind::Product: return sign * au * av;
    case MirrorKind::Sum: return sign * (au + av);
  }
  return 0.0;
}

Vector dp_ols_on_support(const Dataset& data2, const std::vector<int>& A, double R,
                         double B1, double B2, const BudgetSlice& slice,
                         NoiseMode mode, PrivacyBudget& budget, RandomStream& rng) {
  const int m = static_cast<int>(A.size());
  const int n2 = data2.n();
  if (m == 0) throw InvalidParameter("dp_ols_on_support: empty support");
  if (m >= n2) throw InvalidParameter("dp_ols_on_support: |A| must be < n2");

  Matrix XA(n2, m);
  for (int c = 0; c < m; ++c) XA.col(c) = data2.X.col(A[c]);
  Matrix gram = (XA.transpose() * XA) / static_cast<double>(n2);
  Vector cross(m);
  for (int c = 0; c < m; ++c) {
    double s = 0.0;
    for (int i = 0; i < n2; ++i) s += XA(i, c) * clip_scalar(data2.y[i], R);
    cross[c] = s / static_cast<double>(n2);
  }

  budget.charge(slice.epsilon, slice.delta);
  if (mode == NoiseMode::Calibrated) {
    const double std_xx = gaussian_mechanism_std(B1, slice.epsilon, slice.delta);
    const double std_xy = gaussian_mechanism_std(B2, slice.epsilon, slice.delta);
    // Sample on and above the diagonal, mirror below: N_XX stays symmetric.
    for (int r = 0; r < m; ++r) {
      for (int c = r; c < m; ++c) {
        const double z = std_xx * rng.normal();
        gram(r, c) += z;
        if (c != r) gram(c, r) += z;
      }
    }
    for (int c = 0; c < m; ++c) cross[c] += std_xy * rng.normal();
  }

  // Rank-revealing solve; no regularization so the estimator stays the one
  // the analysis describes. Small-n noised Grams can be indefinite, which
  // surfaces here as a condition failure.
  Eigen::FullPivLU<Matrix> lu(gram);
  const double cond = lu.rcond() > 0.0 ? 1.0 / lu.rcond()
                                       : std::numeric_limits<double>::infinity();
  if (!lu.isInvertible() || cond > 1e12) throw DegenerateRefit(cond);
  return lu.solve(cross);
}

std::pair<double, std::vector<int>> mirror_cutoff(const Vector& mirrors, double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidParameter("mirror_cutoff: q must be in (0,1)");
  const int m = static_cast<int>(mirrors.size());
  std::vector<double> grid;
  grid.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double a = std::fabs(mirrors[i]);
    if (a > 0.0) grid.push_back(a);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  for (double t : grid) {
    int neg = 0, pos = 0;
    for (int i = 0; i < m; ++i) {
      if (mirrors[i] < -t) ++neg;
      if (mirrors[i] > t) ++pos;
    }
    if (static_cast<double>(neg) / std::max(pos, 1) <= q) {
      std::vector<int> selected;
      for (int i = 0; i < m; ++i) {
        if (mirrors[i] > t) selected.push_back(i);
      }
      return {t, selected};
    }
  }
  return {std::numeric_limits<double>::infinity(), {}};
}

std::pair<double, double> score_selection(const std::vector<int>& selected,
                                          const std::vector<int>& truth_in) {
  std::vector<int> truth = truth_in;
  std::sort(truth.begin(), truth.end());
  int true_pos = 0;
  for (int j : selected) {
    if (std::binary_search(truth.begin(), truth.end(), j)) ++true_pos;
  }
  const double fdp = static_cast<double>(selected.size() - true_pos) /
                     std::max<std::size_t>(selected.size(), 1);
  const double power =
      truth.empty() ? 0.0 : static_cast<double>(true_pos) / truth.size();
  return {fdp, power};
}

FdrSelection dp_fdr_pipeline(const Dataset& data, const IhtConfig& iht,
                             const AdaptiveConfig& acfg, const MirrorConfig& mcfg,
                             double epsilon, double delta,
                             const std::optional<std::vector<int>>& truth,
                             RandomStream& rng) {
  data.validate();
  if (data.n() < 2) throw InvalidParameter("dp_fdr_pipeline: need n >= 2");
  PrivacyBudget budget(epsilon, delta);
  const BudgetSlice half{epsilon / 2.0, delta / 2.0};

  // Random halves; D1 keeps the extra row when n is odd.
  auto halves = split_rows(data.n(), 2, rng);
  Dataset d1 = data.rows(halves[0]);
  Dataset d2 = data.rows(halves[1]);

  FdrSelection out;
  SparseEstimate beta1 = adaptive_dp_regression(d1, half, iht, acfg, budget, rng);
  out.support_A = beta1.support;
  if (out.support_A.empty()) {
    out.stage1_empty = true;
    out.eps_charged = budget.spent_epsilon();
    out.delta_charged = budget.spent_delta();
    if (truth) {
      auto [fdp, power] = score_selection({}, *truth);
      out.fdp = fdp;
      out.power = power;
    }
    return out;
  }

  const int m = static_cast<int>(out.support_A.size());
  out.beta1.resize(m);
  for (int c = 0; c < m; ++c) out.beta1[c] = beta1.beta[out.support_A[c]];
  out.beta2 = dp_ols_on_support(d2, out.support_A, iht.R, mcfg.B1, mcfg.B2, half,
                                iht.noise_mode, budget, rng);

  out.mirrors.resize(m);
  for (int c = 0; c < m; ++c) {
    out.mirrors[c] = mirror_statistic(out.beta1[c], out.beta2[c], mcfg.f_kind);
  }
  auto [tau, sel_local] = mirror_cutoff(out.mirrors, mcfg.q);
  out.tau = tau;
  for (int c : sel_local) out.selected.push_back(out.support_A[c]);

  if (truth) {
    auto [fdp, power] = score_selection(out.selected, *truth);
    out.fdp = fdp;
    out.power = power;
  }
  out.eps_charged = budget.spent_epsilon();
  out.delta_charged = budget.spent_delta();
  return out;
}

}  // namespace dpreg
