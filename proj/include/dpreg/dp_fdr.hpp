#pragma once

#include <optional>

#include "dpreg/dp_regression.hpp"

namespace dpreg {

enum class MirrorKind { MinTwice, Product, Sum };

// Settings for the mirror-statistic selection. B1 and B2 bound the l2
// sensitivities of the stage-2 OLS sufficient statistics; the harness sets
// them to their lower bounds 4 K_A c_x^2 / n and 4 R sqrt(K_A) c_x / n with
// K_A the stage-1 support-size cap.
struct MirrorConfig {
  MirrorKind f_kind = MirrorKind::MinTwice;
  double q = 0.1;       // target FDR level
  double B1 = 0.0;
  double B2 = 0.0;
};

struct FdrSelection {
  std::vector<int> support_A;     // stage-1 support (sorted)
  Vector beta1;                   // stage-1 coefficients over support_A
  Vector beta2;                   // stage-2 refit over support_A
  Vector mirrors;                 // M_j over support_A
  double tau = std::numeric_limits<double>::infinity();
  std::vector<int> selected;      // subset of support_A with M_j > tau
  std::optional<double> fdp;      // when truth supplied
  std::optional<double> power;
  bool stage1_empty = false;
  double eps_charged = 0.0;
  double delta_charged = 0.0;
};

// sign(u v) * f(|u|, |v|); sign(0) = 0, so a vanishing coefficient zeroes the
// mirror and the coordinate can never be selected.
double mirror_statistic(double u, double v, MirrorKind f_kind);

// Noisy OLS on the stage-2 half restricted to columns A: adds a symmetric
// Gaussian N_XX (entry std B1 sqrt(2 log(1.25/delta_s)) / eps_s, sampled on
// and above the diagonal and mirrored) to the Gram matrix and N_XY (same form
// with B2) to the cross moments with the response clipped at R, then solves.
// The pair of releases is jointly charged (eps_s, delta_s). Throws
// DegenerateRefit when the noised Gram has condition estimate > 1e12.
Vector dp_ols_on_support(const Dataset& data2, const std::vector<int>& A, double R,
                         double B1, double B2, const BudgetSlice& slice,
                         NoiseMode mode, PrivacyBudget& budget, RandomStream& rng);

// Data-driven cutoff: the ratio #{M < -t} / max(#{M > t}, 1) is piecewise
// constant between distinct |M| values, so scanning those suffices; returns
// the smallest qualifying t and the strict-exceedance selection. (+inf, {})
// when no candidate qualifies, which only happens for empty input.
std::pair<double, std::vector<int>> mirror_cutoff(const Vector& mirrors, double q);

// Full pipeline: random halves D1/D2 (D1 takes the extra row when n is odd),
// adaptive DP regression on D1 at (eps/2, delta/2), noisy OLS refit on D2 at
// (eps/2, delta/2), mirrors, cutoff, and FDP/power scoring against the truth
// when supplied.
FdrSelection dp_fdr_pipeline(const Dataset& data, const IhtConfig& iht,
                             const AdaptiveConfig& acfg, const MirrorConfig& mcfg,
                             double epsilon, double delta,
                             const std::optional<std::vector<int>>& truth,
                             RandomStream& rng);

// FDP = |selected \ S| / max(|selected|, 1); Power = |selected cap S| / |S|.
std::pair<double, double> score_selection(const std::vector<int>& selected,
                                          const std::vector<int>& truth);

}  // namespace dpreg
