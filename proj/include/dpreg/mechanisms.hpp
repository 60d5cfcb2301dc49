#pragma once

#include "dpreg/errors.hpp"
#include "dpreg/linalg.hpp"
#include "dpreg/rng.hpp"

namespace dpreg {

// Calibrated draws real noise; Disabled draws exactly zero everywhere and
// exists only so oracle tests can compare pipelines against deterministic
// references. A Disabled run is not private and the CLI labels it as such.
enum class NoiseMode { Calibrated, Disabled };

// Scalar truncation radius R and l2 feasibility radius C.
struct ClipLevel {
  double R = 1.0;
  double C = 1.0;
};

// (epsilon, delta) budget with additive spend tracking. Comparisons against
// the caps allow an absolute slack of 1e-12; costs are ratios of user inputs,
// so that is ample.
class PrivacyBudget {
 public:
  PrivacyBudget(double epsilon, double delta);

  // Adds the costs to the running totals; throws BudgetExceeded (naming the
  // offending side) if either total would pass its cap.
  void charge(double eps_cost, double delta_cost);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  double spent_epsilon() const { return spent_epsilon_; }
  double spent_delta() const { return spent_delta_; }

  bool fully_spent(double tol = 1e-9) const {
    return std::fabs(spent_epsilon_ - epsilon_) <= tol &&
           std::fabs(spent_delta_ - delta_) <= tol;
  }

  static constexpr double kSlack = 1e-12;

 private:
  double epsilon_;
  double delta_;
  double spent_epsilon_ = 0.0;
  double spent_delta_ = 0.0;
};

// A pre-split slice of a budget, handed to a single mechanism invocation.
struct BudgetSlice {
  double epsilon;
  double delta;
};

// `count` i.i.d. Laplace(scale) draws; all zeros when Disabled.
Vector laplace_noise(double scale, int count, NoiseMode mode, RandomStream& rng);

// `count` i.i.d. N(0, std^2) draws; all zeros when Disabled.
Vector gaussian_noise(double std, int count, NoiseMode mode, RandomStream& rng);

// Truncation of x to [-R, R]; idempotent, monotone, 1-Lipschitz.
inline double clip_scalar(double x, double R) {
  if (x > R) return R;
  if (x < -R) return -R;
  return x;
}

// Projection onto the l2 ball of radius C: rescales radially when outside.
Vector project_l2(const Vector& v, double C);

// Mechanism calibration helpers (Laplace / Gaussian mechanisms).
double laplace_mechanism_scale(double l1_sensitivity, double epsilon);
double gaussian_mechanism_std(double l2_sensitivity, double epsilon, double delta);

// k-fold advanced composition of an (epsilon,0) mechanism at slack
// delta_prime: epsilon' = k e (e^e - 1) + e sqrt(2 k log(1/delta')).
// Provided as a calculator; the pipelines use the explicit per-iteration
// splits their algorithms hardwire.
double advanced_composition_epsilon(double epsilon_step, int k, double delta_prime);

// (epsilon, 0)-DP median of |values| clipped to [0, bound], via the
// exponential mechanism over a uniform grid (utility -|#below - n/2|,
// sensitivity 1). Used by the clipped-MAD pilot that estimates the noise
// scale when no truncation level is known: for centered Gaussian data
// sigma ~= 1.4826 * median|y|.
double dp_clipped_abs_median(const Vector& values, double bound, int grid_size,
                             double epsilon, NoiseMode mode, PrivacyBudget& budget,
                             RandomStream& rng);

// Convenience wrapper: sigma estimate from the pilot above.
double mad_scale_pilot(const Vector& y, double bound, double epsilon,
                       NoiseMode mode, PrivacyBudget& budget, RandomStream& rng);

}  // namespace dpreg
