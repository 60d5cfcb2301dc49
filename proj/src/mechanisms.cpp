#include "dpreg/mechanisms.hpp"

#include <cmath>

namespace dpreg {

PrivacyBudget::PrivacyBudget(double epsilon, double delta)
    : epsilon_(epsilon), delta_(delta) {
  if (!(epsilon > 0.0)) throw InvalidParameter("PrivacyBudget: epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidParameter("PrivacyBudget: delta must be in (0,1)");
  }
}

void PrivacyBudget::charge(double eps_cost, double delta_cost) {
  if (eps_cost < 0.0 || delta_cost < 0.0) {
    throw InvalidParameter("PrivacyBudget::charge: costs must be nonnegative");
  }
  const double e = spent_epsilon_ + eps_cost;
  const double d = spent_delta_ + delta_cost;
  if (e > epsilon_ + kSlack) throw BudgetExceeded(BudgetExceeded::Which::Epsilon, e, epsilon_);
  if (d > delta_ + kSlack) throw BudgetExceeded(BudgetExceeded::Which::Delta, d, delta_);
  spent_epsilon_ = e;
  spent_delta_ = d;
}

Vector laplace_noise(double scale, int count, NoiseMode mode, RandomStream& rng) {
  if (count <= 0) throw InvalidParameter("laplace_noise: count must be positive");
  if (mode == NoiseMode::Disabled) return Vector::Zero(count);
  if (!(scale > 0.0)) throw InvalidParameter("laplace_noise: scale must be > 0");
  Vector out(count);
  for (int i = 0; i < count; ++i) out[i] = rng.laplace(scale);
  return out;
}

Vector gaussian_noise(double std, int count, NoiseMode mode, RandomStream& rng) {
  if (count <= 0) throw InvalidParameter("gaussian_noise: count must be positive");
  if (mode == NoiseMode::Disabled) return Vector::Zero(count);
  if (!(std > 0.0)) throw InvalidParameter("gaussian_noise: std must be > 0");
  Vector out(count);
  for (int i = 0; i < count; ++i) out[i] = std * rng.normal();
  return out;
}

Vector project_l2(const Vector& v, double C) {
  if (!(C > 0.0)) throw InvalidParameter("project_l2: C must be > 0");
  const double norm = v.norm();
  if (norm <= C) return v;
  return v * (C / norm);
}

double laplace_mechanism_scale(double l1_sensitivity, double epsilon) {
  if (!(l1_sensitivity > 0.0) || !(epsilon > 0.0)) {
    throw InvalidParameter("laplace_mechanism_scale: arguments must be > 0");
  }
  return l1_sensitivity / epsilon;
}

double gaussian_mechanism_std(double l2_sensitivity, double epsilon, double delta) {
  if (!(l2_sensitivity > 0.0) || !(epsilon > 0.0)) {
    throw InvalidParameter("gaussian_mechanism_std: arguments must be > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidParameter("gaussian_mechanism_std: delta must be in (0,1)");
  }
  return std::sqrt(2.0 * std::log(1.25 / delta)) * l2_sensitivity / epsilon;
}

double advanced_composition_epsilon(double epsilon_step, int k, double delta_prime) {
  if (!(epsilon_step > 0.0) || k < 1 || !(delta_prime > 0.0 && delta_prime < 1.0)) {
    throw InvalidParameter("advanced_composition_epsilon: invalid arguments");
  }
  return static_cast<double>(k) * epsilon_step * (std::exp(epsilon_step) - 1.0) +
         epsilon_step * std::sqrt(2.0 * k * std::log(1.0 / delta_prime));
}

double dp_clipped_abs_median(const Vector& values, double bound, int grid_size,
                             double epsilon, NoiseMode mode, PrivacyBudget& budget,
                             RandomStream& rng) {
  if (!(bound > 0.0) || grid_size < 2) {
    throw InvalidParameter("dp_clipped_abs_median: bad bound or grid");
  }
  const int n = static_cast<int>(values.size());
  budget.charge(epsilon, 0.0);
  std::vector<double> grid(grid_size);
  std::vector<double> utility(grid_size);
  for (int g = 0; g < grid_size; ++g) {
    grid[g] = bound * (g + 0.5) / grid_size;
    int below = 0;
    for (int i = 0; i < n; ++i) below += std::fabs(clip_scalar(values[i], bound)) <= grid[g];
    utility[g] = -std::fabs(below - n / 2.0);
  }
  if (mode == NoiseMode::Disabled) {
    int best = 0;
    for (int g = 1; g < grid_size; ++g) {
      if (utility[g] > utility[best]) best = g;
    }
    return grid[best];
  }
  // Gumbel-max sampling of the exponential mechanism at sensitivity 1.
  int pick = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid_size; ++g) {
    const double gumbel = -std::log(-std::log(rng.uniform01()));
    const double score = 0.5 * epsilon * utility[g] + gumbel;
    if (score > best_score) {
      best_score = score;
      pick = g;
    }
  }
  return grid[pick];
}

double mad_scale_pilot(const Vector& y, double bound, double epsilon,
                       NoiseMode mode, PrivacyBudget& budget, RandomStream& rng) {
  const double med = dp_clipped_abs_median(y, bound, 256, epsilon, mode, budget, rng);
  return 1.4826 * med;
}

}  // namespace dpreg
