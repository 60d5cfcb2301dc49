#pragma once

#include <stdexcept>
#include <string>

namespace dpreg {

struct InvalidParameter : std::invalid_argument {
  explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when a charge would push spent epsilon or delta past its cap.
struct BudgetExceeded : std::runtime_error {
  enum class Which { Epsilon, Delta };
  BudgetExceeded(Which which, double requested, double cap)
      : std::runtime_error(std::string("privacy budget exceeded: ") +
                           (which == Which::Epsilon ? "epsilon" : "delta") +
                           " would reach " + std::to_string(requested) +
                           " against cap " + std::to_string(cap)),
        which(which), requested(requested), cap(cap) {}
  Which which;
  double requested;
  double cap;
};

// Thrown by the noisy OLS refit when the noised Gram matrix is numerically
// singular; carries the condition estimate for diagnostics.
struct DegenerateRefit : std::runtime_error {
  explicit DegenerateRefit(double condition_estimate)
      : std::runtime_error("degenerate noisy OLS refit: condition estimate " +
                           std::to_string(condition_estimate)),
        condition_estimate(condition_estimate) {}
  double condition_estimate;
};

}  // namespace dpreg
