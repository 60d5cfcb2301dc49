#pragma once

#include <vector>

#include "dpreg/mechanisms.hpp"

namespace dpreg {

// Parameters of the peeling selector. lambda bounds the per-entry (l_inf)
// sensitivity of the input vector; the privacy contract is (epsilon,delta)-DP
// whenever neighboring inputs differ by at most lambda in every coordinate.
struct NoisyHtParams {
  int s = 1;              // target sparsity
  double epsilon = 1.0;
  double delta = 1e-6;    // strictly inside (0,1)
  double lambda = 0.0;    // per-entry sensitivity bound of the input
  NoiseMode noise_mode = NoiseMode::Calibrated;
};

// Exactly s selected coordinates, their noisy values, and the dense vector
// with zeros off support.
struct SparseSelection {
  std::vector<int> support;   // in selection order, size s
  Vector values;              // noisy values over support
  Vector dense;               // p-vector, zero off support

  std::vector<int> sorted_support() const {
    std::vector<int> s = support;
    std::sort(s.begin(), s.end());
    return s;
  }
};

// Per-round Laplace scale lambda * 2 sqrt(3 s log(1/delta)) / epsilon.
double noisy_ht_scale(const NoisyHtParams& params);

// Peeling selection: s rounds, each drawing d fresh Laplace variates and
// taking the argmax of |xi_j| + eta_ij over unselected coordinates (ties to
// the lowest index, which is the deterministic case under Disabled noise);
// finally returns the selected entries with fresh Laplace noise of the same
// scale added. Only |S| final noise entries are drawn; distributionally
// identical to drawing d and restricting.
SparseSelection noisy_hard_threshold(const Vector& xi, const NoisyHtParams& params,
                                     RandomStream& rng);

}  // namespace dpreg
