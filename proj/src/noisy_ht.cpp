#include "dpreg/noisy_ht.hpp"

#include <cmath>

#include "dpreg/dataset.hpp"

namespace dpreg {

namespace {

void check_params(const NoisyHtParams& params, int d) {
  if (params.s < 1) throw InvalidParameter("noisy_hard_threshold: s must be >= 1");
  if (d < params.s) {
    throw InvalidParameter("noisy_hard_threshold: dimension d must be >= s");
  }
  if (!(params.delta > 0.0 && params.delta < 1.0)) {
    throw InvalidParameter("noisy_hard_threshold: delta must lie strictly in (0,1)");
  }
  if (!(params.epsilon > 0.0)) {
    throw InvalidParameter("noisy_hard_threshold: epsilon must be > 0");
  }
  if (params.lambda < 0.0) {
    throw InvalidParameter("noisy_hard_threshold: lambda must be >= 0");
  }
}

}  // namespace

double noisy_ht_scale(const NoisyHtParams& params) {
  return params.lambda * 2.0 *
         std::sqrt(3.0 * params.s * std::log(1.0 / params.delta)) / params.epsilon;
}

SparseSelection noisy_hard_threshold(const Vector& xi, const NoisyHtParams& params,
                                     RandomStream& rng) {
  const int d = static_cast<int>(xi.size());
  check_params(params, d);
  const double scale = noisy_ht_scale(params);
  const bool noisy = params.noise_mode == NoiseMode::Calibrated && scale > 0.0;

  std::vector<char> taken(d, 0);
  SparseSelection sel;
  sel.support.reserve(params.s);
  for (int round = 0; round < params.s; ++round) {
    Vector eta = noisy ? laplace_noise(scale, d, params.noise_mode, rng)
                       : Vector::Zero(d);
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < d; ++j) {
      if (taken[j]) continue;
      const double score = std::fabs(xi[j]) + eta[j];
      if (best < 0 || score > best_score) {
        best = j;
        best_score = score;
      }
    }
    taken[best] = 1;
    sel.support.push_back(best);
  }

  Vector final_noise = noisy ? laplace_noise(scale, params.s, params.noise_mode, rng)
                             : Vector::Zero(params.s);
  sel.values.resize(params.s);
  sel.dense = Vector::Zero(d);
  for (int i = 0; i < params.s; ++i) {
    sel.values[i] = xi[sel.support[i]] + final_noise[i];
    sel.dense[sel.support[i]] = sel.values[i];
  }
  return sel;
}

}  // namespace dpreg
