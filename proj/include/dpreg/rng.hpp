#pragma once

#include <cstdint>
#include <vector>

namespace dpreg {

// Splittable, seedable pseudo-random stream (xoshiro256++ core, splitmix64
// seeding). All samplers are implemented here rather than via <random> so a
// given seed produces bit-identical draws on every platform; replaying a run
// manifest must reproduce output files byte for byte.
//
// Streams are not shareable across concurrent callers: split() a child stream
// per worker / per replication before going parallel.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  // Derives an independent child stream. Children are indexed by an internal
  // split counter, so the k-th split of a given stream is reproducible.
  RandomStream split();

  std::uint64_t next_u64();

  // Uniform on (0,1): 53-bit mantissa, never returns 0 or 1.
  double uniform01();

  // Uniform integer in [0, bound), bound >= 1 (rejection sampling, unbiased).
  std::uint64_t uniform_below(std::uint64_t bound);

  // Standard normal via inverse-CDF (Wichura AS241, |error| < 1e-15).
  double normal();

  // Zero-mean Laplace with the given scale via inverse-CDF.
  double laplace(double scale);

  // In-place Fisher-Yates shuffle of an index vector.
  void shuffle(std::vector<int>& v);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t split_counter_ = 0;
};

namespace stats {

// Standard normal quantile (AS241, PPND16). Accurate to ~1e-15 for
// p in (0,1); far beyond the 1e-8 the confidence intervals need.
double normal_quantile(double p);

// Standard normal CDF via erfc.
double normal_cdf(double x);

// Two-sided z value: z_{alpha/2} with normal_quantile(1 - alpha/2).
double two_sided_z(double alpha);

}  // namespace stats

}  // namespace dpreg
