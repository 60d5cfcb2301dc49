#pragma once

#include <optional>
#include <vector>

#include "dpreg/dataset.hpp"

namespace dpreg {

// Synthetic design generator for the simulation studies: Gaussian rows under
// a Toeplitz AR(rho), blocked equi-correlation (blocks of 4), or identity
// covariance; sparse coefficients; Gaussian noise. Rows can be entrywise
// truncated to [-cx_trunc, cx_trunc] before the response is formed, so the
// linear model holds exactly for the truncated design and the covariate bound
// c_x is available to the mechanisms.
struct DesignSpec {
  enum class Covariance { Identity, ToeplitzAR, BlockedEqui };
  enum class SupportPattern { Prefix, RandomUniform };
  enum class Signal { Fixed, GaussianAmplitude };

  int n = 100;
  int p = 10;
  Covariance covariance = Covariance::Identity;
  double rho = 0.0;              // ToeplitzAR: |rho|<1; BlockedEqui: rho in [0,1)
  SupportPattern support_pattern = SupportPattern::Prefix;
  int s0 = 1;
  Signal signal = Signal::Fixed;
  double signal_value = 1.0;     // Fixed: each nonzero coefficient
  double signal_xi = 1.0;        // GaussianAmplitude: variance of each nonzero
  double sigma = 1.0;            // noise std
  std::optional<double> cx_trunc;  // entrywise covariate truncation bound

  void validate() const;
};

struct GeneratedData {
  Dataset data;
  Vector beta_true;
  std::vector<int> support_true;  // sorted
};

GeneratedData generate(const DesignSpec& spec, RandomStream& rng);

// Pieces of generate(), exposed so a scenario can hold the design and the
// coefficients fixed while redrawing only the errors across replications.
Matrix generate_design(const DesignSpec& spec, RandomStream& rng);
std::pair<Vector, std::vector<int>> generate_coefficients(const DesignSpec& spec,
                                                          RandomStream& rng);
Vector generate_response(const Matrix& X, const Vector& beta, double sigma,
                         RandomStream& rng);

}  // namespace dpreg
