#include "dpreg/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dpreg {

void DesignSpec::validate() const {
  if (n < 1 || p < 1) throw InvalidParameter("DesignSpec: n and p must be >= 1");
  if (s0 < 0 || s0 > p) throw InvalidParameter("DesignSpec: s0 must lie in [0, p]");
  if (covariance == Covariance::ToeplitzAR && !(std::fabs(rho) < 1.0)) {
    throw InvalidParameter("DesignSpec: ToeplitzAR requires |rho| < 1");
  }
  if (covariance == Covariance::BlockedEqui && !(rho >= 0.0 && rho < 1.0)) {
    throw InvalidParameter("DesignSpec: BlockedEqui requires rho in [0,1)");
  }
  if (!(sigma > 0.0)) throw InvalidParameter("DesignSpec: sigma must be > 0");
  if (cx_trunc && !(*cx_trunc > 0.0)) {
    throw InvalidParameter("DesignSpec: cx_trunc must be > 0");
  }
}

Matrix generate_design(const DesignSpec& spec, RandomStream& rng) {
  spec.validate();
  Matrix X(spec.n, spec.p);
  switch (spec.covariance) {
    case DesignSpec::Covariance::Identity: {
      for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.p; ++j) X(i, j) = rng.normal();
      break;
    }
    case DesignSpec::Covariance::ToeplitzAR: {
      // AR(1) recursion x_k = rho x_{k-1} + sqrt(1-rho^2) zeta_k gives the
      // Toeplitz covariance rho^{|j-k|} in O(np).
      const double w = std::sqrt(1.0 - spec.rho * spec.rho);
      for (int i = 0; i < spec.n; ++i) {
        double prev = rng.normal();
        X(i, 0) = prev;
        for (int j = 1; j < spec.p; ++j) {
          prev = spec.rho * prev + w * rng.normal();
          X(i, j) = prev;
        }
      }
      break;
    }
    case DesignSpec::Covariance::BlockedEqui: {
      // Within each block of 4 consecutive indices (floor(j/4) groups):
      // x_j = sqrt(rho) g + sqrt(1-rho) zeta_j with a shared factor g,
      // giving off-diagonal rho inside the block and unit diagonal.
      const double a = std::sqrt(spec.rho);
      const double b = std::sqrt(1.0 - spec.rho);
      for (int i = 0; i < spec.n; ++i) {
        for (int j0 = 0; j0 < spec.p; j0 += 4) {
          const double g = rng.normal();
          for (int j = j0; j < std::min(j0 + 4, spec.p); ++j) {
            X(i, j) = a * g + b * rng.normal();
          }
        }
      }
      break;
    }
  }
  if (spec.cx_trunc) {
    const double c = *spec.cx_trunc;
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.p; ++j) X(i, j) = std::clamp(X(i, j), -c, c);
  }
  return X;
}

std::pair<Vector, std::vector<int>> generate_coefficients(const DesignSpec& spec,
                                                          RandomStream& rng) {
  spec.validate();
  std::vector<int> support;
  if (spec.support_pattern == DesignSpec::SupportPattern::Prefix) {
    for (int j = 0; j < spec.s0; ++j) support.push_back(j);
  } else {
    // s0 indices uniformly without replacement
    std::vector<int> all(spec.p);
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(all);
    support.assign(all.begin(), all.begin() + spec.s0);
    std::sort(support.begin(), support.end());
  }
  Vector beta = Vector::Zero(spec.p);
  for (int j : support) {
    beta[j] = spec.signal == DesignSpec::Signal::Fixed
                  ? spec.signal_value
                  : std::sqrt(spec.signal_xi) * rng.normal();
  }
  return {beta, support};
}

Vector generate_response(const Matrix& X, const Vector& beta, double sigma,
                         RandomStream& rng) {
  Vector y = X * beta;
  for (int i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
  return y;
}

GeneratedData generate(const DesignSpec& spec, RandomStream& rng) {
  GeneratedData out;
  out.data.X = generate_design(spec, rng);
  auto [beta, support] = generate_coefficients(spec, rng);
  out.beta_true = beta;
  out.support_true = support;
  out.data.y = generate_response(out.data.X, beta, spec.sigma, rng);
  return out;
}

}  // namespace dpreg
