#pragma once

#include <cmath>

#include "vfrl/rng.hpp"

namespace vfrl {

// Ornstein-Uhlenbeck exploration noise:
//   X' = X + theta * (mu - X) * dt + sigma * sqrt(dt) * N(0, 1)
class OuNoise {
 public:
  OuNoise() = default;
  OuNoise(double theta, double sigma, double mu = 0.0, double dt = 1.0)
      : theta_(theta), sigma_(sigma), mu_(mu), dt_(dt), value_(mu) {}

  void reset() { value_ = mu_; }

  double sample(Rng& rng) { return advance(standard_normal(rng)); }

  double advance(double normal_draw) {
    value_ += theta_ * (mu_ - value_) * dt_ + sigma_ * std::sqrt(dt_) * normal_draw;
    return value_;
  }

  double value() const { return value_; }
  double theta() const { return theta_; }
  double sigma() const { return sigma_; }

 private:
  double theta_ = 0.15;
  double sigma_ = 0.2;
  double mu_ = 0.0;
  double dt_ = 1.0;
  double value_ = 0.0;
};

}  // namespace vfrl
