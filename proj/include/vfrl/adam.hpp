#pragma once

#include <cstdint>

#include "vfrl/mlp.hpp"

namespace vfrl {

struct AdamState {
  MlpParams m;
  MlpParams v;
  std::uint64_t step = 0;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const MlpParams& params, double lr);
};

// Bias-corrected Adam descent step on params using grads (gradient of the
// quantity being minimized).
void adam_update(AdamState& state, MlpParams& params, const MlpParams& grads);

}  // namespace vfrl
