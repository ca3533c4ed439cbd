#include "vfrl/adam.hpp"

#include <cmath>

#include "vfrl/error.hpp"

namespace vfrl {

AdamState AdamState::for_params(const MlpParams& params, double lr) {
  AdamState s;
  s.m = MlpParams::zeros_like(params);
  s.v = MlpParams::zeros_like(params);
  s.lr = lr;
  return s;
}

namespace {

template <typename Block>
void apply(Block& param, Block& m, Block& v, const Block& g, double beta1, double beta2,
           double c1, double c2, double lr, double eps) {
  m = beta1 * m + (1.0 - beta1) * g;
  v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
  param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

void adam_update(AdamState& state, MlpParams& params, const MlpParams& grads) {
  if (params.weights.size() != grads.weights.size() ||
      params.weights.size() != state.m.weights.size()) {
    throw DimensionError("adam_update: layer count mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (params.weights[l].rows() != grads.weights[l].rows() ||
        params.weights[l].cols() != grads.weights[l].cols()) {
      throw DimensionError("adam_update: shape mismatch");
    }
    apply(params.weights[l], state.m.weights[l], state.v.weights[l], grads.weights[l],
          state.beta1, state.beta2, c1, c2, state.lr, state.eps);
    apply(params.biases[l], state.m.biases[l], state.v.biases[l], grads.biases[l], state.beta1,
          state.beta2, c1, c2, state.lr, state.eps);
  }
}

}  // namespace vfrl
