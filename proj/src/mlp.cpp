#include "vfrl/mlp.hpp"

#include <cmath>
#include <string>

#include "vfrl/error.hpp"

namespace vfrl {

MlpParams MlpParams::zeros_like(const MlpParams& other) {
  MlpParams p;
  for (const auto& w : other.weights) p.weights.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  for (const auto& b : other.biases) p.biases.push_back(Eigen::VectorXd::Zero(b.size()));
  return p;
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  for (const auto& b : biases) n += static_cast<std::size_t>(b.size());
  return n;
}

void MlpParams::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

Mlp::Mlp(std::vector<std::size_t> dims, OutputActivation output)
    : dims_(std::move(dims)), output_(output) {
  if (dims_.size() < 2) throw DimensionError("an MLP needs at least input and output sizes");
  for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
    if (dims_[i] == 0 || dims_[i + 1] == 0) throw DimensionError("zero-width layer");
    params_.weights.push_back(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dims_[i + 1]),
                                                    static_cast<Eigen::Index>(dims_[i])));
    params_.biases.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims_[i + 1])));
  }
}

void Mlp::init_uniform(Rng& rng) {
  for (std::size_t l = 0; l < params_.weights.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto& w = params_.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
    for (Eigen::Index r = 0; r < params_.biases[l].size(); ++r) params_.biases[l](r) = dist(rng);
  }
}

void Mlp::check_input(const Eigen::MatrixXd& input) const {
  if (static_cast<std::size_t>(input.rows()) != input_size()) {
    throw DimensionError("network expects " + std::to_string(input_size()) + " inputs, got " +
                         std::to_string(input.rows()));
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
  check_input(input);
  Eigen::MatrixXd x = input;
  const std::size_t layers = params_.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = params_.weights[l] * x;
    z.colwise() += params_.biases[l];
    if (l + 1 < layers) {
      x = z.cwiseMax(0.0);
    } else {
      x = output_ == OutputActivation::kTanh ? Eigen::MatrixXd(z.array().tanh().matrix()) : z;
    }
  }
  return x;
}

ForwardCache Mlp::forward_cached(const Eigen::MatrixXd& input) const {
  check_input(input);
  ForwardCache cache;
  const std::size_t layers = params_.weights.size();
  Eigen::MatrixXd x = input;
  for (std::size_t l = 0; l < layers; ++l) {
    cache.inputs.push_back(x);
    Eigen::MatrixXd z = params_.weights[l] * x;
    z.colwise() += params_.biases[l];
    if (l + 1 < layers) {
      x = z.cwiseMax(0.0);
    } else {
      x = output_ == OutputActivation::kTanh ? Eigen::MatrixXd(z.array().tanh().matrix()) : z;
    }
    cache.pre.push_back(std::move(z));
  }
  cache.output = std::move(x);
  return cache;
}

MlpGradients Mlp::backward(const ForwardCache& cache, const Eigen::MatrixXd& upstream) const {
  if (upstream.rows() != cache.output.rows() || upstream.cols() != cache.output.cols()) {
    throw DimensionError("upstream gradient shape does not match the cached output");
  }
  Eigen::MatrixXd delta = upstream;
  if (output_ == OutputActivation::kTanh) {
    delta.array() *= 1.0 - cache.output.array().square();
  }
  return backward_from_preactivation(cache, delta);
}

MlpGradients Mlp::backward_from_preactivation(const ForwardCache& cache,
                                              const Eigen::MatrixXd& upstream) const {
  const std::size_t layers = params_.weights.size();
  if (cache.pre.size() != layers) throw DimensionError("forward cache does not match network");
  if (upstream.rows() != cache.pre.back().rows() || upstream.cols() != cache.pre.back().cols()) {
    throw DimensionError("upstream gradient shape does not match the cached pre-activation");
  }

  MlpGradients g;
  g.params = MlpParams::zeros_like(params_);
  Eigen::MatrixXd delta = upstream;
  for (std::size_t i = layers; i-- > 0;) {
    g.params.weights[i].noalias() = delta * cache.inputs[i].transpose();
    g.params.biases[i] = delta.rowwise().sum();
    Eigen::MatrixXd down = params_.weights[i].transpose() * delta;
    if (i > 0) {
      // ReLU derivative of the previous layer, taken as 0 at the kink.
      down.array() *= (cache.pre[i - 1].array() > 0.0).cast<double>();
    }
    delta = std::move(down);
  }
  g.input = std::move(delta);
  return g;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  auto& t = target.params();
  const auto& o = online.params();
  if (t.weights.size() != o.weights.size()) throw DimensionError("soft_update: layer count mismatch");
  for (std::size_t l = 0; l < t.weights.size(); ++l) {
    if (t.weights[l].rows() != o.weights[l].rows() || t.weights[l].cols() != o.weights[l].cols()) {
      throw DimensionError("soft_update: shape mismatch");
    }
    t.weights[l] = tau * o.weights[l] + (1.0 - tau) * t.weights[l];
    t.biases[l] = tau * o.biases[l] + (1.0 - tau) * t.biases[l];
  }
}

}  // namespace vfrl
