#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "vfrl/rng.hpp"

namespace vfrl {

enum class OutputActivation { kTanh = 0, kIdentity = 1 };

// Weights and biases of a fully connected network. Layer i maps dims[i] to
// dims[i + 1]; weights[i] is (dims[i + 1] x dims[i]). Also used for gradients
// and optimizer moments, which share the parameter shapes.
struct MlpParams {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static MlpParams zeros_like(const MlpParams& other);
  std::size_t parameter_count() const;
  void set_zero();
};

// Activations kept from a forward pass, one column per batch sample.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> inputs;  // input to each layer
  std::vector<Eigen::MatrixXd> pre;     // affine output of each layer
  Eigen::MatrixXd output;
};

struct MlpGradients {
  MlpParams params;
  Eigen::MatrixXd input;  // d(loss)/d(input), one column per sample
};

// ReLU hidden layers, selectable output activation.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<std::size_t> dims, OutputActivation output);

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  void init_uniform(Rng& rng);

  std::size_t input_size() const { return dims_.front(); }
  std::size_t output_size() const { return dims_.back(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  OutputActivation output_activation() const { return output_; }

  // Columns are samples. Throws DimensionError on a row-count mismatch.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;
  ForwardCache forward_cached(const Eigen::MatrixXd& input) const;

  // Backpropagates upstream = d(loss)/d(output) (same shape as cache.output).
  // Parameter gradients are summed over the batch.
  MlpGradients backward(const ForwardCache& cache, const Eigen::MatrixXd& upstream) const;
  // Same, with upstream taken w.r.t. the output layer's pre-activation.
  MlpGradients backward_from_preactivation(const ForwardCache& cache,
                                           const Eigen::MatrixXd& upstream) const;

  MlpParams& params() { return params_; }
  const MlpParams& params() const { return params_; }

 private:
  void check_input(const Eigen::MatrixXd& input) const;

  std::vector<std::size_t> dims_;
  OutputActivation output_ = OutputActivation::kIdentity;
  MlpParams params_;
};

// target <- tau * online + (1 - tau) * target
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace vfrl
