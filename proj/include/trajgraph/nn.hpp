#pragma once

#include <cstdint>
#include <vector>

#include "trajgraph/rng.hpp"

namespace trajgraph::nn {

// Dense multilayer perceptron with tanh hidden activations and an identity
// output layer. Kept deliberately small; 64-bit floats throughout so
// gradients can be checked against finite differences.
struct Mlp {
  std::vector<int> layer_dims;
  // weights[l] is (layer_dims[l+1] x layer_dims[l]) row-major, biases[l] its bias.
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  size_t layer_count() const { return weights.size(); }
};

// Uniform(-a, a) init with a = sqrt(6 / (fan_in + fan_out)).
Mlp make_mlp(const std::vector<int>& layer_dims, Rng& rng);

std::vector<double> forward(const Mlp& mlp, const std::vector<double>& x);

// Per-layer inputs retained for backprop.
struct ForwardTrace {
  std::vector<std::vector<double>> inputs;  // inputs[l] = activation entering layer l
  std::vector<double> output;
};

ForwardTrace forward_trace(const Mlp& mlp, const std::vector<double>& x);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> input;  // dLoss/dx, for chaining through concatenated inputs
};

// Backprop given dLoss/dOutput. Shapes mirror the mlp.
Gradients backward(const Mlp& mlp, const ForwardTrace& trace,
                   const std::vector<double>& output_grad);

struct SoftmaxResult {
  double loss = 0.0;
  std::vector<double> probs;
  std::vector<double> logit_grad;  // probs - one_hot(target)
};

// Numerically stabilized softmax + cross-entropy against a one-hot target.
SoftmaxResult softmax_xent(const std::vector<double>& logits, int target);

std::vector<double> softmax(const std::vector<double>& logits);

// Adam with bias correction over a list of parameter blocks.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;

  static AdamState for_blocks(const std::vector<std::vector<double>*>& blocks, double lr);
};

void adam_step(AdamState& state, const std::vector<std::vector<double>*>& params,
               const std::vector<const std::vector<double>*>& grads);

// Parameter/gradient blocks of an Mlp in a fixed order (weights then bias per
// layer), for the optimizer and for checkpoint serialization.
std::vector<std::vector<double>*> param_blocks(Mlp& mlp);
std::vector<const std::vector<double>*> grad_blocks(const Gradients& g);

}  // namespace trajgraph::nn
