#include "trajgraph/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trajgraph/errors.hpp"

namespace trajgraph::nn {

Mlp make_mlp(const std::vector<int>& layer_dims, Rng& rng) {
  if (layer_dims.size() < 2) {
    throw ArgumentError("an MLP needs at least input and output dims");
  }
  for (int d : layer_dims) {
    if (d < 1) throw ArgumentError("layer dims must be positive");
  }
  Mlp mlp;
  mlp.layer_dims = layer_dims;
  for (size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> w(static_cast<size_t>(fan_in) * fan_out);
    for (double& x : w) x = rng.uniform(-a, a);
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(std::vector<double>(fan_out, 0.0));
  }
  return mlp;
}

namespace {

void affine(const std::vector<double>& w, const std::vector<double>& b,
            const std::vector<double>& x, std::vector<double>& out) {
  const size_t rows = b.size();
  const size_t cols = x.size();
  out.assign(rows, 0.0);
  for (size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* wr = w.data() + r * cols;
    for (size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    out[r] = acc;
  }
}

}  // namespace

ForwardTrace forward_trace(const Mlp& mlp, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != mlp.input_dim()) {
    throw ArgumentError("input has dim " + std::to_string(x.size()) + ", expected " +
                        std::to_string(mlp.input_dim()));
  }
  ForwardTrace trace;
  trace.inputs.reserve(mlp.layer_count());
  std::vector<double> act = x;
  std::vector<double> next;
  for (size_t l = 0; l < mlp.layer_count(); ++l) {
    trace.inputs.push_back(act);
    affine(mlp.weights[l], mlp.biases[l], act, next);
    if (l + 1 < mlp.layer_count()) {
      for (double& v : next) v = std::tanh(v);
    }
    act = next;
  }
  trace.output = std::move(act);
  return trace;
}

std::vector<double> forward(const Mlp& mlp, const std::vector<double>& x) {
  return forward_trace(mlp, x).output;
}

Gradients backward(const Mlp& mlp, const ForwardTrace& trace,
                   const std::vector<double>& output_grad) {
  if (output_grad.size() != static_cast<size_t>(mlp.output_dim())) {
    throw ArgumentError("output gradient dim mismatch");
  }
  Gradients g;
  g.weights.resize(mlp.layer_count());
  g.biases.resize(mlp.layer_count());

  std::vector<double> delta = output_grad;  // dLoss/d(pre-activation) of current layer
  for (size_t l = mlp.layer_count(); l-- > 0;) {
    const std::vector<double>& input = trace.inputs[l];
    const size_t rows = mlp.biases[l].size();
    const size_t cols = input.size();
    // output layer is identity; hidden layers need the tanh derivative, where
    // tanh(z) is exactly the input recorded for the *next* layer
    if (l + 1 < mlp.layer_count()) {
      const std::vector<double>& activated = trace.inputs[l + 1];
      for (size_t r = 0; r < rows; ++r) {
        delta[r] *= 1.0 - activated[r] * activated[r];
      }
    }
    g.weights[l].assign(rows * cols, 0.0);
    g.biases[l].assign(rows, 0.0);
    for (size_t r = 0; r < rows; ++r) {
      g.biases[l][r] = delta[r];
      double* wr = g.weights[l].data() + r * cols;
      for (size_t c = 0; c < cols; ++c) wr[c] = delta[r] * input[c];
    }
    std::vector<double> prev(cols, 0.0);
    for (size_t r = 0; r < rows; ++r) {
      const double* wr = mlp.weights[l].data() + r * cols;
      for (size_t c = 0; c < cols; ++c) prev[c] += wr[c] * delta[r];
    }
    delta = std::move(prev);
  }
  g.input = std::move(delta);
  return g;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  std::vector<double> probs(logits.size());
  double total = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - max_logit);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

SoftmaxResult softmax_xent(const std::vector<double>& logits, int target) {
  if (target < 0 || target >= static_cast<int>(logits.size())) {
    throw ArgumentError("softmax target index out of range");
  }
  SoftmaxResult result;
  result.probs = softmax(logits);
  result.loss = -std::log(std::max(result.probs[target], 1e-300));
  result.logit_grad = result.probs;
  result.logit_grad[target] -= 1.0;
  return result;
}

AdamState AdamState::for_blocks(const std::vector<std::vector<double>*>& blocks, double lr) {
  AdamState state;
  state.lr = lr;
  for (const auto* b : blocks) {
    state.m.emplace_back(b->size(), 0.0);
    state.v.emplace_back(b->size(), 0.0);
  }
  return state;
}

void adam_step(AdamState& state, const std::vector<std::vector<double>*>& params,
               const std::vector<const std::vector<double>*>& grads) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ArgumentError("adam_step block count mismatch");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t b = 0; b < params.size(); ++b) {
    std::vector<double>& p = *params[b];
    const std::vector<double>& g = *grads[b];
    if (p.size() != g.size()) {
      throw ArgumentError("adam_step shape mismatch in block " + std::to_string(b));
    }
    for (size_t i = 0; i < p.size(); ++i) {
      if (!std::isfinite(g[i])) {
        throw TrainingError("non-finite gradient encountered");
      }
      double& m = state.m[b][i];
      double& v = state.v[b][i];
      m = state.beta1 * m + (1.0 - state.beta1) * g[i];
      v = state.beta2 * v + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m / bc1;
      const double v_hat = v / bc2;
      p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

std::vector<std::vector<double>*> param_blocks(Mlp& mlp) {
  std::vector<std::vector<double>*> blocks;
  for (size_t l = 0; l < mlp.layer_count(); ++l) {
    blocks.push_back(&mlp.weights[l]);
    blocks.push_back(&mlp.biases[l]);
  }
  return blocks;
}

std::vector<const std::vector<double>*> grad_blocks(const Gradients& g) {
  std::vector<const std::vector<double>*> blocks;
  for (size_t l = 0; l < g.weights.size(); ++l) {
    blocks.push_back(&g.weights[l]);
    blocks.push_back(&g.biases[l]);
  }
  return blocks;
}

}  // namespace trajgraph::nn
