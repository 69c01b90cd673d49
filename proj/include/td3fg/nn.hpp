#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "td3fg/matrix.hpp"

namespace td3fg {

enum class Activation { Relu, Tanh, Identity };

const char* to_string(Activation a);
Activation activation_from_string(const std::string& s);

// Feed-forward network parameters. Plain value data: copying a net snapshots
// it, and two nets built from the same sizes, tags and seed are bitwise equal.
struct MlpNet {
  std::vector<int> layer_sizes;
  Activation hidden_act = Activation::Tanh;
  Activation output_act = Activation::Tanh;
  std::vector<std::vector<double>> weights;  // [layer][out*in], row-major
  std::vector<std::vector<double>> biases;   // [layer][out]

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t num_layers() const { return weights.size(); }
  std::size_t param_count() const;
  bool same_architecture(const MlpNet& other) const;
  bool same_parameters(const MlpNet& other) const;  // bitwise
};

// Uniform +-1/sqrt(fan_in) init per layer, deterministic per seed.
MlpNet mlp_init(const std::vector<int>& layer_sizes, Activation hidden_act,
                Activation output_act, std::uint64_t seed);

std::vector<double> forward(const MlpNet& net, std::span<const double> input);

// Batched forward keeping every layer's activations so backward can reuse
// them. acts[0] is the input batch, acts[num_layers()] the output batch.
struct ForwardCache {
  std::vector<Matrix> acts;
  const Matrix& output() const { return acts.back(); }
};

ForwardCache forward_batch(const MlpNet& net, const Matrix& inputs);

// Parameter gradients are means over the batch rows; input gradients are
// per-row and unscaled so they can feed another net's backward as upstream.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  Matrix inputs;
};

// upstream(r, j) = dL_r/dy_j for row r; the result is d/dtheta of
// (1/N) sum_r L_r. Duplicating every batch row leaves it unchanged.
Gradients backward(const MlpNet& net, const ForwardCache& cache,
                   const Matrix& upstream);

struct AdamState {
  double lr = 1e-3;
  double l2_coef = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step_count = 0;
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
};

AdamState adam_init(const MlpNet& net, double lr, double l2_coef);

// Standard Adam with bias correction; l2_coef * w is added to the gradient
// before the moment update. Throws NumericError on non-finite gradients.
void adam_step(MlpNet& net, const Gradients& grads, AdamState& state);

// Central-difference check of backward() against the MSE loss
// (1/N) sum_r |y_r - target_r|^2. Returns the worst per-parameter error
// |analytic - fd| / max(1, |analytic|, |fd|); 0/0 counts as 0.
double grad_check(const MlpNet& net, const Matrix& inputs,
                  const Matrix& targets, double epsilon);

// Text checkpoint, bit-exact round-trip.
void save_net(const MlpNet& net, std::ostream& out);
MlpNet load_net(std::istream& in);
void save_net(const MlpNet& net, const std::string& path);
MlpNet load_net(const std::string& path);

}  // namespace td3fg
