#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "socnav/rng.hpp"

namespace socnav {

// Dense tanh MLP. weights[l] maps layer l (columns) to layer l + 1 (rows).
// The same struct carries gradients and optimizer accumulators.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  std::size_t num_layers() const { return weights.size(); }
  std::size_t num_parameters() const;

  // Throws DimensionError if shapes do not chain with layer_sizes.
  void check_shapes() const;
};

// All-zero tensors shaped by layer_sizes.
MlpParams zeros_mlp(const std::vector<int>& layer_sizes);
MlpParams zeros_like(const MlpParams& params);

// Uniform(+-sqrt(6 / (fan_in + fan_out))) weights, zero biases.
MlpParams glorot_mlp(const std::vector<int>& layer_sizes, Rng& rng);

// Column-per-sample activations of every layer; activations[0] is the input
// batch and activations.back() the (linear) output.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> activations;

  std::size_t batch_size() const {
    return activations.empty() ? 0 : activations.front().cols();
  }
};

// Batched forward pass over the columns of inputs.
ForwardTrace forward(const MlpParams& params, const Eigen::MatrixXd& inputs);

// Single-sample convenience wrapper.
Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& input,
                        ForwardTrace* trace = nullptr);

// Reverse-mode gradient of sum_j <output_grad[:, j], output[:, j]> with
// respect to every weight and bias.
MlpParams backward(const MlpParams& params, const ForwardTrace& trace,
                   const Eigen::MatrixXd& output_grad);

// Max-subtracted softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

double global_norm(const MlpParams& tensors);
void scale_in_place(MlpParams& tensors, double factor);

struct RmspropState {
  double learning_rate = 5e-4;
  double decay_rho = 0.99;
  double epsilon = 1e-8;
  MlpParams accumulators;
};

RmspropState make_rmsprop(const MlpParams& params, double learning_rate = 5e-4,
                          double decay_rho = 0.99, double epsilon = 1e-8);

// acc <- rho acc + (1 - rho) g^2;  p <- p - lr g / sqrt(acc + eps).
// Throws TrainingDivergenceError on any non-finite gradient, leaving params
// and state untouched.
void rmsprop_step(MlpParams& params, const MlpParams& grads,
                  RmspropState& state);

// Text checkpoint: "mlp-v1 <sizes>" header, one line per tensor
// ("W<l> <rows>x<cols> ..." row-major, "b<l> <n> ..."), 17 significant
// digits, then optional free-form trailer lines.
struct Checkpoint {
  MlpParams params;
  std::vector<std::string> trailer;
};

void save_checkpoint(const MlpParams& params, std::ostream& out,
                     const std::vector<std::string>& trailer = {});
void save_checkpoint(const MlpParams& params, const std::filesystem::path& path,
                     const std::vector<std::string>& trailer = {});

// Throws CheckpointFormatError naming the bad section, or DimensionError when
// expected_sizes is given and differs from the stored architecture.
Checkpoint load_checkpoint(std::istream& in,
                           const std::optional<std::vector<int>>& expected_sizes = {});
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::vector<int>>& expected_sizes = {});

}  // namespace socnav
