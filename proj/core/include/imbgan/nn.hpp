#pragma once

// Small dense-network engine: layer stack description, parameters, forward and
// backward passes, the two cross-entropy losses and Adam.
//
// A network is a NetworkSpec (layer descriptions) paired with a NetworkState
// (parameters laid out one LayerParams per spec entry; non-parametric layers
// keep an empty slot). Gradients mirror NetworkState slot for slot.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "imbgan/matrix.hpp"
#include "imbgan/random.hpp"

namespace imbgan::nn {

using imbgan::Rng;

enum class LayerKind { kDense, kRelu, kSigmoid, kSoftmax, kBatchNorm, kDropout };
enum class Mode { kTrain, kInfer };
enum class LossKind { kBinaryCrossEntropy, kCategoricalCrossEntropy };

const char* to_string(LayerKind kind) noexcept;

struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  double rate = 0.0;  // dropout only

  static LayerSpec dense(std::size_t in, std::size_t out);
  static LayerSpec relu(std::size_t dim);
  static LayerSpec sigmoid(std::size_t dim);
  static LayerSpec softmax(std::size_t dim);
  static LayerSpec batchnorm(std::size_t dim);
  static LayerSpec dropout(std::size_t dim, double rate);

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

using NetworkSpec = std::vector<LayerSpec>;

// Throws ShapeError unless the stack is non-empty, every layer is internally
// consistent and consecutive layers chain (out of i == in of i+1).
void validate(const NetworkSpec& spec);
std::size_t input_dim(const NetworkSpec& spec);
std::size_t output_dim(const NetworkSpec& spec);

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.99;

struct LayerParams {
  // dense
  Matrix weights;  // input_dim x output_dim
  std::vector<double> bias;
  // batchnorm
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = kBatchNormMomentum;
  double epsilon = kBatchNormEpsilon;

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

struct NetworkState {
  std::vector<LayerParams> layers;

  friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

struct LayerGradients {
  Matrix weights;
  std::vector<double> bias;
  std::vector<double> gamma;
  std::vector<double> beta;
};

struct Gradients {
  std::vector<LayerGradients> layers;
};

// Trainable tensors in a fixed order (per layer: weights, bias, gamma, beta).
// Running batchnorm statistics are state, not parameters.
std::vector<std::span<double>> parameter_blocks(NetworkState& state);
std::vector<std::span<const double>> parameter_blocks(const NetworkState& state);
std::vector<std::span<double>> parameter_blocks(Gradients& grads);
std::vector<std::span<const double>> parameter_blocks(const Gradients& grads);
std::size_t parameter_count(const NetworkState& state);

// Glorot-uniform dense weights, zero biases, gamma = 1, beta = 0, running
// mean 0 and running variance 1.
NetworkState init_state(const NetworkSpec& spec, Rng& rng);

// Throws ShapeError when parameter shapes disagree with the layer stack.
void check_state(const NetworkSpec& spec, const NetworkState& state);

struct LayerCache {
  Matrix input;
  Matrix output;
  Matrix aux;  // dropout mask or batchnorm normalized input
  std::vector<double> inv_std;
};

struct ForwardCache {
  Mode mode = Mode::kInfer;
  std::vector<LayerCache> layers;
};

struct ForwardResult {
  Matrix output;
  ForwardCache cache;
};

// Runs the stack. In train mode dropout draws masks from `rng` (required when
// the stack has a dropout layer) and batchnorm normalizes with batch
// statistics, folding them into the running statistics of `state`. In infer
// mode dropout is the identity, batchnorm uses running statistics and `state`
// is left untouched.
ForwardResult forward(const NetworkSpec& spec, NetworkState& state,
                      const Matrix& input, Mode mode, Rng* rng = nullptr);

// Infer-mode forward on a const state.
Matrix infer(const NetworkSpec& spec, const NetworkState& state,
             const Matrix& input);

Matrix relu(const Matrix& x);
// Logistic function clamped into the open interval (0, 1).
Matrix sigmoid(const Matrix& x);
// Row-wise, max-subtracted.
Matrix softmax(const Matrix& x);
Matrix activation(LayerKind kind, const Matrix& x);

inline constexpr double kLogClip = 1e-7;

double loss_bce(std::span<const double> predicted,
                std::span<const double> target);
double loss_categorical_ce(const Matrix& predicted, const Matrix& target);
double loss(LossKind kind, const Matrix& predicted, const Matrix& target);

struct BackwardResult {
  Gradients grads;
  Matrix input_grad;  // d(loss)/d(network input)
};

// Gradients of the mean loss. When the final layer is sigmoid with BCE, or
// softmax with categorical cross-entropy, the output gradient is taken in the
// fused form (prediction - target) / count.
BackwardResult backward(const NetworkSpec& spec, const NetworkState& state,
                        const ForwardCache& cache, LossKind loss_kind,
                        const Matrix& targets);

// Backpropagates an externally supplied d(loss)/d(output).
BackwardResult backward_from_output_grad(const NetworkSpec& spec,
                                         const NetworkState& state,
                                         const ForwardCache& cache,
                                         const Matrix& output_grad);

struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double learning_rate = 1e-3;
};

AdamState make_adam(const NetworkState& state, double learning_rate);

// One bias-corrected Adam update; increments opt.step_count.
void adam_step(NetworkState& state, const Gradients& grads, AdamState& opt);

}  // namespace imbgan::nn
