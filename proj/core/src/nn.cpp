#include "imbgan/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "imbgan/errors.hpp"

namespace imbgan::nn {

namespace {

constexpr double kSigmoidLow = std::numeric_limits<double>::min();
constexpr double kSigmoidHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2;

double sigmoid_scalar(double x) {
  double y;
  if (x >= 0) {
    y = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    y = e / (1.0 + e);
  }
  return std::clamp(y, kSigmoidLow, kSigmoidHigh);
}

double clip_probability(double p) {
  return std::clamp(p, kLogClip, 1.0 - kLogClip);
}

std::string layer_label(std::size_t index, const LayerSpec& layer) {
  return "layer " + std::to_string(index) + " (" + to_string(layer.kind) + ")";
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

Matrix dense_forward(const LayerParams& p, const Matrix& x) {
  Matrix out = matmul(x, p.weights);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += p.bias[c];
  }
  return out;
}

// Batch statistics, normalized input and updated running statistics.
Matrix batchnorm_train(const LayerParams& p, const Matrix& x,
                       LayerCache& cache, LayerParams* running) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  std::vector<double> mean(d, 0.0);
  std::vector<double> var(d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) mean[c] += x(r, c);
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = x(r, c) - mean[c];
      var[c] += diff * diff;
    }
  }
  for (auto& v : var) v /= static_cast<double>(n);

  cache.inv_std.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    cache.inv_std[c] = 1.0 / std::sqrt(var[c] + p.epsilon);
  }
  cache.aux = Matrix(n, d);
  Matrix out(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double xhat = (x(r, c) - mean[c]) * cache.inv_std[c];
      cache.aux(r, c) = xhat;
      out(r, c) = p.gamma[c] * xhat + p.beta[c];
    }
  }
  if (running != nullptr) {
    const double m = running->momentum;
    for (std::size_t c = 0; c < d; ++c) {
      running->running_mean[c] =
          m * running->running_mean[c] + (1.0 - m) * mean[c];
      running->running_var[c] = m * running->running_var[c] + (1.0 - m) * var[c];
    }
  }
  return out;
}

Matrix batchnorm_infer(const LayerParams& p, const Matrix& x,
                       LayerCache* cache) {
  const std::size_t d = x.cols();
  std::vector<double> inv_std(d);
  for (std::size_t c = 0; c < d; ++c) {
    inv_std[c] = 1.0 / std::sqrt(p.running_var[c] + p.epsilon);
  }
  Matrix out(x.rows(), d);
  Matrix xhat(x.rows(), d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      xhat(r, c) = (x(r, c) - p.running_mean[c]) * inv_std[c];
      out(r, c) = p.gamma[c] * xhat(r, c) + p.beta[c];
    }
  }
  if (cache != nullptr) {
    cache->inv_std = std::move(inv_std);
    cache->aux = std::move(xhat);
  }
  return out;
}

Matrix dropout_train(double rate, const Matrix& x, Rng& rng, Matrix& mask) {
  mask = Matrix(x.rows(), x.cols());
  Matrix out(x.rows(), x.cols());
  const double keep_scale = rate < 1.0 ? 1.0 / (1.0 - rate) : 0.0;
  std::bernoulli_distribution keep(1.0 - rate);
  auto m = mask.values();
  auto o = out.values();
  auto in = x.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    m[i] = keep(rng) ? keep_scale : 0.0;
    o[i] = in[i] * m[i];
  }
  return out;
}

// Shared forward body. `running_sink` receives running-stat updates; when
// null the state is treated as read-only.
ForwardResult forward_impl(const NetworkSpec& spec, const NetworkState& state,
                           NetworkState* running_sink, const Matrix& input,
                           Mode mode, Rng* rng, bool keep_cache) {
  validate(spec);
  check_state(spec, state);
  if (input.cols() != spec.front().input_dim) {
    throw ShapeError("forward: input has " + std::to_string(input.cols()) +
                     " columns, network expects " +
                     std::to_string(spec.front().input_dim));
  }
  ForwardResult result;
  result.cache.mode = mode;
  if (keep_cache) result.cache.layers.resize(spec.size());

  Matrix current = input;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const LayerSpec& layer = spec[i];
    const LayerParams& params = state.layers[i];
    LayerCache scratch;
    LayerCache& cache = keep_cache ? result.cache.layers[i] : scratch;
    Matrix next;
    switch (layer.kind) {
      case LayerKind::kDense:
        next = dense_forward(params, current);
        break;
      case LayerKind::kRelu:
      case LayerKind::kSigmoid:
      case LayerKind::kSoftmax:
        next = activation(layer.kind, current);
        break;
      case LayerKind::kBatchNorm:
        if (mode == Mode::kTrain) {
          next = batchnorm_train(
              params, current, cache,
              running_sink != nullptr ? &running_sink->layers[i] : nullptr);
        } else {
          next = batchnorm_infer(params, current, &cache);
        }
        break;
      case LayerKind::kDropout:
        if (mode == Mode::kTrain && layer.rate > 0.0) {
          if (rng == nullptr) {
            throw PreconditionError(
                "forward: train mode with dropout requires an rng");
          }
          next = dropout_train(layer.rate, current, *rng, cache.aux);
        } else {
          next = current;
        }
        break;
    }
    if (keep_cache) {
      cache.input = std::move(current);
      cache.output = next;
    }
    current = std::move(next);
  }
  result.output = std::move(current);
  return result;
}

Matrix output_grad_for_loss(const Matrix& predicted, const Matrix& targets,
                            LossKind kind) {
  require_same_shape(predicted, targets, "loss gradient");
  Matrix grad(predicted.rows(), predicted.cols());
  const auto p = predicted.values();
  const auto t = targets.values();
  auto g = grad.values();
  if (kind == LossKind::kBinaryCrossEntropy) {
    const double count = static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= kLogClip || p[i] >= 1.0 - kLogClip) continue;
      g[i] = (p[i] - t[i]) / (p[i] * (1.0 - p[i])) / count;
    }
  } else {
    const double count = static_cast<double>(predicted.rows());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= kLogClip) continue;
      g[i] = -t[i] / p[i] / count;
    }
  }
  return grad;
}

Gradients empty_gradients(const NetworkSpec& spec, const NetworkState& state) {
  Gradients g;
  g.layers.resize(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const auto& p = state.layers[i];
    auto& gl = g.layers[i];
    if (spec[i].kind == LayerKind::kDense) {
      gl.weights = Matrix(p.weights.rows(), p.weights.cols());
      gl.bias.assign(p.bias.size(), 0.0);
    } else if (spec[i].kind == LayerKind::kBatchNorm) {
      gl.gamma.assign(p.gamma.size(), 0.0);
      gl.beta.assign(p.beta.size(), 0.0);
    }
  }
  return g;
}

// Walks the stack backwards from `start` (exclusive) with `grad` holding
// d(loss)/d(output of layer start-1).
BackwardResult backward_from(const NetworkSpec& spec,
                             const NetworkState& state,
                             const ForwardCache& cache, std::size_t start,
                             Matrix grad) {
  BackwardResult result;
  result.grads = empty_gradients(spec, state);
  for (std::size_t step = start; step-- > 0;) {
    const LayerSpec& layer = spec[step];
    const LayerParams& params = state.layers[step];
    const LayerCache& lc = cache.layers[step];
    LayerGradients& lg = result.grads.layers[step];
    if (grad.rows() != lc.output.rows() || grad.cols() != lc.output.cols()) {
      throw InternalError("backward: gradient shape mismatch at " +
                          layer_label(step, layer));
    }
    const std::size_t n = grad.rows();
    const std::size_t d = grad.cols();
    switch (layer.kind) {
      case LayerKind::kDense: {
        lg.weights = matmul_tn(lc.input, grad);
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t c = 0; c < d; ++c) lg.bias[c] += grad(r, c);
        }
        grad = matmul_nt(grad, params.weights);
        break;
      }
      case LayerKind::kRelu: {
        auto g = grad.values();
        const auto x = lc.input.values();
        for (std::size_t k = 0; k < g.size(); ++k) {
          if (x[k] <= 0.0) g[k] = 0.0;
        }
        break;
      }
      case LayerKind::kSigmoid: {
        auto g = grad.values();
        const auto y = lc.output.values();
        for (std::size_t k = 0; k < g.size(); ++k) g[k] *= y[k] * (1.0 - y[k]);
        break;
      }
      case LayerKind::kSoftmax: {
        for (std::size_t r = 0; r < n; ++r) {
          auto g = grad.row(r);
          const auto y = lc.output.row(r);
          double dot = 0.0;
          for (std::size_t c = 0; c < d; ++c) dot += g[c] * y[c];
          for (std::size_t c = 0; c < d; ++c) g[c] = y[c] * (g[c] - dot);
        }
        break;
      }
      case LayerKind::kBatchNorm: {
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t c = 0; c < d; ++c) {
            lg.gamma[c] += grad(r, c) * lc.aux(r, c);
            lg.beta[c] += grad(r, c);
          }
        }
        Matrix dx(n, d);
        if (cache.mode == Mode::kTrain) {
          const double count = static_cast<double>(n);
          for (std::size_t c = 0; c < d; ++c) {
            double sum_dxhat = 0.0;
            double sum_dxhat_xhat = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
              const double dxhat = grad(r, c) * params.gamma[c];
              sum_dxhat += dxhat;
              sum_dxhat_xhat += dxhat * lc.aux(r, c);
            }
            for (std::size_t r = 0; r < n; ++r) {
              const double dxhat = grad(r, c) * params.gamma[c];
              dx(r, c) = lc.inv_std[c] / count *
                         (count * dxhat - sum_dxhat -
                          lc.aux(r, c) * sum_dxhat_xhat);
            }
          }
        } else {
          for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
              dx(r, c) = grad(r, c) * params.gamma[c] * lc.inv_std[c];
            }
          }
        }
        grad = std::move(dx);
        break;
      }
      case LayerKind::kDropout: {
        if (cache.mode == Mode::kTrain && layer.rate > 0.0) {
          auto g = grad.values();
          const auto m = lc.aux.values();
          for (std::size_t k = 0; k < g.size(); ++k) g[k] *= m[k];
        }
        break;
      }
    }
  }
  result.input_grad = std::move(grad);
  return result;
}

void check_cache(const NetworkSpec& spec, const ForwardCache& cache) {
  if (cache.layers.size() != spec.size()) {
    throw InternalError("backward: cache has " +
                        std::to_string(cache.layers.size()) +
                        " layers, spec has " + std::to_string(spec.size()));
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (cache.layers[i].output.cols() != spec[i].output_dim ||
        cache.layers[i].input.cols() != spec[i].input_dim) {
      throw InternalError("backward: cache does not match " +
                          layer_label(i, spec[i]));
    }
  }
}

}  // namespace

const char* to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kSigmoid: return "sigmoid";
    case LayerKind::kSoftmax: return "softmax";
    case LayerKind::kBatchNorm: return "batchnorm";
    case LayerKind::kDropout: return "dropout";
  }
  return "unknown";
}

LayerSpec LayerSpec::dense(std::size_t in, std::size_t out) {
  return {LayerKind::kDense, in, out, 0.0};
}
LayerSpec LayerSpec::relu(std::size_t dim) {
  return {LayerKind::kRelu, dim, dim, 0.0};
}
LayerSpec LayerSpec::sigmoid(std::size_t dim) {
  return {LayerKind::kSigmoid, dim, dim, 0.0};
}
LayerSpec LayerSpec::softmax(std::size_t dim) {
  return {LayerKind::kSoftmax, dim, dim, 0.0};
}
LayerSpec LayerSpec::batchnorm(std::size_t dim) {
  return {LayerKind::kBatchNorm, dim, dim, 0.0};
}
LayerSpec LayerSpec::dropout(std::size_t dim, double rate) {
  return {LayerKind::kDropout, dim, dim, rate};
}

void validate(const NetworkSpec& spec) {
  if (spec.empty()) throw ShapeError("network spec is empty");
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const LayerSpec& layer = spec[i];
    if (layer.input_dim == 0 || layer.output_dim == 0) {
      throw ShapeError(layer_label(i, layer) + " has a zero dimension");
    }
    if (layer.kind != LayerKind::kDense && layer.input_dim != layer.output_dim) {
      throw ShapeError(layer_label(i, layer) + " must preserve dimension");
    }
    if (layer.kind == LayerKind::kDropout &&
        !(layer.rate >= 0.0 && layer.rate < 1.0)) {
      throw ShapeError(layer_label(i, layer) + " rate must be in [0, 1)");
    }
    if (i > 0 && spec[i - 1].output_dim != layer.input_dim) {
      throw ShapeError(layer_label(i, layer) + " expects " +
                       std::to_string(layer.input_dim) + " inputs but " +
                       layer_label(i - 1, spec[i - 1]) + " produces " +
                       std::to_string(spec[i - 1].output_dim));
    }
  }
}

std::size_t input_dim(const NetworkSpec& spec) {
  validate(spec);
  return spec.front().input_dim;
}

std::size_t output_dim(const NetworkSpec& spec) {
  validate(spec);
  return spec.back().output_dim;
}

std::vector<std::span<double>> parameter_blocks(NetworkState& state) {
  std::vector<std::span<double>> blocks;
  for (auto& l : state.layers) {
    if (!l.weights.empty()) blocks.emplace_back(l.weights.values());
    if (!l.bias.empty()) blocks.emplace_back(l.bias);
    if (!l.gamma.empty()) blocks.emplace_back(l.gamma);
    if (!l.beta.empty()) blocks.emplace_back(l.beta);
  }
  return blocks;
}

std::vector<std::span<const double>> parameter_blocks(
    const NetworkState& state) {
  std::vector<std::span<const double>> blocks;
  for (const auto& l : state.layers) {
    if (!l.weights.empty()) blocks.emplace_back(l.weights.values());
    if (!l.bias.empty()) blocks.emplace_back(l.bias);
    if (!l.gamma.empty()) blocks.emplace_back(l.gamma);
    if (!l.beta.empty()) blocks.emplace_back(l.beta);
  }
  return blocks;
}

std::vector<std::span<double>> parameter_blocks(Gradients& grads) {
  std::vector<std::span<double>> blocks;
  for (auto& l : grads.layers) {
    if (!l.weights.empty()) blocks.emplace_back(l.weights.values());
    if (!l.bias.empty()) blocks.emplace_back(l.bias);
    if (!l.gamma.empty()) blocks.emplace_back(l.gamma);
    if (!l.beta.empty()) blocks.emplace_back(l.beta);
  }
  return blocks;
}

std::vector<std::span<const double>> parameter_blocks(const Gradients& grads) {
  std::vector<std::span<const double>> blocks;
  for (const auto& l : grads.layers) {
    if (!l.weights.empty()) blocks.emplace_back(l.weights.values());
    if (!l.bias.empty()) blocks.emplace_back(l.bias);
    if (!l.gamma.empty()) blocks.emplace_back(l.gamma);
    if (!l.beta.empty()) blocks.emplace_back(l.beta);
  }
  return blocks;
}

std::size_t parameter_count(const NetworkState& state) {
  std::size_t count = 0;
  for (const auto& block : parameter_blocks(state)) count += block.size();
  return count;
}

NetworkState init_state(const NetworkSpec& spec, Rng& rng) {
  validate(spec);
  NetworkState state;
  state.layers.resize(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const LayerSpec& layer = spec[i];
    LayerParams& p = state.layers[i];
    if (layer.kind == LayerKind::kDense) {
      const double limit = std::sqrt(
          6.0 / static_cast<double>(layer.input_dim + layer.output_dim));
      std::uniform_real_distribution<double> dist(-limit, limit);
      p.weights = Matrix(layer.input_dim, layer.output_dim);
      for (double& w : p.weights.values()) w = dist(rng);
      p.bias.assign(layer.output_dim, 0.0);
    } else if (layer.kind == LayerKind::kBatchNorm) {
      p.gamma.assign(layer.output_dim, 1.0);
      p.beta.assign(layer.output_dim, 0.0);
      p.running_mean.assign(layer.output_dim, 0.0);
      p.running_var.assign(layer.output_dim, 1.0);
    }
  }
  return state;
}

void check_state(const NetworkSpec& spec, const NetworkState& state) {
  if (state.layers.size() != spec.size()) {
    throw ShapeError("state has " + std::to_string(state.layers.size()) +
                     " layers, spec has " + std::to_string(spec.size()));
  }
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const LayerSpec& layer = spec[i];
    const LayerParams& p = state.layers[i];
    if (layer.kind == LayerKind::kDense) {
      if (p.weights.rows() != layer.input_dim ||
          p.weights.cols() != layer.output_dim ||
          p.bias.size() != layer.output_dim) {
        throw ShapeError(layer_label(i, layer) + " parameter shape mismatch");
      }
    } else if (layer.kind == LayerKind::kBatchNorm) {
      const std::size_t d = layer.output_dim;
      if (p.gamma.size() != d || p.beta.size() != d ||
          p.running_mean.size() != d || p.running_var.size() != d) {
        throw ShapeError(layer_label(i, layer) + " parameter shape mismatch");
      }
    }
  }
}

ForwardResult forward(const NetworkSpec& spec, NetworkState& state,
                      const Matrix& input, Mode mode, Rng* rng) {
  return forward_impl(spec, state, &state, input, mode, rng, true);
}

Matrix infer(const NetworkSpec& spec, const NetworkState& state,
             const Matrix& input) {
  return forward_impl(spec, state, nullptr, input, Mode::kInfer, nullptr, false)
      .output;
}

Matrix relu(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

Matrix sigmoid(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.values()) v = sigmoid_scalar(v);
  return out;
}

Matrix softmax(const Matrix& x) {
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    if (row.empty()) continue;
    const double peak = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - peak);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
  return out;
}

Matrix activation(LayerKind kind, const Matrix& x) {
  switch (kind) {
    case LayerKind::kRelu: return relu(x);
    case LayerKind::kSigmoid: return sigmoid(x);
    case LayerKind::kSoftmax: return softmax(x);
    default:
      throw PreconditionError(std::string("activation: ") + to_string(kind) +
                              " is not an activation");
  }
}

double loss_bce(std::span<const double> predicted,
                std::span<const double> target) {
  if (predicted.size() != target.size()) {
    throw ShapeError("loss_bce: " + std::to_string(predicted.size()) +
                     " predictions vs " + std::to_string(target.size()) +
                     " targets");
  }
  if (predicted.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double p = clip_probability(predicted[i]);
    const double t = target[i];
    total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
  }
  return total / static_cast<double>(predicted.size());
}

double loss_categorical_ce(const Matrix& predicted, const Matrix& target) {
  require_same_shape(predicted, target, "loss_categorical_ce");
  if (predicted.rows() == 0) return 0.0;
  double total = 0.0;
  const auto p = predicted.values();
  const auto t = target.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (t[i] != 0.0) total -= t[i] * std::log(clip_probability(p[i]));
  }
  return total / static_cast<double>(predicted.rows());
}

double loss(LossKind kind, const Matrix& predicted, const Matrix& target) {
  if (kind == LossKind::kBinaryCrossEntropy) {
    require_same_shape(predicted, target, "loss_bce");
    return loss_bce(predicted.values(), target.values());
  }
  return loss_categorical_ce(predicted, target);
}

BackwardResult backward(const NetworkSpec& spec, const NetworkState& state,
                        const ForwardCache& cache, LossKind loss_kind,
                        const Matrix& targets) {
  validate(spec);
  check_state(spec, state);
  check_cache(spec, cache);
  const Matrix& predicted = cache.layers.back().output;
  require_same_shape(predicted, targets, "backward targets");

  const LayerKind last = spec.back().kind;
  const bool fused =
      (last == LayerKind::kSigmoid &&
       loss_kind == LossKind::kBinaryCrossEntropy) ||
      (last == LayerKind::kSoftmax &&
       loss_kind == LossKind::kCategoricalCrossEntropy);
  if (!fused) {
    return backward_from(spec, state, cache, spec.size(),
                         output_grad_for_loss(predicted, targets, loss_kind));
  }
  // d(loss)/d(pre-activation) = (p - t) / count
  const double count = loss_kind == LossKind::kBinaryCrossEntropy
                           ? static_cast<double>(predicted.size())
                           : static_cast<double>(predicted.rows());
  Matrix grad(predicted.rows(), predicted.cols());
  const auto p = predicted.values();
  const auto t = targets.values();
  auto g = grad.values();
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = (p[i] - t[i]) / count;
  return backward_from(spec, state, cache, spec.size() - 1, std::move(grad));
}

BackwardResult backward_from_output_grad(const NetworkSpec& spec,
                                         const NetworkState& state,
                                         const ForwardCache& cache,
                                         const Matrix& output_grad) {
  validate(spec);
  check_state(spec, state);
  check_cache(spec, cache);
  require_same_shape(cache.layers.back().output, output_grad,
                     "backward output gradient");
  return backward_from(spec, state, cache, spec.size(), output_grad);
}

AdamState make_adam(const NetworkState& state, double learning_rate) {
  AdamState opt;
  opt.learning_rate = learning_rate;
  for (const auto& block : parameter_blocks(state)) {
    opt.first_moment.emplace_back(block.size(), 0.0);
    opt.second_moment.emplace_back(block.size(), 0.0);
  }
  return opt;
}

void adam_step(NetworkState& state, const Gradients& grads, AdamState& opt) {
  auto params = parameter_blocks(state);
  const auto gblocks = parameter_blocks(grads);
  if (params.size() != gblocks.size() ||
      params.size() != opt.first_moment.size() ||
      params.size() != opt.second_moment.size()) {
    throw ShapeError("adam_step: parameter, gradient and moment block counts "
                     "differ");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != gblocks[b].size() ||
        params[b].size() != opt.first_moment[b].size() ||
        params[b].size() != opt.second_moment[b].size()) {
      throw ShapeError("adam_step: block " + std::to_string(b) +
                       " size mismatch");
    }
  }
  ++opt.step_count;
  const double t = static_cast<double>(opt.step_count);
  const double correction1 = 1.0 - std::pow(opt.beta1, t);
  const double correction2 = 1.0 - std::pow(opt.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    const auto g = gblocks[b];
    auto& m = opt.first_moment[b];
    auto& v = opt.second_moment[b];
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = opt.beta1 * m[k] + (1.0 - opt.beta1) * g[k];
      v[k] = opt.beta2 * v[k] + (1.0 - opt.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      p[k] -= opt.learning_rate * m_hat / (std::sqrt(v_hat) + opt.epsilon);
    }
  }
}

}  // namespace imbgan::nn
