#include "imbgan/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "imbgan/errors.hpp"

namespace imbgan::classifiers {

namespace {

// Decreases closer than this are treated as ties.
constexpr double kTieTolerance = 1e-12;

void require_both_classes(const data::Dataset& data, const char* who) {
  if (data.positive_count() == 0 || data.negative_count() == 0) {
    throw PreconditionError(std::string(who) +
                            ": training data must contain both classes");
  }
}

void require_columns(const Matrix& x, std::size_t expected) {
  if (x.cols() != expected) {
    throw ShapeError("model expects " + std::to_string(expected) +
                     " features, input has " + std::to_string(x.cols()));
  }
}

void require_trainable(const TrainConfig& config) {
  if (config.epochs == 0 || config.batch_size == 0 ||
      !(config.learning_rate > 0.0)) {
    throw PreconditionError(
        "train config needs epochs >= 1, batch_size >= 1, learning_rate > 0");
  }
}

// Calls fn(batch_rows) for every minibatch of every epoch; rows are
// reshuffled at the start of each epoch.
void for_each_minibatch(
    std::size_t rows, const TrainConfig& config, Rng& rng,
    const std::function<void(std::span<const std::size_t>)>& fn) {
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < rows; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, rows - start);
      fn(std::span<const std::size_t>(order.data() + start, len));
    }
  }
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<double> linear_margin(std::span<const double> w, double b,
                                  const Matrix& x) {
  require_columns(x, w.size());
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    out[r] = std::inner_product(row.begin(), row.end(), w.begin(), b);
  }
  return out;
}

std::size_t grow(DecisionTreeModel& tree, const data::Dataset& data,
                 std::vector<std::size_t> rows, std::size_t depth,
                 const TrainConfig& config) {
  std::size_t positives = 0;
  for (std::size_t r : rows) positives += data.labels[r] == 1 ? 1 : 0;
  const std::size_t index = tree.nodes.size();
  tree.nodes.push_back(TreeNode{});
  tree.nodes[index].samples = rows.size();
  tree.nodes[index].positive_fraction =
      rows.empty() ? 0.0
                   : static_cast<double>(positives) /
                         static_cast<double>(rows.size());

  const bool pure = positives == 0 || positives == rows.size();
  if (pure || depth >= config.max_depth || rows.size() < 2 * config.min_leaf) {
    return index;
  }
  const auto split =
      best_split(data.features, data.labels, rows, config.min_leaf);
  if (!split) return index;

  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  for (std::size_t r : rows) {
    (data.features(r, split->feature) <= split->threshold ? left : right)
        .push_back(r);
  }
  rows.clear();
  rows.shrink_to_fit();
  tree.nodes[index].feature = split->feature;
  tree.nodes[index].threshold = split->threshold;
  const std::size_t l = grow(tree, data, std::move(left), depth + 1, config);
  const std::size_t r = grow(tree, data, std::move(right), depth + 1, config);
  tree.nodes[index].left = l;
  tree.nodes[index].right = r;
  return index;
}

const TreeNode& leaf_for(const DecisionTreeModel& tree,
                         std::span<const double> row) {
  std::size_t node = 0;
  while (!tree.nodes[node].is_leaf()) {
    const TreeNode& n = tree.nodes[node];
    node = row[*n.feature] <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[node];
}

Matrix one_hot(const data::Dataset& data, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(i, static_cast<std::size_t>(data.labels[rows[i]])) = 1.0;
  }
  return out;
}

}  // namespace

const char* to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::kSvm: return "svm";
    case ModelKind::kDecisionTree: return "dt";
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kMlp: return "mlp";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::kSvm, ModelKind::kDecisionTree,
                      ModelKind::kLogReg, ModelKind::kMlp}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

TrainConfig TrainConfig::logreg_defaults() { return TrainConfig{}; }

TrainConfig TrainConfig::svm_defaults() { return TrainConfig{}; }

TrainConfig TrainConfig::tree_defaults() { return TrainConfig{}; }

TrainConfig TrainConfig::mlp_defaults() {
  TrainConfig c;
  c.epochs = 500;
  c.learning_rate = 1e-5;
  return c;
}

TrainConfig TrainConfig::defaults_for(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSvm: return svm_defaults();
    case ModelKind::kDecisionTree: return tree_defaults();
    case ModelKind::kLogReg: return logreg_defaults();
    case ModelKind::kMlp: return mlp_defaults();
  }
  return TrainConfig{};
}

std::size_t DecisionTreeModel::depth() const {
  if (nodes.empty()) return 0;
  std::function<std::size_t(std::size_t)> walk = [&](std::size_t i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) return std::size_t{0};
    return 1 + std::max(walk(n.left), walk(n.right));
  };
  return walk(0);
}

ModelKind kind_of(const Model& model) noexcept {
  switch (model.index()) {
    case 0: return ModelKind::kLogReg;
    case 1: return ModelKind::kSvm;
    case 2: return ModelKind::kDecisionTree;
    default: return ModelKind::kMlp;
  }
}

nn::NetworkSpec mlp_spec(std::size_t feature_count) {
  using nn::LayerSpec;
  return {
      LayerSpec::dense(feature_count, 30), LayerSpec::relu(30),
      LayerSpec::dense(30, 30),            LayerSpec::sigmoid(30),
      LayerSpec::dense(30, 2),             LayerSpec::softmax(2),
  };
}

LogisticModel train_logreg(const data::Dataset& data,
                           const TrainConfig& config) {
  require_both_classes(data, "train_logreg");
  require_trainable(config);
  const std::size_t d = data.feature_count();
  const nn::NetworkSpec spec = {nn::LayerSpec::dense(d, 1),
                                nn::LayerSpec::sigmoid(1)};
  nn::NetworkState state;
  state.layers.resize(2);
  state.layers[0].weights = Matrix(d, 1);
  state.layers[0].bias.assign(1, 0.0);
  nn::AdamState opt = nn::make_adam(state, config.learning_rate);

  Rng rng(config.seed);
  for_each_minibatch(data.size(), config, rng, [&](auto rows) {
    const Matrix x = data.features.take_rows(rows);
    Matrix t(rows.size(), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) t(i, 0) = data.labels[rows[i]];
    const auto pass = nn::forward(spec, state, x, nn::Mode::kTrain);
    const auto grads = nn::backward(spec, state, pass.cache,
                                    nn::LossKind::kBinaryCrossEntropy, t);
    nn::adam_step(state, grads.grads, opt);
  });
  const auto w = state.layers[0].weights.values();
  return LogisticModel{std::vector<double>(w.begin(), w.end()),
                       state.layers[0].bias[0]};
}

LinearSvmModel train_svm(const data::Dataset& data, const TrainConfig& config) {
  require_both_classes(data, "train_svm");
  require_trainable(config);
  if (!(config.svm_lambda > 0.0)) {
    throw PreconditionError("train_svm: regularization must be > 0");
  }
  const std::size_t d = data.feature_count();
  LinearSvmModel model{std::vector<double>(d, 0.0), 0.0, config.svm_lambda};
  const double shrink = 1.0 / (1.0 + 2.0 * config.learning_rate * config.svm_lambda);
  std::vector<double> grad_w(d);

  Rng rng(config.seed);
  for_each_minibatch(data.size(), config, rng, [&](auto rows) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double grad_b = 0.0;
    const double scale = 1.0 / static_cast<double>(rows.size());
    for (std::size_t r : rows) {
      const auto x = data.features.row(r);
      const double y = data.labels[r] == 1 ? 1.0 : -1.0;
      const double margin =
          std::inner_product(x.begin(), x.end(), model.weights.begin(),
                             model.bias);
      if (y * margin < 1.0) {
        for (std::size_t c = 0; c < d; ++c) grad_w[c] -= y * x[c] * scale;
        grad_b -= y * scale;
      }
    }
    for (std::size_t c = 0; c < d; ++c) {
      model.weights[c] =
          (model.weights[c] - config.learning_rate * grad_w[c]) * shrink;
    }
    model.bias -= config.learning_rate * grad_b;
  });
  return model;
}

double gini_impurity(std::size_t positives, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

std::optional<SplitChoice> best_split(const Matrix& features,
                                      std::span<const int> labels,
                                      std::span<const std::size_t> rows,
                                      std::size_t min_leaf) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;
  const std::size_t leaf = std::max<std::size_t>(min_leaf, 1);
  std::size_t total_pos = 0;
  for (std::size_t r : rows) total_pos += labels[r] == 1 ? 1 : 0;
  const double parent = gini_impurity(total_pos, n);
  const double nd = static_cast<double>(n);

  std::optional<SplitChoice> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t f = 0; f < features.cols(); ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = features(a, f);
      const double vb = features(b, f);
      return va < vb || (va == vb && a < b);
    });
    std::size_t left_pos = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_pos += labels[order[i]] == 1 ? 1 : 0;
      const double lo = features(order[i], f);
      const double hi = features(order[i + 1], f);
      if (!(lo < hi)) continue;
      const std::size_t left_n = i + 1;
      const std::size_t right_n = n - left_n;
      if (left_n < leaf || right_n < leaf) continue;
      const double children =
          static_cast<double>(left_n) / nd * gini_impurity(left_pos, left_n) +
          static_cast<double>(right_n) / nd *
              gini_impurity(total_pos - left_pos, right_n);
      const double decrease = parent - children;
      if (!best || decrease > best->impurity_decrease + kTieTolerance) {
        double mid = lo + (hi - lo) / 2.0;
        if (!(mid < hi)) mid = lo;
        best = SplitChoice{f, mid, decrease};
      }
    }
  }
  return best;
}

DecisionTreeModel train_tree(const data::Dataset& data,
                             const TrainConfig& config) {
  if (data.size() == 0) {
    throw PreconditionError("train_tree: training data is empty");
  }
  DecisionTreeModel tree;
  tree.feature_count = data.feature_count();
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  grow(tree, data, std::move(rows), 0, config);
  return tree;
}

MlpModel train_mlp(const data::Dataset& data, const TrainConfig& config) {
  require_both_classes(data, "train_mlp");
  require_trainable(config);
  Rng rng(config.seed);
  MlpModel model;
  model.spec = mlp_spec(data.feature_count());
  model.state = nn::init_state(model.spec, rng);
  nn::AdamState opt = nn::make_adam(model.state, config.learning_rate);

  for_each_minibatch(data.size(), config, rng, [&](auto rows) {
    const Matrix x = data.features.take_rows(rows);
    const auto pass = nn::forward(model.spec, model.state, x, nn::Mode::kTrain);
    const auto grads =
        nn::backward(model.spec, model.state, pass.cache,
                     nn::LossKind::kCategoricalCrossEntropy, one_hot(data, rows));
    nn::adam_step(model.state, grads.grads, opt);
  });
  return model;
}

Model train(ModelKind kind, const data::Dataset& data,
            const TrainConfig& config) {
  switch (kind) {
    case ModelKind::kSvm: return train_svm(data, config);
    case ModelKind::kDecisionTree: return train_tree(data, config);
    case ModelKind::kLogReg: return train_logreg(data, config);
    case ModelKind::kMlp: return train_mlp(data, config);
  }
  throw PreconditionError("unknown model kind");
}

std::vector<double> raw_margin(const Model& model, const Matrix& x) {
  if (const auto* m = std::get_if<LogisticModel>(&model)) {
    return linear_margin(m->weights, m->bias, x);
  }
  if (const auto* m = std::get_if<LinearSvmModel>(&model)) {
    return linear_margin(m->weights, m->bias, x);
  }
  throw PreconditionError("raw_margin is defined for linear models only");
}

std::vector<double> predict_score(const Model& model, const Matrix& x) {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LogisticModel> ||
                      std::is_same_v<T, LinearSvmModel>) {
          auto scores = linear_margin(m.weights, m.bias, x);
          for (double& s : scores) s = sigmoid(s);
          return scores;
        } else if constexpr (std::is_same_v<T, DecisionTreeModel>) {
          require_columns(x, m.feature_count);
          if (m.nodes.empty()) throw PreconditionError("empty decision tree");
          std::vector<double> scores(x.rows());
          for (std::size_t r = 0; r < x.rows(); ++r) {
            scores[r] = leaf_for(m, x.row(r)).positive_fraction;
          }
          return scores;
        } else {
          require_columns(x, nn::input_dim(m.spec));
          const Matrix probs = nn::infer(m.spec, m.state, x);
          std::vector<double> scores(x.rows());
          for (std::size_t r = 0; r < x.rows(); ++r) scores[r] = probs(r, 1);
          return scores;
        }
      },
      model);
}

std::vector<int> predict_label(const Model& model, const Matrix& x,
                               double threshold) {
  const auto scores = predict_score(model, x);
  std::vector<int> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    labels[i] = scores[i] > threshold ? 1 : 0;
  }
  return labels;
}

}  // namespace imbgan::classifiers
