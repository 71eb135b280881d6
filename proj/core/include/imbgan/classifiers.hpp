#pragma once

// The four downstream classifiers: logistic regression, linear soft-margin
// SVM, CART decision tree (Gini) and a small MLP, plus scoring.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "imbgan/data.hpp"
#include "imbgan/matrix.hpp"
#include "imbgan/nn.hpp"

namespace imbgan::classifiers {

enum class ModelKind { kSvm, kDecisionTree, kLogReg, kMlp };

// "svm", "dt", "logreg", "mlp"
const char* to_string(ModelKind kind) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 200;
  double learning_rate = 1e-2;
  std::size_t batch_size = 32;
  std::size_t max_depth = 8;
  std::size_t min_leaf = 1;
  double svm_lambda = 1e-4;
  std::uint64_t seed = 0;

  static TrainConfig logreg_defaults();
  static TrainConfig svm_defaults();
  static TrainConfig tree_defaults();
  // lr 1e-5, 500 epochs
  static TrainConfig mlp_defaults();
  static TrainConfig defaults_for(ModelKind kind);
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
};

struct LinearSvmModel {
  std::vector<double> weights;
  double bias = 0.0;
  double regularization = 1e-4;
};

struct TreeNode {
  // Internal nodes: rows with x[feature] <= threshold go left.
  std::optional<std::size_t> feature;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  double positive_fraction = 0.0;
  std::size_t samples = 0;

  bool is_leaf() const noexcept { return !feature.has_value(); }
};

struct DecisionTreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t feature_count = 0;

  // Edges on the longest root-to-leaf path.
  std::size_t depth() const;
};

struct MlpModel {
  nn::NetworkSpec spec;
  nn::NetworkState state;
};

using Model =
    std::variant<LogisticModel, LinearSvmModel, DecisionTreeModel, MlpModel>;

ModelKind kind_of(const Model& model) noexcept;

// dense(30) relu -> dense(30) sigmoid -> dense(2) softmax
nn::NetworkSpec mlp_spec(std::size_t feature_count);

// Mean BCE of sigmoid(w.x + b), Adam over shuffled minibatches, zero start.
LogisticModel train_logreg(const data::Dataset& data, const TrainConfig& config);

// lambda * |w|^2 + mean hinge loss with labels mapped to -1/+1; minibatch
// subgradient steps with the L2 term applied as a proximal shrink.
LinearSvmModel train_svm(const data::Dataset& data, const TrainConfig& config);

// Greedy CART on Gini decrease. Candidate thresholds are midpoints between
// consecutive distinct values. Ties go to the lowest feature index, then the
// lowest threshold.
DecisionTreeModel train_tree(const data::Dataset& data,
                             const TrainConfig& config);

// Categorical cross-entropy on one-hot labels with Adam.
MlpModel train_mlp(const data::Dataset& data, const TrainConfig& config);

Model train(ModelKind kind, const data::Dataset& data,
            const TrainConfig& config);

double gini_impurity(std::size_t positives, std::size_t total);

struct SplitChoice {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

// Best split of `rows` under the tie rule, or nullopt when no candidate leaves
// at least `min_leaf` rows on each side.
std::optional<SplitChoice> best_split(const Matrix& features,
                                      std::span<const int> labels,
                                      std::span<const std::size_t> rows,
                                      std::size_t min_leaf);

// w.x + b for the linear models.
std::vector<double> raw_margin(const Model& model, const Matrix& x);

// Class-1 scores in [0, 1]: sigmoid of the margin (logreg, SVM), leaf
// positive fraction (tree), softmax class-1 probability (MLP).
std::vector<double> predict_score(const Model& model, const Matrix& x);

// 1 iff score > threshold.
std::vector<int> predict_label(const Model& model, const Matrix& x,
                               double threshold = 0.5);

// Self-describing text form: header line, kind, feature count, then
// parameters in row-major order at round-trip precision.
std::string serialize(const Model& model);
Model deserialize(std::string_view text);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace imbgan::classifiers
