#pragma once

// Reference implementations used only by tests. Each one is written
// independently of the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "imbgan/matrix.hpp"
#include "imbgan/nn.hpp"
#include "imbgan/random.hpp"

namespace imbgan::testing {

// ---------------------------------------------------------------- AUC

// P(score of random positive > score of random negative), ties count half.
inline double pair_count_auc(std::span<const int> y, std::span<const double> s) {
  double concordant = 0.0;
  std::size_t pos = 0;
  std::size_t neg = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1) ++pos; else ++neg;
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != 0) continue;
      if (s[i] > s[j]) concordant += 1.0;
      else if (s[i] == s[j]) concordant += 0.5;
    }
  }
  return concordant / (static_cast<double>(pos) * static_cast<double>(neg));
}

struct AucInstance {
  std::vector<int> labels;
  std::vector<double> scores;
};

// Both classes present; scores drawn from a small grid so ties are common.
inline AucInstance random_auc_instance(Rng& rng, std::size_t max_rows = 200) {
  std::uniform_int_distribution<std::size_t> rows_dist(2, max_rows);
  std::uniform_int_distribution<int> grid_dist(1, 25);
  const std::size_t n = rows_dist(rng);
  const int grid = grid_dist(rng);
  std::uniform_int_distribution<int> score_dist(0, grid);
  std::bernoulli_distribution label_dist(0.3);
  AucInstance inst;
  inst.labels.resize(n);
  inst.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.labels[i] = label_dist(rng) ? 1 : 0;
    inst.scores[i] = static_cast<double>(score_dist(rng)) / grid;
  }
  inst.labels[0] = 1;
  inst.labels[1] = 0;
  std::shuffle(inst.labels.begin(), inst.labels.end(), rng);
  return inst;
}

// ---------------------------------------------------------------- tree

struct OracleSplit {
  std::size_t feature = 0;
  double threshold = 0.0;
  double decrease = 0.0;
};

inline double gini(double pos, double total) {
  if (total == 0.0) return 0.0;
  const double p = pos / total;
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

// Every (feature, midpoint) candidate scored by a direct scan of the rows.
// Earlier candidates (lower feature, then lower threshold) win unless a later
// one is better by more than 1e-12.
inline std::optional<OracleSplit> exhaustive_split(const Matrix& x,
                                                   std::span<const int> y,
                                                   std::size_t min_leaf) {
  const std::size_t n = x.rows();
  double total_pos = 0.0;
  for (int v : y) total_pos += v;
  const double parent = gini(total_pos, static_cast<double>(n));
  std::optional<OracleSplit> best;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::set<double> distinct;
    for (std::size_t r = 0; r < n; ++r) distinct.insert(x(r, f));
    std::vector<double> values(distinct.begin(), distinct.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double t = (values[k] + values[k + 1]) / 2.0;
      double ln = 0, lp = 0, rn = 0, rp = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (x(r, f) <= t) { ln += 1; lp += y[r]; } else { rn += 1; rp += y[r]; }
      }
      if (ln < static_cast<double>(min_leaf) ||
          rn < static_cast<double>(min_leaf)) {
        continue;
      }
      const double d = parent - (ln / n) * gini(lp, ln) - (rn / n) * gini(rp, rn);
      if (!best || d > best->decrease + 1e-12) best = OracleSplit{f, t, d};
    }
  }
  return best;
}

struct TreeInstance {
  Matrix x;
  std::vector<int> y;
};

// Up to 16 rows and 4 features on a coarse value grid, so duplicate values
// and tied candidates are frequent.
inline TreeInstance random_tree_instance(Rng& rng) {
  std::uniform_int_distribution<std::size_t> rows_dist(2, 16);
  std::uniform_int_distribution<std::size_t> cols_dist(1, 4);
  std::uniform_int_distribution<int> value_dist(0, 5);
  std::bernoulli_distribution label_dist(0.5);
  TreeInstance inst;
  const std::size_t n = rows_dist(rng);
  const std::size_t d = cols_dist(rng);
  inst.x = Matrix(n, d);
  inst.y.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) inst.x(r, c) = value_dist(rng) * 0.25;
    inst.y[r] = label_dist(rng) ? 1 : 0;
  }
  return inst;
}

// ---------------------------------------------------------------- gradients

struct GradientCase {
  nn::NetworkSpec spec;
  nn::LossKind loss = nn::LossKind::kBinaryCrossEntropy;
  Matrix input;
  Matrix targets;
  std::uint64_t dropout_seed = 0;
};

// A random stack: dense first, then a shuffled selection of hidden layers
// (every kind when `all_kinds`), then a dense head with sigmoid (BCE) or
// softmax (categorical CE).
inline GradientCase random_gradient_case(Rng& rng, bool all_kinds,
                                         nn::LossKind loss) {
  using nn::LayerSpec;
  std::uniform_int_distribution<std::size_t> dim_dist(2, 5);
  std::uniform_int_distribution<std::size_t> batch_dist(3, 6);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal(0.0, 1.0);

  GradientCase gc;
  gc.loss = loss;
  const std::size_t in = dim_dist(rng);
  std::size_t width = dim_dist(rng);
  gc.spec.push_back(LayerSpec::dense(in, width));

  std::vector<nn::LayerKind> hidden = {
      nn::LayerKind::kRelu, nn::LayerKind::kSigmoid, nn::LayerKind::kSoftmax,
      nn::LayerKind::kBatchNorm, nn::LayerKind::kDropout};
  std::shuffle(hidden.begin(), hidden.end(), rng);
  for (nn::LayerKind k : hidden) {
    if (!all_kinds && coin(rng)) continue;
    switch (k) {
      case nn::LayerKind::kRelu: gc.spec.push_back(LayerSpec::relu(width)); break;
      case nn::LayerKind::kSigmoid: gc.spec.push_back(LayerSpec::sigmoid(width)); break;
      case nn::LayerKind::kSoftmax: gc.spec.push_back(LayerSpec::softmax(width)); break;
      case nn::LayerKind::kBatchNorm: gc.spec.push_back(LayerSpec::batchnorm(width)); break;
      case nn::LayerKind::kDropout: gc.spec.push_back(LayerSpec::dropout(width, 0.3)); break;
      default: break;
    }
    if (coin(rng)) {
      const std::size_t next = dim_dist(rng);
      gc.spec.push_back(LayerSpec::dense(width, next));
      width = next;
    }
  }
  const std::size_t out =
      loss == nn::LossKind::kBinaryCrossEntropy ? dim_dist(rng) - 1 : dim_dist(rng);
  gc.spec.push_back(LayerSpec::dense(width, out));
  gc.spec.push_back(loss == nn::LossKind::kBinaryCrossEntropy
                        ? LayerSpec::sigmoid(out)
                        : LayerSpec::softmax(out));

  const std::size_t batch = batch_dist(rng);
  gc.input = Matrix(batch, in);
  for (double& v : gc.input.values()) v = normal(rng);
  gc.targets = Matrix(batch, out);
  std::uniform_int_distribution<std::size_t> cls(0, out - 1);
  for (std::size_t r = 0; r < batch; ++r) {
    if (loss == nn::LossKind::kBinaryCrossEntropy) {
      for (std::size_t c = 0; c < out; ++c) gc.targets(r, c) = coin(rng) ? 1.0 : 0.0;
    } else {
      gc.targets(r, cls(rng)) = 1.0;
    }
  }
  gc.dropout_seed = rng();
  return gc;
}

inline double relative_error(double analytic, double numeric) {
  // With h = 1e-5 a central difference carries roughly ulp(loss) / h ~ 1e-11
  // of cancellation noise, so gradients below 1e-6 are compared on an
  // absolute scale; exactly-zero gradients (a bias feeding batchnorm) would
  // otherwise fail on noise alone.
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

// Loss of a train-mode pass with a fixed dropout mask, evaluated on a copy of
// the state so running statistics never leak between evaluations.
inline double case_loss(const GradientCase& gc, const nn::NetworkState& state,
                        const Matrix& input) {
  nn::NetworkState scratch = state;
  Rng rng(gc.dropout_seed);
  const auto fr = nn::forward(gc.spec, scratch, input, nn::Mode::kTrain, &rng);
  return nn::loss(gc.loss, fr.output, gc.targets);
}

struct GradientReport {
  double max_parameter_error = 0.0;
  double max_input_error = 0.0;
  std::size_t checked = 0;
};

// Central differences with step h over every trainable parameter and every
// input entry, compared with backward().
inline GradientReport check_gradients(const GradientCase& gc,
                                      const nn::NetworkState& initial,
                                      double h = 1e-5) {
  GradientReport report;
  nn::NetworkState state = initial;
  nn::NetworkState forward_state = initial;
  Rng rng(gc.dropout_seed);
  const auto fr =
      nn::forward(gc.spec, forward_state, gc.input, nn::Mode::kTrain, &rng);
  const auto br = nn::backward(gc.spec, initial, fr.cache, gc.loss, gc.targets);

  auto params = nn::parameter_blocks(state);
  const auto grads = nn::parameter_blocks(br.grads);
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      const double saved = params[b][i];
      params[b][i] = saved + h;
      const double up = case_loss(gc, state, gc.input);
      params[b][i] = saved - h;
      const double down = case_loss(gc, state, gc.input);
      params[b][i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      report.max_parameter_error = std::max(
          report.max_parameter_error, relative_error(grads[b][i], numeric));
      ++report.checked;
    }
  }
  Matrix x = gc.input;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x.values()[i];
    x.values()[i] = saved + h;
    const double up = case_loss(gc, state, x);
    x.values()[i] = saved - h;
    const double down = case_loss(gc, state, x);
    x.values()[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    report.max_input_error = std::max(
        report.max_input_error, relative_error(br.input_grad.values()[i], numeric));
    ++report.checked;
  }
  return report;
}

}  // namespace imbgan::testing

namespace imbgan::testing {

// Means of the first and last `fraction` of a series.
inline std::pair<double, double> edge_window_means(std::span<const double> xs,
                                                   double fraction = 0.1) {
  const std::size_t w = std::max<std::size_t>(
      1, static_cast<std::size_t>(static_cast<double>(xs.size()) * fraction));
  double first = 0.0;
  double last = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    first += xs[i];
    last += xs[xs.size() - w + i];
  }
  return {first / static_cast<double>(w), last / static_cast<double>(w)};
}

// `rows` x `features` cluster around `center` with spread `sd`, clipped into
// [0, 1]; all labels 1.
inline std::pair<Matrix, std::vector<int>> positive_cluster(
    std::size_t rows, std::size_t features, double center, double sd,
    std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(center, sd);
  Matrix x(rows, features);
  for (double& v : x.values()) v = std::clamp(normal(rng), 0.0, 1.0);
  return {std::move(x), std::vector<int>(rows, 1)};
}

}  // namespace imbgan::testing
