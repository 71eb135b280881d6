#include <gtest/gtest.h>

#include <cmath>

#include "imbgan/errors.hpp"
#include "imbgan/nn.hpp"
#include "oracles.hpp"

namespace imbgan {
namespace {

using nn::LayerSpec;

TEST(Dense, IdentityWeightsPassInputThrough) {
  const nn::NetworkSpec spec = {LayerSpec::dense(3, 3)};
  Rng rng(1);
  nn::NetworkState state = nn::init_state(spec, rng);
  state.layers[0].weights = Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  state.layers[0].bias = {0, 0, 0};
  EXPECT_EQ(nn::infer(spec, state, Matrix{{1, 2, 3}}), (Matrix{{1, 2, 3}}));
}

TEST(Dense, ZeroInputYieldsBias) {
  const nn::NetworkSpec spec = {LayerSpec::dense(4, 2)};
  Rng rng(2);
  nn::NetworkState state = nn::init_state(spec, rng);
  state.layers[0].bias = {0.25, -3.0};
  EXPECT_EQ(nn::infer(spec, state, Matrix(1, 4)), (Matrix{{0.25, -3.0}}));
}

TEST(Dense, HandProduct) {
  const nn::NetworkSpec spec = {LayerSpec::dense(2, 1)};
  Rng rng(3);
  nn::NetworkState state = nn::init_state(spec, rng);
  state.layers[0].weights = Matrix{{2}, {3}};
  state.layers[0].bias = {1};
  EXPECT_EQ(nn::infer(spec, state, Matrix{{1, 1}}), (Matrix{{6}}));
}

TEST(Activations, Definitions) {
  EXPECT_EQ(nn::relu(Matrix{{-1, 0, 2}}), (Matrix{{0, 0, 2}}));
  EXPECT_DOUBLE_EQ(nn::sigmoid(Matrix{{0}})(0, 0), 0.5);
  const Matrix s = nn::softmax(Matrix{{0, 0}});
  EXPECT_DOUBLE_EQ(s(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.5);
}

TEST(Activations, SigmoidStaysInsideOpenInterval) {
  const Matrix s = nn::sigmoid(Matrix{{-1000, -40, 40, 1000}});
  for (double v : s.values()) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Activations, SoftmaxRowsSumToOneWithLargeLogits) {
  const Matrix s = nn::softmax(Matrix{{1000, 999, -5}, {-3, 0.5, 2}});
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double sum = 0;
    for (double v : s.row(r)) {
      EXPECT_TRUE(std::isfinite(v));
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Loss, BinaryCrossEntropyExamples) {
  const std::vector<double> half = {0.5};
  const std::vector<double> one = {1.0};
  EXPECT_NEAR(nn::loss_bce(half, one), std::log(2.0), 1e-12);
  const std::vector<double> near_one = {1.0 - 1e-12};
  EXPECT_NEAR(nn::loss_bce(near_one, one), 0.0, 1e-6);
  const std::vector<double> p = {0.9, 0.1};
  const std::vector<double> t = {1.0, 0.0};
  EXPECT_NEAR(nn::loss_bce(p, t), 0.10536051565782628, 1e-12);
}

TEST(Loss, CategoricalCrossEntropyExamples) {
  EXPECT_NEAR(nn::loss_categorical_ce(Matrix{{1 - 1e-12, 1e-12}}, Matrix{{1, 0}}),
              0.0, 1e-6);
  EXPECT_NEAR(nn::loss_categorical_ce(Matrix{{0.5, 0.5}}, Matrix{{0, 1}}),
              std::log(2.0), 1e-12);
  EXPECT_NEAR(nn::loss_categorical_ce(Matrix{{0.8, 0.2}, {0.3, 0.7}},
                                      Matrix{{1, 0}, {0, 1}}),
              (-std::log(0.8) - std::log(0.7)) / 2.0, 1e-12);
}

TEST(Backward, FusedSigmoidBceSingleUnit) {
  const nn::NetworkSpec spec = {LayerSpec::dense(1, 1), LayerSpec::sigmoid(1)};
  Rng rng(4);
  nn::NetworkState state = nn::init_state(spec, rng);
  state.layers[0].weights = Matrix{{0}};
  state.layers[0].bias = {0};
  const auto fr = nn::forward(spec, state, Matrix{{1}}, nn::Mode::kTrain);
  const auto br = nn::backward(spec, state, fr.cache,
                               nn::LossKind::kBinaryCrossEntropy, Matrix{{1}});
  EXPECT_DOUBLE_EQ(br.grads.layers[0].weights(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(br.grads.layers[0].bias[0], -0.5);
}

TEST(Backward, ZeroLossConfigurationHasZeroGradients) {
  for (nn::LossKind kind : {nn::LossKind::kBinaryCrossEntropy,
                            nn::LossKind::kCategoricalCrossEntropy}) {
    const nn::NetworkSpec spec = {
        LayerSpec::dense(3, 4), LayerSpec::relu(4), LayerSpec::dense(4, 2),
        kind == nn::LossKind::kBinaryCrossEntropy ? LayerSpec::sigmoid(2)
                                                  : LayerSpec::softmax(2)};
    Rng rng(5);
    nn::NetworkState state = nn::init_state(spec, rng);
    const Matrix x{{0.1, -0.2, 0.3}, {1.0, 0.5, -0.5}};
    const auto fr = nn::forward(spec, state, x, nn::Mode::kTrain);
    const auto br = nn::backward(spec, state, fr.cache, kind, fr.output);
    for (auto block : nn::parameter_blocks(br.grads)) {
      for (double g : block) EXPECT_EQ(g, 0.0);
    }
  }
}

TEST(Backward, MatchesCentralDifferences) {
  Rng rng(20240611);
  for (int i = 0; i < 20; ++i) {
    const auto loss = i % 2 == 0 ? nn::LossKind::kBinaryCrossEntropy
                                 : nn::LossKind::kCategoricalCrossEntropy;
    const auto gc = testing::random_gradient_case(rng, i < 2, loss);
    const auto state = nn::init_state(gc.spec, rng);
    const auto report = testing::check_gradients(gc, state);
    EXPECT_LT(report.max_parameter_error, 1e-4) << "case " << i;
    EXPECT_LT(report.max_input_error, 1e-4) << "case " << i;
  }
}

TEST(Backward, ExternalOutputGradientMatchesLinearFunctional) {
  // L = sum(G * output): d L / d output = G exactly.
  const nn::NetworkSpec spec = {LayerSpec::dense(3, 4), LayerSpec::batchnorm(4),
                                LayerSpec::relu(4), LayerSpec::dense(4, 2)};
  Rng rng(6);
  const nn::NetworkState state = nn::init_state(spec, rng);
  const Matrix x{{0.3, -1.0, 2.0}, {1.5, 0.2, -0.7}, {-0.4, 0.9, 0.1}};
  const Matrix g{{1.0, -2.0}, {0.5, 0.25}, {-1.5, 3.0}};
  auto functional = [&](const nn::NetworkState& s) {
    nn::NetworkState scratch = s;
    const auto out = nn::forward(spec, scratch, x, nn::Mode::kTrain).output;
    double total = 0;
    for (std::size_t i = 0; i < out.size(); ++i) total += out.values()[i] * g.values()[i];
    return total;
  };
  nn::NetworkState scratch = state;
  const auto fr = nn::forward(spec, scratch, x, nn::Mode::kTrain);
  const auto br = nn::backward_from_output_grad(spec, state, fr.cache, g);
  nn::NetworkState probe = state;
  auto params = nn::parameter_blocks(probe);
  const auto grads = nn::parameter_blocks(br.grads);
  const double h = 1e-5;
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      const double saved = params[b][i];
      params[b][i] = saved + h;
      const double up = functional(probe);
      params[b][i] = saved - h;
      const double down = functional(probe);
      params[b][i] = saved;
      EXPECT_LT(testing::relative_error(grads[b][i], (up - down) / (2 * h)), 1e-4);
    }
  }
}

TEST(Dropout, InferIsIdentityAndTrainUsesInvertedScaling) {
  const nn::NetworkSpec spec = {LayerSpec::dropout(50, 0.2)};
  Rng rng(7);
  nn::NetworkState state = nn::init_state(spec, rng);
  const Matrix x(40, 50, 1.0);
  EXPECT_EQ(nn::infer(spec, state, x), x);
  const auto out = nn::forward(spec, state, x, nn::Mode::kTrain, &rng).output;
  double sum = 0;
  std::size_t zeros = 0;
  for (double v : out.values()) {
    EXPECT_TRUE(v == 0.0 || std::abs(v - 1.25) < 1e-12);
    zeros += v == 0.0 ? 1 : 0;
    sum += v;
  }
  const double n = static_cast<double>(out.size());
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.2, 0.03);
  EXPECT_NEAR(sum / n, 1.0, 0.05);
}

TEST(Dropout, TrainModeWithoutRngIsRejected) {
  const nn::NetworkSpec spec = {LayerSpec::dropout(2, 0.5)};
  Rng rng(8);
  nn::NetworkState state = nn::init_state(spec, rng);
  EXPECT_THROW(nn::forward(spec, state, Matrix(1, 2), nn::Mode::kTrain),
               PreconditionError);
}

TEST(BatchNorm, TrainNormalizesBatchAndInferUsesRunningStats) {
  const nn::NetworkSpec spec = {LayerSpec::batchnorm(2)};
  Rng rng(9);
  nn::NetworkState state = nn::init_state(spec, rng);
  const Matrix x{{1, 10}, {2, 20}, {3, 30}, {4, 40}};
  const auto out = nn::forward(spec, state, x, nn::Mode::kTrain).output;
  for (std::size_t c = 0; c < 2; ++c) {
    double mean = 0, var = 0;
    for (std::size_t r = 0; r < 4; ++r) mean += out(r, c) / 4;
    for (std::size_t r = 0; r < 4; ++r) var += (out(r, c) - mean) * (out(r, c) - mean) / 4;
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(var, 1.0, 1e-3);
  }
  // Running stats moved by (1 - momentum) toward the batch statistics.
  const auto& bn = state.layers[0];
  EXPECT_NEAR(bn.running_mean[0], 0.01 * 2.5, 1e-12);
  EXPECT_NEAR(bn.running_var[0], 0.99 + 0.01 * 1.25, 1e-12);

  const nn::NetworkState before = state;
  const Matrix inferred = nn::infer(spec, state, Matrix{{2.5, 25}});
  EXPECT_NEAR(inferred(0, 0),
              (2.5 - bn.running_mean[0]) / std::sqrt(bn.running_var[0] + 1e-5), 1e-12);
  nn::forward(spec, state, x, nn::Mode::kInfer);
  EXPECT_EQ(state, before);
}

TEST(Adam, ZeroGradientsLeaveParametersUnchanged) {
  const nn::NetworkSpec spec = {LayerSpec::dense(3, 2), LayerSpec::batchnorm(2)};
  Rng rng(10);
  nn::NetworkState state = nn::init_state(spec, rng);
  const nn::NetworkState before = state;
  nn::Gradients zero;
  zero.layers.resize(2);
  zero.layers[0].weights = Matrix(3, 2);
  zero.layers[0].bias.assign(2, 0.0);
  zero.layers[1].gamma.assign(2, 0.0);
  zero.layers[1].beta.assign(2, 0.0);
  auto opt = nn::make_adam(state, 1e-3);
  nn::adam_step(state, zero, opt);
  EXPECT_EQ(state, before);
  EXPECT_EQ(opt.step_count, 1u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  const nn::NetworkSpec spec = {LayerSpec::dense(1, 1)};
  Rng rng(11);
  nn::NetworkState state = nn::init_state(spec, rng);
  state.layers[0].weights = Matrix{{0}};
  nn::Gradients g;
  g.layers.resize(1);
  g.layers[0].weights = Matrix{{1}};
  g.layers[0].bias = {0};
  auto opt = nn::make_adam(state, 0.1);
  nn::adam_step(state, g, opt);
  EXPECT_NEAR(state.layers[0].weights(0, 0), -0.1, 1e-6);
}

TEST(Adam, IdenticalParametersStayIdentical) {
  const nn::NetworkSpec spec = {LayerSpec::dense(2, 1)};
  Rng rng(12);
  nn::NetworkState state = nn::init_state(spec, rng);
  state.layers[0].weights = Matrix{{0.3}, {0.3}};
  auto opt = nn::make_adam(state, 0.01);
  std::normal_distribution<double> normal;
  for (int step = 0; step < 50; ++step) {
    nn::Gradients g;
    g.layers.resize(1);
    const double v = normal(rng);
    g.layers[0].weights = Matrix{{v}, {v}};
    g.layers[0].bias = {normal(rng)};
    nn::adam_step(state, g, opt);
    ASSERT_EQ(state.layers[0].weights(0, 0), state.layers[0].weights(1, 0));
  }
}

TEST(Init, SameSeedSameStateAndZeroBiases) {
  const nn::NetworkSpec spec = {LayerSpec::dense(5, 7), LayerSpec::relu(7),
                                LayerSpec::dense(7, 1)};
  Rng a(13), b(13);
  const auto sa = nn::init_state(spec, a);
  EXPECT_EQ(sa, nn::init_state(spec, b));
  const double limit = std::sqrt(6.0 / 12.0);
  for (double w : sa.layers[0].weights.values()) EXPECT_LE(std::abs(w), limit);
  for (double v : sa.layers[0].bias) EXPECT_EQ(v, 0.0);
}

TEST(Validate, RejectsBrokenChains) {
  EXPECT_THROW(nn::validate({}), ShapeError);
  EXPECT_THROW(nn::validate({LayerSpec::dense(2, 3), LayerSpec::relu(4)}), ShapeError);
  EXPECT_THROW(nn::validate({LayerSpec::dropout(2, 1.0)}), ShapeError);
  EXPECT_NO_THROW(nn::validate({LayerSpec::dense(2, 3), LayerSpec::relu(3)}));
}

TEST(Validate, ForwardRejectsWrongInputWidth) {
  const nn::NetworkSpec spec = {LayerSpec::dense(2, 1)};
  Rng rng(14);
  const auto state = nn::init_state(spec, rng);
  EXPECT_THROW(nn::infer(spec, state, Matrix(1, 3)), ShapeError);
}

}  // namespace
}  // namespace imbgan
