#pragma once

// Minority-class GAN: generator/discriminator architectures, the alternating
// training loop, sampling, and the CSV forms of the training log and samples.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "imbgan/data.hpp"
#include "imbgan/matrix.hpp"
#include "imbgan/nn.hpp"
#include "imbgan/random.hpp"

namespace imbgan::gan {

inline constexpr std::size_t kNoiseDim = 100;
inline constexpr double kDropoutRate = 0.2;

enum class NoiseKind { kNormal, kUniform };
enum class DropoutPlacement { kEveryHiddenLayer, kSingle };

// noise -> dense(100) relu -> dense(features) relu -> batchnorm ->
// dense(features) sigmoid
nn::NetworkSpec generator_spec(std::size_t feature_count,
                               std::size_t noise_dim = kNoiseDim);

// features -> 3 x [dense(36) sigmoid dropout] -> dense(1) sigmoid. With
// kSingle only the last hidden layer is followed by dropout.
nn::NetworkSpec discriminator_spec(
    std::size_t feature_count,
    DropoutPlacement placement = DropoutPlacement::kEveryHiddenLayer,
    double dropout_rate = kDropoutRate);

struct GanTrainConfig {
  std::size_t epochs = 10000;
  double learning_rate = 1e-5;
  std::size_t batch_size = 64;  // capped at the number of positives
  std::size_t noise_dim = kNoiseDim;
  std::uint64_t seed = 0;
  std::size_t log_every = 1;
  NoiseKind noise = NoiseKind::kNormal;
  DropoutPlacement dropout_placement = DropoutPlacement::kEveryHiddenLayer;
  double dropout_rate = kDropoutRate;
};

struct LogEntry {
  std::size_t epoch = 0;  // 1-based
  double generator_loss = 0.0;
  double discriminator_loss = 0.0;
  double discriminator_accuracy = 0.0;
};

using GanTrainingLog = std::vector<LogEntry>;

struct Generator {
  nn::NetworkSpec spec;
  nn::NetworkState state;
  std::size_t noise_dim = kNoiseDim;
  NoiseKind noise = NoiseKind::kNormal;

  std::size_t feature_count() const { return nn::output_dim(spec); }
};

struct GanArtifacts {
  Generator generator;
  nn::NetworkSpec discriminator_spec;
  nn::NetworkState discriminator;
  GanTrainingLog log;
};

enum class UpdateKind { kDiscriminator, kGenerator };

// Observes every parameter update during training (epoch is 1-based).
using UpdateHook = std::function<void(std::size_t epoch, UpdateKind kind)>;

// n x dim matrix of i.i.d. N(0, 1) (or U[0, 1)) draws.
Matrix sample_noise(std::size_t n, Rng& rng, std::size_t dim = kNoiseDim,
                    NoiseKind kind = NoiseKind::kNormal);

// Freshly initialized generator for `feature_count` outputs.
Generator make_generator(std::size_t feature_count, Rng& rng,
                         std::size_t noise_dim = kNoiseDim,
                         NoiseKind noise = NoiseKind::kNormal);

// Each epoch makes one discriminator update on a batch of real rows (label 1)
// plus as many generated rows (label 0), then one generator update through the
// frozen discriminator against label 1. Afterwards the generator's batchnorm
// running statistics are replaced by the statistics of a large noise batch.
GanArtifacts train_gan(const data::Dataset& positives,
                       const GanTrainConfig& config,
                       const UpdateHook& hook = {});

// Infer-mode samples, every entry in (0, 1).
Matrix generate(const Generator& generator, std::size_t n, Rng& rng);

// Header epoch,gen_loss,disc_loss,disc_acc.
std::string log_to_csv(const GanTrainingLog& log);
// Header f0..f{d-1}.
std::string samples_to_csv(const Matrix& samples);

}  // namespace imbgan::gan
