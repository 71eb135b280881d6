#include "imbgan/gan.hpp"

#include <algorithm>
#include <string>

#include "imbgan/csv.hpp"
#include "imbgan/errors.hpp"

namespace imbgan::gan {

namespace {

constexpr std::size_t kDiscriminatorHidden = 36;
constexpr std::size_t kGeneratorHidden = 100;
// Noise rows used to settle the generator's batchnorm statistics.
constexpr std::size_t kStatisticsRows = 4096;

void require_positive_set(const data::Dataset& positives) {
  if (positives.size() < 2) {
    throw PreconditionError("train_gan needs at least 2 positive rows, got " +
                            std::to_string(positives.size()));
  }
  if (positives.positive_count() != positives.size()) {
    throw PreconditionError("train_gan input contains label-0 rows");
  }
}

// Uniform sample of `count` distinct row indices (partial Fisher-Yates over a
// persistent permutation).
void draw_batch(std::vector<std::size_t>& pool, std::size_t count, Rng& rng,
                std::vector<std::size_t>& out) {
  out.clear();
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    out.push_back(pool[i]);
  }
}

void settle_batchnorm(Generator& generator, Rng& rng) {
  std::vector<double> saved;
  for (std::size_t i = 0; i < generator.spec.size(); ++i) {
    if (generator.spec[i].kind != nn::LayerKind::kBatchNorm) continue;
    saved.push_back(generator.state.layers[i].momentum);
    generator.state.layers[i].momentum = 0.0;
  }
  if (saved.empty()) return;
  const Matrix noise =
      sample_noise(kStatisticsRows, rng, generator.noise_dim, generator.noise);
  nn::forward(generator.spec, generator.state, noise, nn::Mode::kTrain, &rng);
  std::size_t k = 0;
  for (std::size_t i = 0; i < generator.spec.size(); ++i) {
    if (generator.spec[i].kind != nn::LayerKind::kBatchNorm) continue;
    generator.state.layers[i].momentum = saved[k++];
  }
}

}  // namespace

nn::NetworkSpec generator_spec(std::size_t feature_count,
                               std::size_t noise_dim) {
  using nn::LayerSpec;
  return {
      LayerSpec::dense(noise_dim, kGeneratorHidden),
      LayerSpec::relu(kGeneratorHidden),
      LayerSpec::dense(kGeneratorHidden, feature_count),
      LayerSpec::relu(feature_count),
      LayerSpec::batchnorm(feature_count),
      LayerSpec::dense(feature_count, feature_count),
      LayerSpec::sigmoid(feature_count),
  };
}

nn::NetworkSpec discriminator_spec(std::size_t feature_count,
                                   DropoutPlacement placement,
                                   double dropout_rate) {
  using nn::LayerSpec;
  nn::NetworkSpec spec;
  std::size_t in = feature_count;
  for (int layer = 0; layer < 3; ++layer) {
    spec.push_back(LayerSpec::dense(in, kDiscriminatorHidden));
    spec.push_back(LayerSpec::sigmoid(kDiscriminatorHidden));
    if (placement == DropoutPlacement::kEveryHiddenLayer || layer == 2) {
      spec.push_back(LayerSpec::dropout(kDiscriminatorHidden, dropout_rate));
    }
    in = kDiscriminatorHidden;
  }
  spec.push_back(LayerSpec::dense(kDiscriminatorHidden, 1));
  spec.push_back(LayerSpec::sigmoid(1));
  return spec;
}

Matrix sample_noise(std::size_t n, Rng& rng, std::size_t dim, NoiseKind kind) {
  Matrix noise(n, dim);
  if (kind == NoiseKind::kNormal) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : noise.values()) v = dist(rng);
  } else {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (double& v : noise.values()) v = dist(rng);
  }
  return noise;
}

Generator make_generator(std::size_t feature_count, Rng& rng,
                         std::size_t noise_dim, NoiseKind noise) {
  Generator g;
  g.spec = generator_spec(feature_count, noise_dim);
  g.state = nn::init_state(g.spec, rng);
  g.noise_dim = noise_dim;
  g.noise = noise;
  return g;
}

GanArtifacts train_gan(const data::Dataset& positives,
                       const GanTrainConfig& config, const UpdateHook& hook) {
  require_positive_set(positives);
  if (!(config.learning_rate > 0.0) || config.epochs == 0 ||
      config.batch_size == 0 || config.noise_dim == 0) {
    throw PreconditionError(
        "GAN config needs learning_rate > 0 and epochs, batch_size, "
        "noise_dim >= 1");
  }
  const std::size_t features = positives.feature_count();
  const std::size_t batch = std::min(config.batch_size, positives.size());
  const std::size_t log_every = std::max<std::size_t>(config.log_every, 1);

  Rng rng(config.seed);
  GanArtifacts out;
  out.generator =
      make_generator(features, rng, config.noise_dim, config.noise);
  out.discriminator_spec = discriminator_spec(
      features, config.dropout_placement, config.dropout_rate);
  out.discriminator = nn::init_state(out.discriminator_spec, rng);

  Generator& gen = out.generator;
  const nn::NetworkSpec& disc_spec = out.discriminator_spec;
  nn::AdamState gen_opt = nn::make_adam(gen.state, config.learning_rate);
  nn::AdamState disc_opt = nn::make_adam(out.discriminator, config.learning_rate);

  Matrix disc_targets(2 * batch, 1, 0.0);
  for (std::size_t i = 0; i < batch; ++i) disc_targets(i, 0) = 1.0;
  const Matrix gen_targets(batch, 1, 1.0);

  std::vector<std::size_t> pool(positives.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  std::vector<std::size_t> picked;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    // Discriminator: real rows labeled 1, generated rows labeled 0.
    draw_batch(pool, batch, rng, picked);
    const Matrix real = positives.features.take_rows(picked);
    const Matrix fake =
        nn::forward(gen.spec, gen.state,
                    sample_noise(batch, rng, gen.noise_dim, gen.noise),
                    nn::Mode::kTrain, &rng)
            .output;
    auto disc_pass = nn::forward(disc_spec, out.discriminator,
                                 vstack(real, fake), nn::Mode::kTrain, &rng);
    const double disc_loss = nn::loss(nn::LossKind::kBinaryCrossEntropy,
                                      disc_pass.output, disc_targets);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < disc_targets.rows(); ++i) {
      const bool says_real = disc_pass.output(i, 0) > 0.5;
      if (says_real == (disc_targets(i, 0) == 1.0)) ++correct;
    }
    const auto disc_grads =
        nn::backward(disc_spec, out.discriminator, disc_pass.cache,
                     nn::LossKind::kBinaryCrossEntropy, disc_targets);
    nn::adam_step(out.discriminator, disc_grads.grads, disc_opt);
    if (hook) hook(epoch, UpdateKind::kDiscriminator);

    // Generator: push D(G(z)) towards 1 with the discriminator frozen.
    auto gen_pass =
        nn::forward(gen.spec, gen.state,
                    sample_noise(batch, rng, gen.noise_dim, gen.noise),
                    nn::Mode::kTrain, &rng);
    auto judged = nn::forward(disc_spec, out.discriminator, gen_pass.output,
                              nn::Mode::kTrain, &rng);
    const double gen_loss = nn::loss(nn::LossKind::kBinaryCrossEntropy,
                                     judged.output, gen_targets);
    const auto through_disc =
        nn::backward(disc_spec, out.discriminator, judged.cache,
                     nn::LossKind::kBinaryCrossEntropy, gen_targets);
    const auto gen_grads = nn::backward_from_output_grad(
        gen.spec, gen.state, gen_pass.cache, through_disc.input_grad);
    nn::adam_step(gen.state, gen_grads.grads, gen_opt);
    if (hook) hook(epoch, UpdateKind::kGenerator);

    if (epoch % log_every == 0 || epoch == config.epochs) {
      out.log.push_back(LogEntry{
          epoch, gen_loss, disc_loss,
          static_cast<double>(correct) /
              static_cast<double>(disc_targets.rows())});
    }
  }
  settle_batchnorm(gen, rng);
  return out;
}

Matrix generate(const Generator& generator, std::size_t n, Rng& rng) {
  if (n == 0) throw PreconditionError("generate: n must be >= 1");
  const Matrix noise = sample_noise(n, rng, generator.noise_dim, generator.noise);
  return nn::infer(generator.spec, generator.state, noise);
}

std::string log_to_csv(const GanTrainingLog& log) {
  std::string out = "epoch,gen_loss,disc_loss,disc_acc\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch);
    out += ',';
    out += csv::format_double(e.generator_loss);
    out += ',';
    out += csv::format_double(e.discriminator_loss);
    out += ',';
    out += csv::format_double(e.discriminator_accuracy);
    out += '\n';
  }
  return out;
}

std::string samples_to_csv(const Matrix& samples) {
  std::string out;
  for (std::size_t c = 0; c < samples.cols(); ++c) {
    if (c > 0) out += ',';
    out += 'f' + std::to_string(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    const auto row = samples.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += csv::format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace imbgan::gan
