#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "imbgan/experiment.hpp"

namespace {

using imbgan::classifiers::ModelKind;
using imbgan::experiment::Mode;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string current;
  for (char ch : text) {
    if (ch == ',') {
      if (!current.empty()) items.push_back(current);
      current.clear();
    } else if (ch != ' ') {
      current += ch;
    }
  }
  if (!current.empty()) items.push_back(current);
  return items;
}

std::vector<Mode> parse_modes(const std::string& text) {
  std::vector<Mode> modes;
  for (const auto& name : split_list(text)) {
    const auto m = imbgan::experiment::parse_mode(name);
    if (!m) throw CLI::ValidationError("--modes", "unknown mode \"" + name + "\"");
    modes.push_back(*m);
  }
  return modes;
}

std::vector<ModelKind> parse_models(const std::string& text) {
  std::vector<ModelKind> models;
  for (const auto& name : split_list(text)) {
    const auto m = imbgan::classifiers::parse_model_kind(name);
    if (!m) {
      throw CLI::ValidationError("--models", "unknown model \"" + name + "\"");
    }
    models.push_back(*m);
  }
  return models;
}

struct SharedOptions {
  std::string data;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t gan_epochs = imbgan::gan::GanTrainConfig{}.epochs;
  double gan_lr = imbgan::gan::GanTrainConfig{}.learning_rate;
  std::size_t log_every = 1;
  std::string label_column = "Class";
  imbgan::data::SplitSpec split;
};

void add_shared(CLI::App* cmd, SharedOptions& o) {
  cmd->add_option("--data", o.data, "Input CSV")->required();
  cmd->add_option("--out", o.out, "Output directory")->required();
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--gan-epochs", o.gan_epochs, "GAN training epochs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--gan-lr", o.gan_lr, "GAN Adam learning rate")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--log-every", o.log_every, "GAN log interval in epochs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--label-column", o.label_column, "Label column name");
  cmd->add_option("--train-size", o.split.train_size, "Training rows");
  cmd->add_option("--test-size", o.split.test_size, "Test rows");
  cmd->add_option("--train-pos", o.split.train_positives,
                  "Positives in the training split");
  cmd->add_option("--test-pos", o.split.test_positives,
                  "Positives in the test split");
}

imbgan::gan::GanTrainConfig gan_config(const SharedOptions& o) {
  imbgan::gan::GanTrainConfig g;
  g.epochs = o.gan_epochs;
  g.learning_rate = o.gan_lr;
  g.log_every = o.log_every;
  return g;
}

int do_run(const SharedOptions& o, const std::string& modes,
           const std::string& models, std::size_t mlp_epochs,
           bool dump_augmented, bool save_models) {
  imbgan::experiment::ExperimentConfig config;
  config.data_path = o.data;
  config.out_dir = o.out;
  config.seed = o.seed;
  config.modes = parse_modes(modes);
  config.models = parse_models(models);
  config.load.label_column = o.label_column;
  config.split = o.split;
  config.gan = gan_config(o);
  if (mlp_epochs > 0) {
    auto mlp = imbgan::classifiers::TrainConfig::mlp_defaults();
    mlp.epochs = mlp_epochs;
    config.train[ModelKind::kMlp] = mlp;
  }
  config.dump_augmented = dump_augmented;
  config.save_models = save_models;

  const auto results = imbgan::experiment::run(config);
  for (const auto& r : results.runs) {
    if (r.ok) {
      std::cerr << imbgan::experiment::to_string(r.mode) << '/'
                << imbgan::classifiers::to_string(r.model) << ": f1 "
                << r.report.f1 << ", auc " << r.report.auc_roc << " ("
                << r.seconds << " s)\n";
    } else {
      std::cerr << "error: " << r.error << '\n';
    }
  }
  return results.all_ok() ? 0 : 1;
}

int do_synth(const SharedOptions& o, std::size_t count) {
  imbgan::experiment::SynthConfig config;
  config.data_path = o.data;
  config.out_dir = o.out;
  config.seed = o.seed;
  config.count = count;
  config.load.label_column = o.label_column;
  config.split = o.split;
  config.gan = gan_config(o);
  const auto artifacts = imbgan::experiment::synthesize(config);
  if (!artifacts.log.empty()) {
    const auto& last = artifacts.log.back();
    std::cerr << "epoch " << last.epoch << ": gen_loss " << last.generator_loss
              << ", disc_loss " << last.discriminator_loss << ", disc_acc "
              << last.discriminator_accuracy << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class-imbalance experiments with GAN oversampling"};
  app.require_subcommand(1);

  SharedOptions run_opts;
  std::string modes = "raw,oversample,gan";
  std::string models = "svm,dt,logreg,mlp";
  std::size_t mlp_epochs = 0;
  bool dump_augmented = false;
  bool save_models = false;
  auto* run = app.add_subcommand("run", "Train and score every mode/model pair");
  add_shared(run, run_opts);
  run->add_option("--modes", modes, "Comma list of raw,oversample,gan");
  run->add_option("--models", models, "Comma list of svm,dt,logreg,mlp");
  run->add_option("--mlp-epochs", mlp_epochs, "MLP training epochs")
      ->check(CLI::PositiveNumber);
  run->add_flag("--dump-augmented", dump_augmented,
                "Write train_augmented_<mode>.csv");
  run->add_flag("--save-models", save_models, "Write model_<mode>_<model>.txt");

  SharedOptions synth_opts;
  std::size_t count = 0;
  auto* synth = app.add_subcommand("synth", "Train the GAN and dump samples");
  add_shared(synth, synth_opts);
  synth->add_option("--n", count, "Rows to generate")
      ->required()
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return do_run(run_opts, modes, models, mlp_epochs, dump_augmented,
                    save_models);
    }
    return do_synth(synth_opts, count);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
