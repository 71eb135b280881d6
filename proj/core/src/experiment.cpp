#include "imbgan/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <system_error>

#include "imbgan/csv.hpp"
#include "imbgan/errors.hpp"

namespace imbgan::experiment {

namespace fs = std::filesystem;

namespace {

void check_config(const ExperimentConfig& config) {
  if (config.modes.empty()) throw PreconditionError("no modes requested");
  if (config.models.empty()) throw PreconditionError("no models requested");
}

RunResult evaluate(Mode mode, classifiers::ModelKind kind,
                   const classifiers::Model& model, const data::Dataset& test) {
  RunResult r;
  r.mode = mode;
  r.model = kind;
  const auto scores = classifiers::predict_score(model, test.features);
  std::vector<int> predicted(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    predicted[i] = scores[i] > 0.5 ? 1 : 0;
  }
  auto [curve, auc] = metrics::roc_auc(test.labels, scores);
  r.report = metrics::compute_metrics(metrics::confusion(test.labels, predicted),
                                      auc);
  r.roc = std::move(curve);
  return r;
}

RunResult failure(Mode mode, classifiers::ModelKind kind,
                  const std::string& what) {
  RunResult r;
  r.mode = mode;
  r.model = kind;
  r.ok = false;
  r.error = std::string(to_string(mode)) + "/" + classifiers::to_string(kind) +
            ": " + what;
  return r;
}

std::string run_name(const RunResult& r) {
  return std::string(to_string(r.mode)) + "_" + classifiers::to_string(r.model);
}

}  // namespace

const char* to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::kRaw: return "raw";
    case Mode::kOversample: return "oversample";
    case Mode::kGan: return "gan";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
  for (Mode m : {Mode::kRaw, Mode::kOversample, Mode::kGan}) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

classifiers::TrainConfig ExperimentConfig::train_config(
    classifiers::ModelKind kind) const {
  const auto it = train.find(kind);
  return it != train.end() ? it->second
                           : classifiers::TrainConfig::defaults_for(kind);
}

bool ExperimentResults::all_ok() const {
  for (const auto& r : runs) {
    if (!r.ok) return false;
  }
  return true;
}

std::uint64_t stage_seed(std::uint64_t master, std::string_view stage) {
  return derive_seed(master, stage);
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
  const fs::path probe = dir / ".imbgan_write_probe";
  {
    std::ofstream out(probe, std::ios::trunc);
    if (!out || !(out << "ok")) {
      throw IoError("output directory " + dir.string() + " is not writable");
    }
  }
  fs::remove(probe, ec);
}

ExperimentResults run_on_table(const data::RawTable& table,
                               const ExperimentConfig& config) {
  check_config(config);
  ExperimentResults results;
  results.feature_names = table.feature_names;
  results.label_column = config.load.label_column;

  Rng split_rng(stage_seed(config.seed, "split"));
  const data::PreparedData prepared =
      data::prepare(table, config.split, split_rng);
  const data::Dataset& test = prepared.test;

  for (Mode mode : config.modes) {
    // One training set per mode, shared by every classifier.
    std::optional<data::Dataset> train;
    std::string mode_error;
    try {
      switch (mode) {
        case Mode::kRaw:
          train = prepared.train;
          break;
        case Mode::kOversample: {
          Rng rng(stage_seed(config.seed, "oversample"));
          auto augmented = augment::random_oversample(prepared.train, rng);
          train = augmented.data;
          if (config.dump_augmented) {
            results.augmented.emplace_back(mode, std::move(augmented));
          }
          break;
        }
        case Mode::kGan: {
          gan::GanTrainConfig gan_config = config.gan;
          gan_config.seed = stage_seed(config.seed, "gan");
          const auto artifacts = gan::train_gan(
              augment::isolate_positives(prepared.train), gan_config);
          results.gan_log = artifacts.log;
          Rng rng(stage_seed(config.seed, "gan_augment"));
          auto augmented =
              augment::gan_augment(prepared.train, artifacts.generator, rng);
          train = augmented.data;
          if (config.dump_augmented) {
            results.augmented.emplace_back(mode, std::move(augmented));
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      mode_error = e.what();
    }

    for (classifiers::ModelKind kind : config.models) {
      if (!train) {
        results.runs.push_back(failure(mode, kind, mode_error));
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      try {
        classifiers::TrainConfig tc = config.train_config(kind);
        tc.seed = stage_seed(config.seed, std::string("classifier/") +
                                              to_string(mode) + "/" +
                                              classifiers::to_string(kind));
        classifiers::Model model = classifiers::train(kind, *train, tc);
        RunResult r = evaluate(mode, kind, model, test);
        r.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        results.runs.push_back(std::move(r));
        if (config.save_models) {
          results.models.push_back({mode, kind, std::move(model)});
        }
      } catch (const std::exception& e) {
        results.runs.push_back(failure(mode, kind, e.what()));
      }
    }
  }
  return results;
}

ExperimentResults run(const ExperimentConfig& config) {
  check_config(config);
  ensure_writable(config.out_dir);
  const data::RawTable table = data::load_csv(config.data_path, config.load);
  ExperimentResults results = run_on_table(table, config);
  emit_outputs(results, config.out_dir);
  return results;
}

std::string metrics_to_csv(const std::vector<RunResult>& runs) {
  bool any_failed = false;
  for (const auto& r : runs) any_failed = any_failed || !r.ok;
  std::string out =
      "mode,model,accuracy_pct,recall,precision,f1,specificity,auc_roc";
  out += any_failed ? ",status\n" : "\n";
  for (const auto& r : runs) {
    out += to_string(r.mode);
    out += ',';
    out += classifiers::to_string(r.model);
    if (r.ok) {
      const auto& m = r.report;
      out += ',' + csv::format_fixed(m.accuracy * 100.0, 2);
      for (double v : {m.recall, m.precision, m.f1, m.specificity, m.auc_roc}) {
        out += ',' + csv::format_fixed(v, 4);
      }
    } else {
      out += ",,,,,,";
    }
    if (any_failed) out += r.ok ? ",ok" : ",failed";
    out += '\n';
  }
  return out;
}

void emit_outputs(const ExperimentResults& results, const fs::path& out_dir) {
  if (results.runs.empty()) {
    throw PreconditionError("emit_outputs: no results to write");
  }
  ensure_writable(out_dir);
  csv::write_file(out_dir / "metrics.csv", metrics_to_csv(results.runs));
  for (const auto& r : results.runs) {
    if (!r.ok) continue;
    csv::write_file(out_dir / ("roc_" + run_name(r) + ".csv"),
                    metrics::roc_to_csv(r.roc));
  }
  if (results.gan_log) {
    csv::write_file(out_dir / "gan_training_log.csv",
                    gan::log_to_csv(*results.gan_log));
  }
  for (const auto& [mode, augmented] : results.augmented) {
    csv::write_file(
        out_dir / (std::string("train_augmented_") + to_string(mode) + ".csv"),
        augment::to_csv(augmented, results.feature_names,
                        results.label_column));
  }
  for (const auto& saved : results.models) {
    classifiers::save_model(
        saved.model, out_dir / (std::string("model_") + to_string(saved.mode) +
                                "_" + classifiers::to_string(saved.kind) +
                                ".txt"));
  }
}

gan::GanArtifacts synthesize(const SynthConfig& config) {
  if (config.count == 0) throw PreconditionError("synth: --n must be >= 1");
  ensure_writable(config.out_dir);
  const data::RawTable table = data::load_csv(config.data_path, config.load);
  Rng split_rng(stage_seed(config.seed, "split"));
  const auto prepared = data::prepare(table, config.split, split_rng);
  gan::GanTrainConfig gan_config = config.gan;
  gan_config.seed = stage_seed(config.seed, "gan");
  auto artifacts =
      gan::train_gan(augment::isolate_positives(prepared.train), gan_config);
  Rng rng(stage_seed(config.seed, "synth"));
  const Matrix samples = gan::generate(artifacts.generator, config.count, rng);
  csv::write_file(config.out_dir / "generated_samples.csv",
                  gan::samples_to_csv(samples));
  csv::write_file(config.out_dir / "gan_training_log.csv",
                  gan::log_to_csv(artifacts.log));
  return artifacts;
}

}  // namespace imbgan::experiment
