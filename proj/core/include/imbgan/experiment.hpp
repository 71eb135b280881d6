#pragma once

// End-to-end runs: load and preprocess the table, build the raw / oversampled
// / GAN-augmented training sets, train every requested classifier on each and
// score it on the shared test set, then write CSV outputs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imbgan/augment.hpp"
#include "imbgan/classifiers.hpp"
#include "imbgan/data.hpp"
#include "imbgan/gan.hpp"
#include "imbgan/metrics.hpp"

namespace imbgan::experiment {

enum class Mode { kRaw, kOversample, kGan };

// "raw", "oversample", "gan"
const char* to_string(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view name);

struct ExperimentConfig {
  std::filesystem::path data_path;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  std::vector<Mode> modes = {Mode::kRaw, Mode::kOversample, Mode::kGan};
  std::vector<classifiers::ModelKind> models = {
      classifiers::ModelKind::kSvm, classifiers::ModelKind::kDecisionTree,
      classifiers::ModelKind::kLogReg, classifiers::ModelKind::kMlp};
  data::LoadOptions load;
  data::SplitSpec split;
  gan::GanTrainConfig gan;  // seed is replaced by the derived "gan" seed
  // Per-model settings; models without an entry use their defaults. Seeds
  // are replaced by derived per-(mode, model) seeds.
  std::map<classifiers::ModelKind, classifiers::TrainConfig> train;
  bool dump_augmented = false;
  bool save_models = false;

  classifiers::TrainConfig train_config(classifiers::ModelKind kind) const;
};

struct RunResult {
  Mode mode = Mode::kRaw;
  classifiers::ModelKind model = classifiers::ModelKind::kSvm;
  metrics::MetricsReport report;
  metrics::RocCurve roc;
  double seconds = 0.0;
  bool ok = true;
  std::string error;  // set when !ok
};

struct ExperimentResults {
  std::vector<RunResult> runs;
  std::optional<gan::GanTrainingLog> gan_log;
  // Filled only when the matching config flag is set.
  std::vector<std::pair<Mode, augment::AugmentedDataset>> augmented;
  struct SavedModel {
    Mode mode;
    classifiers::ModelKind kind;
    classifiers::Model model;
  };
  std::vector<SavedModel> models;
  std::vector<std::string> feature_names;
  std::string label_column = "Class";

  bool all_ok() const;
};

// Sub-seed names: "split", "oversample", "gan", "gan_augment" and
// "classifier/<mode>/<model>".
std::uint64_t stage_seed(std::uint64_t master, std::string_view stage);

// Creates `dir` if needed and proves it writable; throws IoError otherwise.
void ensure_writable(const std::filesystem::path& dir);

// Runs the whole pipeline and writes every output into config.out_dir.
// Per-(mode, model) failures are recorded in the results, not thrown.
ExperimentResults run(const ExperimentConfig& config);

// Same pipeline on an in-memory table; writes nothing.
ExperimentResults run_on_table(const data::RawTable& table,
                               const ExperimentConfig& config);

// metrics.csv, roc_<mode>_<model>.csv per successful run,
// gan_training_log.csv when the gan mode trained, and when requested
// train_augmented_<mode>.csv and model_<mode>_<model>.txt.
void emit_outputs(const ExperimentResults& results,
                  const std::filesystem::path& out_dir);

// Header mode,model,accuracy_pct,recall,precision,f1,specificity,auc_roc; a
// trailing status column is added only when some run failed.
std::string metrics_to_csv(const std::vector<RunResult>& runs);

struct SynthConfig {
  std::filesystem::path data_path;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  std::size_t count = 0;
  data::LoadOptions load;
  data::SplitSpec split;
  gan::GanTrainConfig gan;
};

// Trains the GAN on the split's training positives and writes
// generated_samples.csv and gan_training_log.csv.
gan::GanArtifacts synthesize(const SynthConfig& config);

}  // namespace imbgan::experiment
