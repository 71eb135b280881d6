#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "imbgan/csv.hpp"
#include "imbgan/errors.hpp"
#include "imbgan/experiment.hpp"
#include "synthetic_data.hpp"

namespace imbgan {
namespace {

namespace fs = std::filesystem;
using classifiers::ModelKind;
using experiment::Mode;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class ExperimentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("imbgan_experiment_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    synthetic::SyntheticSpec s;
    s.rows = 700;
    s.positives = 60;
    s.shift = 0.15;
    s.seed = 5;
    data_ = dir_ / "data.csv";
    synthetic::write_csv(s, data_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  experiment::ExperimentConfig small_config(const std::string& out) const {
    experiment::ExperimentConfig c;
    c.data_path = data_;
    c.out_dir = dir_ / out;
    c.seed = 42;
    c.split = {400, 200, 40, 20};
    c.gan.epochs = 20;
    for (ModelKind k : {ModelKind::kSvm, ModelKind::kDecisionTree, ModelKind::kLogReg,
                        ModelKind::kMlp}) {
      auto t = classifiers::TrainConfig::defaults_for(k);
      t.epochs = std::min<std::size_t>(t.epochs, 5);
      c.train[k] = t;
    }
    return c;
  }

  fs::path dir_;
  fs::path data_;
};

TEST(Names, ModeRoundTrip) {
  for (Mode m : {Mode::kRaw, Mode::kOversample, Mode::kGan}) {
    EXPECT_EQ(experiment::parse_mode(experiment::to_string(m)), m);
  }
  EXPECT_FALSE(experiment::parse_mode("smote"));
}

TEST(Seeds, StagesAreDistinctAndStable) {
  EXPECT_EQ(experiment::stage_seed(1, "gan"), experiment::stage_seed(1, "gan"));
  EXPECT_NE(experiment::stage_seed(1, "gan"), experiment::stage_seed(1, "split"));
  EXPECT_NE(experiment::stage_seed(1, "gan"), experiment::stage_seed(2, "gan"));
  EXPECT_NE(experiment::stage_seed(1, "classifier/raw/svm"),
            experiment::stage_seed(1, "classifier/gan/svm"));
}

TEST_F(ExperimentTest, FullGridWritesTwelveRowsAndFiles) {
  auto c = small_config("full");
  c.dump_augmented = true;
  c.save_models = true;
  const auto r = experiment::run(c);
  ASSERT_EQ(r.runs.size(), 12u);
  EXPECT_TRUE(r.all_ok());
  const std::string metrics = slurp(c.out_dir / "metrics.csv");
  EXPECT_EQ(line_count(metrics), 13u);
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')),
            "mode,model,accuracy_pct,recall,precision,f1,specificity,auc_roc");
  for (const auto& run : r.runs) {
    const std::string name = std::string(experiment::to_string(run.mode)) + "_" +
                             classifiers::to_string(run.model);
    EXPECT_TRUE(fs::exists(c.out_dir / ("roc_" + name + ".csv"))) << name;
    EXPECT_TRUE(fs::exists(c.out_dir / ("model_" + name + ".txt"))) << name;
    const auto m = run.report;
    for (double v : {m.accuracy, m.recall, m.precision, m.f1, m.specificity, m.auc_roc}) {
      EXPECT_TRUE(std::isfinite(v));
    }
  }
  EXPECT_TRUE(fs::exists(c.out_dir / "gan_training_log.csv"));
  EXPECT_EQ(line_count(slurp(c.out_dir / "gan_training_log.csv")), 21u);
  const std::string over = slurp(c.out_dir / "train_augmented_oversample.csv");
  EXPECT_EQ(line_count(over), 1u + 2u * 360u);
  EXPECT_TRUE(fs::exists(c.out_dir / "train_augmented_gan.csv"));
  EXPECT_FALSE(fs::exists(c.out_dir / "train_augmented_raw.csv"));

  const auto reloaded = classifiers::load_model(c.out_dir / "model_raw_logreg.txt");
  EXPECT_EQ(classifiers::kind_of(reloaded), ModelKind::kLogReg);
}

TEST_F(ExperimentTest, MinimalRunTrainsNoGan) {
  auto c = small_config("minimal");
  c.modes = {Mode::kRaw};
  c.models = {ModelKind::kDecisionTree};
  const auto r = experiment::run(c);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_FALSE(r.gan_log);
  EXPECT_FALSE(fs::exists(c.out_dir / "gan_training_log.csv"));
  EXPECT_TRUE(fs::exists(c.out_dir / "roc_raw_dt.csv"));
  EXPECT_EQ(line_count(slurp(c.out_dir / "metrics.csv")), 2u);
}

TEST_F(ExperimentTest, SameSeedSameMetricsBytes) {
  auto a = small_config("a");
  auto b = small_config("b");
  a.models = b.models = {ModelKind::kSvm, ModelKind::kMlp};
  experiment::run(a);
  experiment::run(b);
  EXPECT_EQ(slurp(a.out_dir / "metrics.csv"), slurp(b.out_dir / "metrics.csv"));
  EXPECT_EQ(slurp(a.out_dir / "gan_training_log.csv"),
            slurp(b.out_dir / "gan_training_log.csv"));
}

TEST_F(ExperimentTest, ClassifiersWithinAModeSeeTheSameTrainingSet) {
  // Trees are deterministic given the data, so two tree runs under different
  // classifier seeds can only differ if the training sets differ.
  auto c = small_config("shared");
  c.modes = {Mode::kOversample};
  c.models = {ModelKind::kDecisionTree, ModelKind::kDecisionTree};
  const auto r = experiment::run_on_table(data::load_csv(data_), c);
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_EQ(r.runs[0].roc.points, r.runs[1].roc.points);
}

TEST_F(ExperimentTest, FailedModeIsMarkedAndOthersStillWritten) {
  auto c = small_config("failed");
  c.split = {40, 40, 20, 20};  // balanced train: nothing for the GAN to add
  c.modes = {Mode::kRaw, Mode::kGan};
  c.models = {ModelKind::kLogReg};
  const auto r = experiment::run(c);
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_TRUE(r.runs[0].ok);
  EXPECT_FALSE(r.runs[1].ok);
  EXPECT_NE(r.runs[1].error.find("gan/logreg"), std::string::npos);
  EXPECT_FALSE(r.all_ok());
  const std::string metrics = slurp(c.out_dir / "metrics.csv");
  EXPECT_NE(metrics.find(",status\n"), std::string::npos);
  EXPECT_NE(metrics.find("\ngan,logreg,,,,,,,failed\n"), std::string::npos);
  EXPECT_NE(metrics.find(",ok\n"), std::string::npos);
}

TEST_F(ExperimentTest, UnwritableOutputFailsBeforeLoading) {
  auto c = small_config("unused");
  c.data_path = dir_ / "missing.csv";
  csv::write_file(dir_ / "blocker", "x");
  c.out_dir = dir_ / "blocker" / "out";
  try {
    experiment::run(c);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("output directory"), std::string::npos);
  }
}

TEST(Emit, EmptyResultsRejected) {
  EXPECT_THROW(experiment::emit_outputs({}, fs::temp_directory_path()), PreconditionError);
}

TEST(Emit, MetricsRowFormatting) {
  experiment::RunResult r;
  r.mode = Mode::kGan;
  r.model = ModelKind::kSvm;
  r.report = {0.9926, 0.79114, 0.97656, 0.87413, 0.99938, 0.8912};
  EXPECT_EQ(experiment::metrics_to_csv({r}),
            "mode,model,accuracy_pct,recall,precision,f1,specificity,auc_roc\n"
            "gan,svm,99.26,0.7911,0.9766,0.8741,0.9994,0.8912\n");
}

TEST(Config, Validation) {
  experiment::ExperimentConfig c;
  c.modes.clear();
  EXPECT_THROW(experiment::run_on_table({}, c), PreconditionError);
  c = {};
  c.models.clear();
  EXPECT_THROW(experiment::run_on_table({}, c), PreconditionError);
}

}  // namespace
}  // namespace imbgan
