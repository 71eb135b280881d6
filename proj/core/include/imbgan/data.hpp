#pragma once

// Labeled transaction tables: CSV ingestion, deduplication, the stratified
// train/test subsample and the two-stage (standard, then min-max) scaling.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "imbgan/matrix.hpp"
#include "imbgan/random.hpp"

namespace imbgan::data {

inline constexpr std::size_t kFeatureCount = 30;

struct RawTable {
  std::vector<std::string> feature_names;
  Matrix features;          // rows x features, unscaled
  std::vector<int> labels;  // 0 or 1

  std::size_t rows() const noexcept { return labels.size(); }
};

struct LoadOptions {
  std::string label_column = "Class";
  // nullopt accepts any number of feature columns.
  std::optional<std::size_t> expected_features = kFeatureCount;
};

// Every non-label column is a feature; row order is preserved.
RawTable load_csv(const std::filesystem::path& path,
                  const LoadOptions& options = {});
RawTable parse_csv(std::istream& in, const LoadOptions& options = {});

// Collapses rows that are bit-identical across all features and the label to
// their first occurrence.
RawTable dedup(const RawTable& table);

struct Dataset {
  Matrix features;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t feature_count() const noexcept { return features.cols(); }
  std::size_t positive_count() const noexcept;
  std::size_t negative_count() const noexcept;
};

// Throws ShapeError if row counts disagree, SchemaError for labels outside
// {0, 1}.
Dataset make_dataset(Matrix features, std::vector<int> labels);

struct SplitSpec {
  std::size_t train_size = 10000;
  std::size_t test_size = 5000;
  std::size_t train_positives = 315;
  std::size_t test_positives = 158;
};

struct Split {
  Dataset train;
  Dataset test;
  // Source table row of every train/test row.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

// Positives are shuffled and dealt to train then test; negatives are drawn
// uniformly without replacement to fill the remaining slots. Rows within each
// side keep table order. Throws CapacityError when a class runs short.
Split stratified_split(const RawTable& table, const SplitSpec& spec, Rng& rng);

struct StandardScalerParams {
  std::vector<double> mean;
  std::vector<double> std;  // population standard deviation
};

struct MinMaxParams {
  std::vector<double> min;
  std::vector<double> max;
};

StandardScalerParams fit_standard(const Dataset& train);
// (x - mean) / std; std below 1e-12 is treated as 1.
Dataset apply_standard(const StandardScalerParams& params, const Dataset& data);

MinMaxParams fit_minmax(const Dataset& train);
// (x - min) / (max - min) clamped to [0, 1]; a constant feature maps to 0.
Dataset apply_minmax(const MinMaxParams& params, const Dataset& data);

struct PreparedData {
  Split split;  // unscaled; row indices refer to the deduplicated table
  Dataset train;
  Dataset test;
  StandardScalerParams standard;
  MinMaxParams minmax;
};

// dedup -> split -> standard (fit on train) -> min-max (fit on train).
PreparedData prepare(const RawTable& table, const SplitSpec& spec, Rng& rng);

}  // namespace imbgan::data
