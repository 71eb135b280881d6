#include "imbgan/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string_view>
#include <unordered_set>

#include "imbgan/csv.hpp"
#include "imbgan/errors.hpp"

namespace imbgan::data {

namespace {

constexpr double kMinStd = 1e-12;

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return std::string(text.substr(first, last - first + 1));
}

// Raw bytes of a row's features followed by its label.
std::string row_key(const Matrix& features, std::size_t row, int label) {
  const auto values = features.row(row);
  std::string key(values.size() * sizeof(double) + sizeof(int), '\0');
  std::memcpy(key.data(), values.data(), values.size() * sizeof(double));
  std::memcpy(key.data() + values.size() * sizeof(double), &label, sizeof(int));
  return key;
}

Dataset subset(const RawTable& table, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.features = table.features.take_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(table.labels[r]);
  return out;
}

}  // namespace

std::size_t Dataset::positive_count() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

std::size_t Dataset::negative_count() const noexcept {
  return size() - positive_count();
}

Dataset make_dataset(Matrix features, std::vector<int> labels) {
  if (features.rows() != labels.size()) {
    throw ShapeError("dataset has " + std::to_string(features.rows()) +
                     " feature rows but " + std::to_string(labels.size()) +
                     " labels");
  }
  for (int label : labels) {
    if (label != 0 && label != 1) {
      throw SchemaError("label " + std::to_string(label) + " is not 0 or 1");
    }
  }
  return Dataset{std::move(features), std::move(labels)};
}

RawTable load_csv(const std::filesystem::path& path,
                  const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in, options);
}

RawTable parse_csv(std::istream& in, const LoadOptions& options) {
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header) throw SchemaError("CSV has no header row");

  std::size_t label_index = header->fields.size();
  RawTable table;
  for (std::size_t c = 0; c < header->fields.size(); ++c) {
    std::string name = trim(header->fields[c]);
    if (name == options.label_column && label_index == header->fields.size()) {
      label_index = c;
    } else {
      table.feature_names.push_back(std::move(name));
    }
  }
  if (label_index == header->fields.size()) {
    throw SchemaError("missing label column \"" + options.label_column + "\"");
  }
  if (options.expected_features &&
      table.feature_names.size() != *options.expected_features) {
    throw SchemaError("expected " + std::to_string(*options.expected_features) +
                      " feature columns, found " +
                      std::to_string(table.feature_names.size()));
  }

  const std::size_t width = header->fields.size();
  const std::size_t feature_count = table.feature_names.size();
  std::vector<double> values;
  std::vector<double> row(feature_count);
  while (auto record = reader.next()) {
    if (record->fields.size() != width) {
      throw SchemaError("row " + std::to_string(record->line) + " has " +
                        std::to_string(record->fields.size()) +
                        " fields, header has " + std::to_string(width));
    }
    std::size_t f = 0;
    int label = 0;
    for (std::size_t c = 0; c < width; ++c) {
      const auto parsed = csv::parse_double(record->fields[c]);
      if (!parsed || !std::isfinite(*parsed)) {
        throw ParseError(record->line, c + 1,
                         "\"" + record->fields[c] + "\" is not a number");
      }
      if (c == label_index) {
        if (*parsed != 0.0 && *parsed != 1.0) {
          throw SchemaError("row " + std::to_string(record->line) +
                            ": label \"" + record->fields[c] +
                            "\" is not 0 or 1");
        }
        label = static_cast<int>(*parsed);
      } else {
        row[f++] = *parsed;
      }
    }
    values.insert(values.end(), row.begin(), row.end());
    table.labels.push_back(label);
  }
  table.features = Matrix(table.labels.size(), feature_count, std::move(values));
  return table;
}

RawTable dedup(const RawTable& table) {
  RawTable out;
  out.feature_names = table.feature_names;
  std::unordered_set<std::string> seen;
  seen.reserve(table.rows());
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (seen.insert(row_key(table.features, r, table.labels[r])).second) {
      keep.push_back(r);
    }
  }
  out.features = table.features.take_rows(keep);
  out.labels.reserve(keep.size());
  for (std::size_t r : keep) out.labels.push_back(table.labels[r]);
  return out;
}

Split stratified_split(const RawTable& table, const SplitSpec& spec, Rng& rng) {
  if (spec.train_positives > spec.train_size ||
      spec.test_positives > spec.test_size) {
    throw PreconditionError("split requests more positives than rows");
  }
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    (table.labels[r] == 1 ? positives : negatives).push_back(r);
  }
  const std::size_t want_pos = spec.train_positives + spec.test_positives;
  const std::size_t want_neg = (spec.train_size - spec.train_positives) +
                               (spec.test_size - spec.test_positives);
  if (positives.size() < want_pos) {
    throw CapacityError("split needs " + std::to_string(want_pos) +
                        " positive rows, table has " +
                        std::to_string(positives.size()));
  }
  if (negatives.size() < want_neg) {
    throw CapacityError("split needs " + std::to_string(want_neg) +
                        " negative rows, table has " +
                        std::to_string(negatives.size()));
  }
  std::shuffle(positives.begin(), positives.end(), rng);
  std::shuffle(negatives.begin(), negatives.end(), rng);

  Split split;
  auto pos = positives.begin();
  auto neg = negatives.begin();
  split.train_rows.assign(pos, pos + spec.train_positives);
  split.train_rows.insert(split.train_rows.end(), neg,
                          neg + (spec.train_size - spec.train_positives));
  pos += spec.train_positives;
  neg += spec.train_size - spec.train_positives;
  split.test_rows.assign(pos, pos + spec.test_positives);
  split.test_rows.insert(split.test_rows.end(), neg,
                         neg + (spec.test_size - spec.test_positives));
  std::sort(split.train_rows.begin(), split.train_rows.end());
  std::sort(split.test_rows.begin(), split.test_rows.end());

  split.train = subset(table, split.train_rows);
  split.test = subset(table, split.test_rows);
  return split;
}

StandardScalerParams fit_standard(const Dataset& train) {
  const std::size_t d = train.feature_count();
  const std::size_t n = train.size();
  StandardScalerParams params{std::vector<double>(d, 0.0),
                              std::vector<double>(d, 0.0)};
  if (n == 0) return params;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) params.mean[c] += train.features(r, c);
  }
  for (auto& m : params.mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = train.features(r, c) - params.mean[c];
      params.std[c] += diff * diff;
    }
  }
  for (auto& s : params.std) s = std::sqrt(s / static_cast<double>(n));
  return params;
}

Dataset apply_standard(const StandardScalerParams& params, const Dataset& data) {
  if (params.mean.size() != data.feature_count() ||
      params.std.size() != data.feature_count()) {
    throw ShapeError("standard scaler fitted on a different feature count");
  }
  Dataset out = data;
  for (std::size_t r = 0; r < out.size(); ++r) {
    auto row = out.features.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double s = params.std[c] < kMinStd ? 1.0 : params.std[c];
      row[c] = (row[c] - params.mean[c]) / s;
    }
  }
  return out;
}

MinMaxParams fit_minmax(const Dataset& train) {
  const std::size_t d = train.feature_count();
  MinMaxParams params{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  if (train.size() == 0) return params;
  for (std::size_t c = 0; c < d; ++c) {
    params.min[c] = params.max[c] = train.features(0, c);
  }
  for (std::size_t r = 1; r < train.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      params.min[c] = std::min(params.min[c], train.features(r, c));
      params.max[c] = std::max(params.max[c], train.features(r, c));
    }
  }
  return params;
}

Dataset apply_minmax(const MinMaxParams& params, const Dataset& data) {
  if (params.min.size() != data.feature_count() ||
      params.max.size() != data.feature_count()) {
    throw ShapeError("min-max scaler fitted on a different feature count");
  }
  Dataset out = data;
  for (std::size_t r = 0; r < out.size(); ++r) {
    auto row = out.features.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double range = params.max[c] - params.min[c];
      if (!(range > 0.0)) {
        row[c] = 0.0;
        continue;
      }
      row[c] = std::clamp((row[c] - params.min[c]) / range, 0.0, 1.0);
    }
  }
  return out;
}

PreparedData prepare(const RawTable& table, const SplitSpec& spec, Rng& rng) {
  PreparedData out;
  out.split = stratified_split(dedup(table), spec, rng);
  out.standard = fit_standard(out.split.train);
  const Dataset train_std = apply_standard(out.standard, out.split.train);
  const Dataset test_std = apply_standard(out.standard, out.split.test);
  out.minmax = fit_minmax(train_std);
  out.train = apply_minmax(out.minmax, train_std);
  out.test = apply_minmax(out.minmax, test_std);
  return out;
}

}  // namespace imbgan::data
