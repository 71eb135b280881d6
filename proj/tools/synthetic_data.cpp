#include "synthetic_data.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "imbgan/csv.hpp"
#include "imbgan/errors.hpp"
#include "imbgan/random.hpp"

namespace imbgan::synthetic {

std::string header_name(std::size_t index, std::size_t features) {
  if (features == data::kFeatureCount) {
    if (index == 0) return "Time";
    if (index + 1 == features) return "Amount";
    return "V" + std::to_string(index);
  }
  return "f" + std::to_string(index);
}

data::RawTable make_table(const SyntheticSpec& spec) {
  if (spec.positives > spec.rows) {
    throw PreconditionError("synthetic: more positives than rows");
  }
  if (spec.features == 0) throw PreconditionError("synthetic: no features");
  Rng rng(spec.seed);
  std::vector<int> labels(spec.rows, 0);
  std::fill_n(labels.begin(), spec.positives, 1);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::normal_distribution<double> noise(0.0, spec.stddev);
  data::RawTable table;
  table.features = Matrix(spec.rows, spec.features);
  for (std::size_t r = 0; r < spec.rows; ++r) {
    for (std::size_t c = 0; c < spec.features; ++c) {
      double mean = spec.negative_mean;
      if (labels[r] == 1 && c < spec.informative) mean += spec.shift;
      table.features(r, c) = std::clamp(mean + noise(rng), 0.0, 1.0);
    }
  }
  table.labels = std::move(labels);
  for (std::size_t c = 0; c < spec.features; ++c) {
    table.feature_names.push_back(header_name(c, spec.features));
  }
  return table;
}

std::string to_csv(const data::RawTable& table,
                   const std::string& label_column) {
  std::string out;
  for (const auto& name : table.feature_names) {
    out += csv::escape(name);
    out += ',';
  }
  out += csv::escape(label_column);
  out += '\n';
  for (std::size_t r = 0; r < table.features.rows(); ++r) {
    for (double v : table.features.row(r)) {
      out += csv::format_double(v);
      out += ',';
    }
    out += std::to_string(table.labels[r]);
    out += '\n';
  }
  return out;
}

void write_csv(const SyntheticSpec& spec, const std::filesystem::path& path) {
  csv::write_file(path, to_csv(make_table(spec)));
}

}  // namespace imbgan::synthetic
