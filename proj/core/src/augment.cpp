#include "imbgan/augment.hpp"

#include "imbgan/csv.hpp"
#include "imbgan/errors.hpp"

namespace imbgan::augment {

namespace {

AugmentedDataset as_original(const data::Dataset& train) {
  return AugmentedDataset{train, std::vector<Provenance>(train.size(),
                                                         Provenance::kOriginal)};
}

}  // namespace

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::kOriginal: return "original";
    case Provenance::kDuplicated: return "duplicated";
    case Provenance::kGenerated: return "generated";
  }
  return "unknown";
}

data::Dataset isolate_positives(const data::Dataset& train) {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (train.labels[r] == 1) rows.push_back(r);
  }
  if (rows.empty()) {
    throw PreconditionError("training set has no positive rows to isolate");
  }
  return data::Dataset{train.features.take_rows(rows),
                       std::vector<int>(rows.size(), 1)};
}

AugmentedDataset random_oversample(const data::Dataset& train, Rng& rng) {
  const std::size_t pos = train.positive_count();
  const std::size_t neg = train.negative_count();
  if (pos == 0 || neg == 0) {
    throw PreconditionError("random_oversample needs both classes present");
  }
  AugmentedDataset out = as_original(train);
  const int minority = pos < neg ? 1 : 0;
  const std::size_t deficit = pos < neg ? neg - pos : pos - neg;
  std::vector<std::size_t> minority_rows;
  for (std::size_t r = 0; r < train.size(); ++r) {
    if (train.labels[r] == minority) minority_rows.push_back(r);
  }
  std::uniform_int_distribution<std::size_t> pick(0, minority_rows.size() - 1);
  for (std::size_t i = 0; i < deficit; ++i) {
    const std::size_t src = minority_rows[pick(rng)];
    out.data.features.append_row(train.features.row(src));
    out.data.labels.push_back(minority);
    out.provenance.push_back(Provenance::kDuplicated);
  }
  return out;
}

AugmentedDataset gan_augment(const data::Dataset& train,
                             const gan::Generator& generator, Rng& rng) {
  const std::size_t pos = train.positive_count();
  const std::size_t neg = train.negative_count();
  if (pos >= neg) {
    throw PreconditionError("nothing to balance: " + std::to_string(pos) +
                            " positives vs " + std::to_string(neg) +
                            " negatives");
  }
  if (generator.feature_count() != train.feature_count()) {
    throw ShapeError("generator produces " +
                     std::to_string(generator.feature_count()) +
                     " features, training set has " +
                     std::to_string(train.feature_count()));
  }
  const std::size_t deficit = neg - pos;
  AugmentedDataset out = as_original(train);
  const Matrix synthetic = gan::generate(generator, deficit, rng);
  out.data.features = vstack(out.data.features, synthetic);
  out.data.labels.insert(out.data.labels.end(), deficit, 1);
  out.provenance.insert(out.provenance.end(), deficit, Provenance::kGenerated);
  return out;
}

std::string to_csv(const AugmentedDataset& augmented,
                   const std::vector<std::string>& feature_names,
                   const std::string& label_column) {
  const auto& d = augmented.data;
  std::string out;
  for (std::size_t c = 0; c < d.feature_count(); ++c) {
    if (c > 0) out += ',';
    out += c < feature_names.size() ? csv::escape(feature_names[c])
                                    : 'f' + std::to_string(c);
  }
  out += ',' + csv::escape(label_column) + ",provenance\n";
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (double v : d.features.row(r)) {
      out += csv::format_double(v);
      out += ',';
    }
    out += std::to_string(d.labels[r]);
    out += ',';
    out += to_string(augmented.provenance[r]);
    out += '\n';
  }
  return out;
}

}  // namespace imbgan::augment
