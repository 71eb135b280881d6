#pragma once

// Class balancing: random duplication of minority rows, or merging rows drawn
// from a trained generator. Both append after the untouched original rows.

#include <cstdint>
#include <string>
#include <vector>

#include "imbgan/data.hpp"
#include "imbgan/gan.hpp"
#include "imbgan/random.hpp"

namespace imbgan::augment {

enum class Provenance : std::uint8_t { kOriginal, kDuplicated, kGenerated };

const char* to_string(Provenance p) noexcept;

struct AugmentedDataset {
  data::Dataset data;
  std::vector<Provenance> provenance;  // one per row
};

// Label-1 rows in order. Throws PreconditionError when there are none.
data::Dataset isolate_positives(const data::Dataset& train);

// Appends minority rows drawn uniformly with replacement until the classes are
// equal. Needs both classes present.
AugmentedDataset random_oversample(const data::Dataset& train, Rng& rng);

// Appends (negatives - positives) generated rows labeled 1. Throws
// PreconditionError unless negatives outnumber positives.
AugmentedDataset gan_augment(const data::Dataset& train,
                             const gan::Generator& generator, Rng& rng);

// Header: feature names (f0.. when empty), label column, provenance.
std::string to_csv(const AugmentedDataset& augmented,
                   const std::vector<std::string>& feature_names = {},
                   const std::string& label_column = "Class");

}  // namespace imbgan::augment
