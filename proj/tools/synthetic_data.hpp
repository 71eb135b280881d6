#pragma once

// Two overlapping Gaussian classes clipped to [0, 1], laid out like the
// credit-card table (Time, V1..V28, Amount, Class).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "imbgan/data.hpp"

namespace imbgan::synthetic {

struct SyntheticSpec {
  std::size_t rows = 15000;
  std::size_t positives = 450;
  std::size_t features = data::kFeatureCount;
  std::size_t informative = 10;  // leading features whose mean differs
  double negative_mean = 0.45;
  double shift = 0.08;
  double stddev = 0.1;
  std::uint64_t seed = 7;
};

// Positives occupy random row positions.
data::RawTable make_table(const SyntheticSpec& spec);

// "Time", "V1".."V28", "Amount" when features == 30, otherwise f0..f{n-1}.
std::string header_name(std::size_t index, std::size_t features);

std::string to_csv(const data::RawTable& table,
                   const std::string& label_column = "Class");

void write_csv(const SyntheticSpec& spec, const std::filesystem::path& path);

}  // namespace imbgan::synthetic
