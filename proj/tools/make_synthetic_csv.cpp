#include <CLI11.hpp>

#include <iostream>

#include "synthetic_data.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write a synthetic imbalanced CSV in the credit-card layout"};
  imbgan::synthetic::SyntheticSpec spec;
  std::string out;
  app.add_option("--out", out, "Output CSV")->required();
  app.add_option("--rows", spec.rows, "Total rows");
  app.add_option("--positives", spec.positives, "Positive rows");
  app.add_option("--shift", spec.shift, "Mean shift of informative features");
  app.add_option("--informative", spec.informative, "Informative features");
  app.add_option("--stddev", spec.stddev, "Per-feature standard deviation");
  app.add_option("--seed", spec.seed, "Seed");
  CLI11_PARSE(app, argc, argv);
  try {
    imbgan::synthetic::write_csv(spec, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
