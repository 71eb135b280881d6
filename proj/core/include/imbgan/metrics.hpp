#pragma once

// Confusion counts, the six reported scores and ROC curves. Class 1 is the
// positive class throughout.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace imbgan::metrics {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;
};

// All fields in [0, 1]; accuracy becomes a percentage only when printed.
struct MetricsReport {
  double accuracy = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double specificity = 0.0;
  double auc_roc = 0.0;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

// Starts at (0, 0), ends at (1, 1), fpr and tpr non-decreasing.
struct RocCurve {
  std::vector<RocPoint> points;
};

ConfusionMatrix confusion(std::span<const int> y_true,
                          std::span<const int> y_pred);

// Ratios with a zero denominator are 0.
MetricsReport compute_metrics(const ConfusionMatrix& cm, double auc);

// Sweeps the distinct scores from high to low, one curve point per distinct
// value; AUC by the trapezoid rule (ties contribute half).
std::pair<RocCurve, double> roc_auc(std::span<const int> y_true,
                                    std::span<const double> scores);

// Header fpr,tpr.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace imbgan::metrics
