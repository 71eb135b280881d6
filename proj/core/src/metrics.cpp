#include "imbgan/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "imbgan/csv.hpp"
#include "imbgan/errors.hpp"

namespace imbgan::metrics {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void require_binary(std::span<const int> labels, const char* who) {
  for (int v : labels) {
    if (v != 0 && v != 1) {
      throw PreconditionError(std::string(who) + ": label " +
                              std::to_string(v) + " is not 0 or 1");
    }
  }
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> y_true,
                          std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ShapeError("confusion: " + std::to_string(y_true.size()) +
                     " labels vs " + std::to_string(y_pred.size()) +
                     " predictions");
  }
  require_binary(y_true, "confusion");
  require_binary(y_pred, "confusion");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1) {
      (y_pred[i] == 1 ? cm.tp : cm.fn) += 1;
    } else {
      (y_pred[i] == 1 ? cm.fp : cm.tn) += 1;
    }
  }
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm, double auc) {
  if (cm.total() == 0) {
    throw PreconditionError("compute_metrics: confusion matrix is empty");
  }
  MetricsReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.recall = ratio(cm.tp, cm.tp + cm.fn);
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  const double denom = r.precision + r.recall;
  r.f1 = denom > 0.0 ? 2.0 * r.precision * r.recall / denom : 0.0;
  r.auc_roc = auc;
  return r;
}

std::pair<RocCurve, double> roc_auc(std::span<const int> y_true,
                                    std::span<const double> scores) {
  if (y_true.size() != scores.size()) {
    throw ShapeError("roc_auc: " + std::to_string(y_true.size()) +
                     " labels vs " + std::to_string(scores.size()) + " scores");
  }
  require_binary(y_true, "roc_auc");
  const auto positives =
      static_cast<std::size_t>(std::count(y_true.begin(), y_true.end(), 1));
  const std::size_t negatives = y_true.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw PreconditionError("roc_auc: AUC is undefined without both classes");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  double auc = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    const std::size_t prev_tp = tp;
    const std::size_t prev_fp = fp;
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      (y_true[order[i]] == 1 ? tp : fp) += 1;
    }
    // Trapezoid in count space: (fp - prev_fp) * (tp + prev_tp) / 2.
    auc += static_cast<double>(fp - prev_fp) *
           static_cast<double>(tp + prev_tp) / 2.0;
    curve.points.push_back({ratio(fp, negatives), ratio(tp, positives)});
  }
  auc /= static_cast<double>(positives) * static_cast<double>(negatives);
  return {std::move(curve), auc};
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : curve.points) {
    out += csv::format_double(p.fpr);
    out += ',';
    out += csv::format_double(p.tpr);
    out += '\n';
  }
  return out;
}

}  // namespace imbgan::metrics
