#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sahg::train {

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

struct MetricsReport {
  double acc = 0, f1 = 0, rec = 0, pre = 0, auc = 0.5;
  Confusion confusion;
  bool auc_undefined = false;  // single-class labels; auc reported as 0.5
};

// Area under the ROC curve from midranks; 0.5 (and *undefined = true) when
// only one class is present.
double roc_auc(std::span<const double> probs, std::span<const std::uint8_t> y, bool* undefined = nullptr);

// Positive prediction means prob >= threshold.
MetricsReport evaluate(std::span<const double> probs, std::span<const std::uint8_t> y, double threshold = 0.5);

struct MetricSummary {
  MetricsReport mean;
  MetricsReport std;  // population standard deviation over runs
};

MetricSummary summarize(const std::vector<MetricsReport>& runs);

}  // namespace sahg::train
