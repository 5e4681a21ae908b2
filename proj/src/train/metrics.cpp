#include "sahg/train/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sahg/error.hpp"

namespace sahg::train {

double roc_auc(std::span<const double> probs, std::span<const std::uint8_t> y, bool* undefined) {
  if (probs.size() != y.size()) throw DimensionError("roc_auc: size mismatch");
  const std::size_t M = probs.size();
  std::size_t n_pos = 0;
  for (auto v : y) n_pos += v ? 1 : 0;
  const std::size_t n_neg = M - n_pos;
  if (undefined) *undefined = (n_pos == 0 || n_neg == 0);
  if (n_pos == 0 || n_neg == 0) return 0.5;

  std::vector<std::size_t> order(M);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < M) {
    std::size_t j = i;
    while (j + 1 < M && probs[order[j + 1]] == probs[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (y[order[k]]) pos_rank_sum += midrank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricsReport evaluate(std::span<const double> probs, std::span<const std::uint8_t> y, double threshold) {
  if (probs.empty()) throw DimensionError("evaluate: empty prediction set");
  if (probs.size() != y.size()) throw DimensionError("evaluate: size mismatch");
  MetricsReport r;
  auto& c = r.confusion;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool pred = probs[i] >= threshold;
    if (pred && y[i]) ++c.tp;
    else if (pred) ++c.fp;
    else if (y[i]) ++c.fn;
    else ++c.tn;
  }
  const double tp = static_cast<double>(c.tp);
  r.acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  r.pre = c.tp + c.fp ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
  r.rec = c.tp + c.fn ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
  r.f1 = r.pre + r.rec > 0.0 ? 2.0 * r.pre * r.rec / (r.pre + r.rec) : 0.0;
  r.auc = roc_auc(probs, y, &r.auc_undefined);
  return r;
}

MetricSummary summarize(const std::vector<MetricsReport>& runs) {
  if (runs.empty()) throw ParameterError("summarize: no runs");
  MetricSummary s;
  const double n = static_cast<double>(runs.size());
  auto field = [&](double MetricsReport::*f) {
    // shifted by the first run so identical runs give exactly that value and std 0
    const double x0 = runs.front().*f;
    double shift = 0.0;
    for (const auto& r : runs) shift += r.*f - x0;
    const double mean = x0 + shift / n;
    double var = 0.0;
    for (const auto& r : runs) var += (r.*f - mean) * (r.*f - mean);
    s.mean.*f = mean;
    s.std.*f = std::sqrt(var / n);
  };
  field(&MetricsReport::acc);
  field(&MetricsReport::f1);
  field(&MetricsReport::rec);
  field(&MetricsReport::pre);
  field(&MetricsReport::auc);
  for (const auto& r : runs) s.mean.auc_undefined = s.mean.auc_undefined || r.auc_undefined;
  return s;
}

}  // namespace sahg::train
