#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sahg/graph/dataset.hpp"
#include "sahg/graph/sparse_graph.hpp"
#include "sahg/model/params.hpp"
#include "sahg/train/config.hpp"
#include "sahg/train/metrics.hpp"

namespace sahg::train {

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0, focal = 0, entropy_reg = 0, lambda = 0;
  double val_auc = 0, val_f1 = 0, lr = 0;
};

/// Tracks the best validation score. An epoch counts as an improvement only
/// when strictly better than every previous one.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience);
  // Returns true when `score` is a new best.
  bool update(std::size_t epoch, double score);
  bool should_stop() const { return since_best_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_score() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t since_best_ = 0;
  std::size_t best_epoch_ = 0;
  double best_;
  bool seen_ = false;
};

template <typename T>
struct TrainResult {
  model::SahgParams<T> params;  // restored to the best validation epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_auc = 0.0;
};

/// Mini-batch training on the train split with early stopping on validation
/// AUC. Every step runs the full-graph aggregation and takes the loss over
/// the batch rows. `g` may be null only for the no-graph variant.
/// Throws NumericError when the loss becomes non-finite.
template <typename T>
TrainResult<T> train_loop(const graph::Dataset& ds, const graph::SparseGraph* g, const TrainConfig& cfg,
                          std::ostream* log = nullptr);

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

// Edges used by the graph channel: the dataset's own edges, or a cosine k-NN
// graph (auto without edges.csv, or knn), or a random k-regular graph.
// Returns nothing for the no-graph variant.
std::optional<graph::SparseGraph> resolve_graph(const graph::Dataset& ds, const TrainConfig& cfg);

struct SeedRun {
  std::uint64_t seed = 0;
  MetricsReport test;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  double best_val_auc = 0.0;
  double seconds = 0.0;
};

struct ProtocolResult {
  std::string method;
  std::string dataset;
  std::vector<SeedRun> runs;
  MetricSummary summary;
};

/// One training run per seed, each evaluated on the test split. With an
/// output directory, seed_<s>/checkpoint.sahg and seed_<s>/history.csv are
/// written for every seed.
ProtocolResult run_protocol(const graph::Dataset& ds, const graph::SparseGraph* g, TrainConfig cfg,
                            const std::vector<std::uint64_t>& seeds,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                            std::ostream* log = nullptr);

// method,dataset,seed,ACC,F1,REC,PRE,AUC with one row per seed, then mean
// and std rows.
void write_report_csv(const std::filesystem::path& path, const ProtocolResult& result);
// One row per variant with mean and std of every metric.
void write_ablation_csv(const std::filesystem::path& path, const std::vector<ProtocolResult>& results);

}  // namespace sahg::train
