#include "sahg/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

#include "sahg/error.hpp"
#include "sahg/graph/construct.hpp"
#include "sahg/model/checkpoint.hpp"
#include "sahg/model/sahg_model.hpp"
#include "sahg/rng.hpp"
#include "sahg/train/losses.hpp"
#include "sahg/train/optim.hpp"

namespace sahg::train {

namespace fs = std::filesystem;

EarlyStopping::EarlyStopping(std::size_t patience)
    : patience_(patience), best_(-std::numeric_limits<double>::infinity()) {
  if (patience == 0) throw ParameterError("patience must be >= 1");
}

bool EarlyStopping::update(std::size_t epoch, double score) {
  if (!seen_ || score > best_) {
    seen_ = true;
    best_ = score;
    best_epoch_ = epoch;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

template <typename T>
TrainResult<T> train_loop(const graph::Dataset& ds, const graph::SparseGraph* g, const TrainConfig& cfg,
                          std::ostream* log) {
  cfg.validate();
  const auto& splits = ds.splits;
  if (splits.train.empty() || splits.val.empty()) {
    throw ParameterError("training needs non-empty train and validation splits");
  }
  if (model::uses_graph(cfg.variant)) {
    if (g == nullptr) throw ParameterError("variant " + std::string(to_string(cfg.variant)) + " needs a graph");
    if (g->num_nodes() != ds.n) throw DimensionError("graph node count does not match dataset");
  }

  auto params = model::init_params<T>(cfg, ds.d, cfg.seed);
  const auto X = model::features_tensor<T>(ds.features, ds.n, ds.d);
  std::vector<Tensor<T>> trainable;
  for (auto& nt : params.parameters()) trainable.push_back(nt.tensor);
  AdamW<T> opt(trainable, {cfg.learning_rate, 0.9, 0.999, 1e-8, cfg.weight_decay});

  Rng shuffle_rng(cfg.seed, "shuffle");
  Rng dropout_rng(cfg.seed, "dropout");
  std::vector<std::uint8_t> val_labels;
  for (auto i : splits.val) val_labels.push_back(ds.labels[i]);

  TrainResult<T> result;
  auto best = params.clone();
  EarlyStopping stopper(cfg.patience);
  std::vector<std::size_t> order = splits.train;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
    double sum_total = 0, sum_focal = 0, sum_reg = 0, lambda = 0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(stop));
      std::vector<std::uint8_t> yb;
      yb.reserve(batch.size());
      for (auto i : batch) yb.push_back(ds.labels[i]);

      for (auto& p : trainable) p.drop_grad();
      ad::Tape<T> tape;
      model::Context<T> ctx{tape, true, static_cast<T>(cfg.dropout), &dropout_rng};
      const auto where = "epoch " + std::to_string(epoch) + ", step " + std::to_string(steps);
      std::optional<LossTerms<T>> loss;
      try {
        auto out = model::forward(ctx, X, g, params, batch);
        loss = total_loss(tape, out.probs, yb, out.node.entropy, epoch, cfg.focal_alpha, cfg.focal_gamma,
                          cfg.entropy_weight, cfg.warmup_epochs, cfg.num_prototypes);
      } catch (const DomainError& e) {
        // a domain error mid-training means the parameters have diverged
        throw NumericError("non-finite values at " + where + ": " + e.what());
      }
      const double total = static_cast<double>(loss->total.item());
      if (!std::isfinite(total)) throw NumericError("non-finite loss at " + where);
      tape.backward(loss->total);
      clip_grad_norm(trainable, cfg.grad_clip_norm);
      opt.step();
      sum_total += total;
      sum_focal += loss->focal;
      sum_reg += loss->entropy_reg;
      lambda = loss->lambda;
      ++steps;
    }

    const auto val_probs = model::predict(X, g, params, splits.val);
    for (double p : val_probs) {
      if (!std::isfinite(p)) throw NumericError("non-finite validation output at epoch " + std::to_string(epoch));
    }
    const auto val = evaluate(val_probs, val_labels);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = sum_total / static_cast<double>(steps);
    rec.focal = sum_focal / static_cast<double>(steps);
    rec.entropy_reg = sum_reg / static_cast<double>(steps);
    rec.lambda = lambda;
    rec.val_auc = val.auc;
    rec.val_f1 = val.f1;
    rec.lr = opt.options().lr;
    result.history.push_back(rec);
    if (log) {
      char line[160];
      std::snprintf(line, sizeof line, "epoch %3zu  loss %.5f  val_auc %.4f  val_f1 %.4f\n", epoch, rec.train_loss,
                    rec.val_auc, rec.val_f1);
      *log << line << std::flush;
    }
    if (stopper.update(epoch, val.auc)) best.assign(params);
    if (stopper.should_stop()) break;
  }
  params.assign(best);
  result.params = std::move(params);
  result.best_epoch = stopper.best_epoch();
  result.best_val_auc = stopper.best_score();
  return result;
}

void write_history_csv(const fs::path& path, const std::vector<EpochRecord>& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "epoch,train_loss,focal,entropy_reg,lambda,val_auc,val_f1,lr\n";
  char line[512];
  for (const auto& r : history) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.epoch, r.train_loss,
                  r.focal, r.entropy_reg, r.lambda, r.val_auc, r.val_f1, r.lr);
    out << line;
  }
}

std::optional<graph::SparseGraph> resolve_graph(const graph::Dataset& ds, const TrainConfig& cfg) {
  if (!model::uses_graph(cfg.variant)) return std::nullopt;
  switch (cfg.graph) {
    case GraphSource::Auto:
      if (ds.edges) return graph::SparseGraph::from_edges(ds.n, *ds.edges);
      return graph::build_knn_graph(ds.features, ds.n, ds.d, cfg.knn_k);
    case GraphSource::Knn:
      return graph::build_knn_graph(ds.features, ds.n, ds.d, cfg.knn_k);
    case GraphSource::Random:
      // Fixed graph seed so the topology does not vary with the training seed.
      return graph::build_random_kregular_graph(ds.n, cfg.knn_k, 0);
  }
  return std::nullopt;
}

namespace {

template <typename T>
SeedRun run_seed(const graph::Dataset& ds, const graph::SparseGraph* g, const TrainConfig& cfg,
                 const std::optional<fs::path>& out_dir, std::ostream* log) {
  const auto t0 = std::chrono::steady_clock::now();
  auto res = train_loop<T>(ds, g, cfg, log);
  SeedRun run;
  run.seed = cfg.seed;
  run.best_epoch = res.best_epoch;
  run.epochs_run = res.history.size();
  run.best_val_auc = res.best_val_auc;
  std::vector<std::uint8_t> yt;
  for (auto i : ds.splits.test) yt.push_back(ds.labels[i]);
  if (!ds.splits.test.empty()) {
    const auto X = model::features_tensor<T>(ds.features, ds.n, ds.d);
    run.test = evaluate(model::predict(X, g, res.params, ds.splits.test), yt);
  }
  if (out_dir) {
    const auto dir = *out_dir / ("seed_" + std::to_string(cfg.seed));
    fs::create_directories(dir);
    nlohmann::json meta{{"config", to_json(cfg)},
                        {"dataset", ds.name},
                        {"best_epoch", res.best_epoch},
                        {"best_val_auc", res.best_val_auc}};
    model::save_checkpoint(dir / "checkpoint.sahg", res.params, meta);
    write_history_csv(dir / "history.csv", res.history);
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace

ProtocolResult run_protocol(const graph::Dataset& ds, const graph::SparseGraph* g, TrainConfig cfg,
                            const std::vector<std::uint64_t>& seeds, const std::optional<fs::path>& out_dir,
                            std::ostream* log) {
  if (seeds.empty()) throw ParameterError("protocol needs at least one seed");
  ProtocolResult result;
  result.method = "sahg-" + std::string(to_string(cfg.variant));
  result.dataset = ds.name;
  std::vector<MetricsReport> tests;
  for (auto seed : seeds) {
    cfg.seed = seed;
    if (log) *log << "== " << result.method << " seed " << seed << "\n";
    try {
      result.runs.push_back(cfg.precision == Precision::F64 ? run_seed<double>(ds, g, cfg, out_dir, log)
                                                             : run_seed<float>(ds, g, cfg, out_dir, log));
    } catch (const NumericError& e) {
      throw NumericError("seed " + std::to_string(seed) + ": " + e.what());
    }
    tests.push_back(result.runs.back().test);
  }
  result.summary = summarize(tests);
  return result;
}

namespace {

void metric_row(std::ostream& out, const std::string& head, const MetricsReport& m) {
  char line[512];
  std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", head.c_str(), m.acc, m.f1, m.rec, m.pre,
                m.auc);
  out << line;
}

}  // namespace

void write_report_csv(const fs::path& path, const ProtocolResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "method,dataset,seed,ACC,F1,REC,PRE,AUC\n";
  const std::string prefix = r.method + "," + r.dataset + ",";
  for (const auto& run : r.runs) metric_row(out, prefix + std::to_string(run.seed), run.test);
  metric_row(out, prefix + "mean", r.summary.mean);
  metric_row(out, prefix + "std", r.summary.std);
}

void write_ablation_csv(const fs::path& path, const std::vector<ProtocolResult>& results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << "method,dataset,seeds,ACC,ACC_std,F1,F1_std,REC,REC_std,PRE,PRE_std,AUC,AUC_std\n";
  char line[768];
  for (const auto& r : results) {
    const auto& m = r.summary.mean;
    const auto& s = r.summary.std;
    std::snprintf(line, sizeof line, "%s,%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.method.c_str(), r.dataset.c_str(), r.runs.size(), m.acc, s.acc, m.f1, s.f1, m.rec, s.rec,
                  m.pre, s.pre, m.auc, s.auc);
    out << line;
  }
}

template TrainResult<float> train_loop<float>(const graph::Dataset&, const graph::SparseGraph*,
                                              const TrainConfig&, std::ostream*);
template TrainResult<double> train_loop<double>(const graph::Dataset&, const graph::SparseGraph*,
                                                const TrainConfig&, std::ostream*);

}  // namespace sahg::train
