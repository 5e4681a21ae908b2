#include "sahg/cli/commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sahg/analysis/dumps.hpp"
#include "sahg/analysis/synth.hpp"
#include "sahg/error.hpp"
#include "sahg/graph/construct.hpp"
#include "sahg/graph/dataset.hpp"
#include "sahg/model/checkpoint.hpp"
#include "sahg/model/sahg_model.hpp"
#include "sahg/train/trainer.hpp"

#ifndef SAHG_VERSION
#define SAHG_VERSION "0.1.0"
#endif

namespace sahg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return SAHG_VERSION; }

namespace {

// Flags that override individual config keys.
struct Overrides {
  std::optional<std::string> config_file;
  std::optional<std::string> preset;
  std::optional<std::string> variant;
  std::optional<std::string> precision;
  std::optional<std::string> graph;
  std::optional<double> lr, weight_decay, dropout, alpha, focal_gamma, lambda0, tau;
  std::optional<std::size_t> epochs, batch_size, hidden_dim, proj_dim, warp_dim, prototypes, patience, warmup, k;
};

void add_config_options(CLI::App* app, Overrides& o, bool with_variant = true) {
  app->add_option("--config", o.config_file, "JSON config file (keys as in configs/default.json)");
  app->add_option("--preset", o.preset, "built-in preset: default, fox8-23, botsim-24, mgtab");
  if (with_variant) app->add_option("--variant", o.variant, "full, no-graph, no-sector, no-hyperbolic, isotropic");
  app->add_option("--precision", o.precision, "f32 or f64");
  app->add_option("--graph", o.graph, "auto, knn or random");
  app->add_option("--lr", o.lr, "learning rate");
  app->add_option("--weight-decay", o.weight_decay);
  app->add_option("--dropout", o.dropout);
  app->add_option("--alpha", o.alpha, "focal class weight for bots");
  app->add_option("--focal-gamma", o.focal_gamma);
  app->add_option("--lambda0", o.lambda0, "initial entropy weight");
  app->add_option("--tau", o.tau, "sector temperature at init");
  app->add_option("--epochs", o.epochs, "max epochs");
  app->add_option("--batch-size", o.batch_size);
  app->add_option("--hidden-dim", o.hidden_dim);
  app->add_option("--proj-dim", o.proj_dim);
  app->add_option("--warp-dim", o.warp_dim);
  app->add_option("--prototypes", o.prototypes);
  app->add_option("--patience", o.patience);
  app->add_option("--warmup", o.warmup);
  app->add_option("--k", o.k, "neighbors for the k-NN graph");
}

// defaults < preset < config file < flags
TrainConfig resolve_config(const Overrides& o) {
  TrainConfig c = o.preset ? preset(*o.preset) : TrainConfig{};
  if (o.config_file) c = load_config_file(*o.config_file, c);
  if (o.variant) c.variant = parse_variant(*o.variant);
  if (o.precision) c.precision = parse_precision(*o.precision);
  if (o.graph) c.graph = parse_graph_source(*o.graph);
  if (o.lr) c.learning_rate = *o.lr;
  if (o.weight_decay) c.weight_decay = *o.weight_decay;
  if (o.dropout) c.dropout = *o.dropout;
  if (o.alpha) c.focal_alpha = *o.alpha;
  if (o.focal_gamma) c.focal_gamma = *o.focal_gamma;
  if (o.lambda0) c.entropy_weight = *o.lambda0;
  if (o.tau) c.temperature_init = *o.tau;
  if (o.epochs) c.max_epochs = *o.epochs;
  if (o.batch_size) c.batch_size = *o.batch_size;
  if (o.hidden_dim) c.hidden_dim = *o.hidden_dim;
  if (o.proj_dim) c.projection_dim = *o.proj_dim;
  if (o.warp_dim) c.warp_hidden_dim = *o.warp_dim;
  if (o.prototypes) c.num_prototypes = *o.prototypes;
  if (o.patience) c.patience = *o.patience;
  if (o.warmup) c.warmup_epochs = *o.warmup;
  if (o.k) c.knn_k = *o.k;
  c.validate();
  return c;
}

fs::path resolve_out(const std::optional<std::string>& out, const std::string& command) {
  if (out) return *out;
  if (const char* root = std::getenv("SAHG_OUT_DIR"); root && *root) return fs::path(root) / command;
  throw ParameterError("no output directory: pass --out or set SAHG_OUT_DIR");
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParameterError("bad seed list \"" + s + "\"");
    }
  }
  if (seeds.empty()) throw ParameterError("empty seed list");
  return seeds;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw FormatError("cannot write " + p.string());
  f << text;
}

class Manifest {
 public:
  Manifest(const fs::path& dir, std::string command) : path_(dir / "manifest.json") {
    fs::create_directories(dir);
    j_ = {{"command", std::move(command)},
          {"version", version()},
          {"output_dir", fs::absolute(dir).string()},
          {"started_at", utc_now()}};
  }
  json& operator[](const char* key) { return j_[key]; }
  void write() const { write_text(path_, j_.dump(2) + "\n"); }
  void finish() {
    j_["finished_at"] = utc_now();
    write();
  }

 private:
  fs::path path_;
  json j_;
};

std::string fmt_metrics(const train::MetricsReport& m) {
  char b[160];
  std::snprintf(b, sizeof b, "ACC %.4f  F1 %.4f  REC %.4f  PRE %.4f  AUC %.4f", m.acc, m.f1, m.rec, m.pre, m.auc);
  return b;
}

// ---- commands ----

struct BuildGraphArgs {
  std::optional<std::string> dataset;
  bool random = false;
  std::optional<std::size_t> n;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

int cmd_build_graph(const BuildGraphArgs& a, std::ostream& out) {
  if (a.dataset.has_value() == a.random) {
    throw ParameterError("choose exactly one of --dataset or --random-kregular");
  }
  graph::SparseGraph g;
  if (a.random) {
    if (!a.n) throw ParameterError("--random-kregular needs --n");
    g = graph::build_random_kregular_graph(*a.n, a.k, a.seed);
  } else {
    const auto ds = graph::load_dataset(*a.dataset);
    g = graph::build_knn_graph(ds.features, ds.n, ds.d, a.k);
  }
  fs::path target = a.out ? fs::path(*a.out) : resolve_out(std::nullopt, "build-graph") / "edges.csv";
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const auto edges = g.undirected_edges();
  graph::write_edges_csv(target, edges);
  out << "nodes " << g.num_nodes() << "  edges " << g.num_edges() << "  -> " << target.string() << "\n";
  return kExitOk;
}

template <typename T>
train::TrainResult<T> train_and_save(const graph::Dataset& ds, const graph::SparseGraph* g, const TrainConfig& cfg,
                                     const fs::path& dir, std::ostream& out) {
  auto res = train::train_loop<T>(ds, g, cfg, &out);
  json meta{{"config", to_json(cfg)},
            {"dataset", ds.name},
            {"best_epoch", res.best_epoch},
            {"best_val_auc", res.best_val_auc}};
  model::save_checkpoint(dir / "checkpoint.sahg", res.params, meta);
  train::write_history_csv(dir / "history.csv", res.history);
  if (!ds.splits.test.empty()) {
    std::vector<std::uint8_t> yt;
    for (auto i : ds.splits.test) yt.push_back(ds.labels[i]);
    const auto X = model::features_tensor<T>(ds.features, ds.n, ds.d);
    out << "test  " << fmt_metrics(train::evaluate(model::predict(X, g, res.params, ds.splits.test), yt)) << "\n";
  }
  return res;
}

json dataset_json(const std::string& dir, const graph::Dataset& ds) {
  return {{"path", dir}, {"name", ds.name}, {"n", ds.n}, {"d", ds.d}, {"has_edges", ds.edges.has_value()}};
}

int cmd_train(const std::string& dataset, const Overrides& o, std::uint64_t seed,
              const std::optional<std::string>& out_opt, std::ostream& out) {
  TrainConfig cfg = resolve_config(o);
  cfg.seed = seed;
  const auto dir = resolve_out(out_opt, "train");
  const auto ds = graph::load_dataset(dataset);
  Manifest manifest(dir, "train");
  manifest["dataset"] = dataset_json(dataset, ds);
  manifest["variant"] = std::string(to_string(cfg.variant));
  manifest["seeds"] = json::array({seed});
  manifest["config"] = to_json(cfg);
  manifest.write();
  const auto g = train::resolve_graph(ds, cfg);
  const auto* gp = g ? &*g : nullptr;
  if (cfg.precision == Precision::F64) train_and_save<double>(ds, gp, cfg, dir, out);
  else train_and_save<float>(ds, gp, cfg, dir, out);
  manifest.finish();
  return kExitOk;
}

int cmd_protocol(const std::string& dataset, const Overrides& o, const std::string& seeds_str,
                 const std::optional<std::string>& out_opt, std::ostream& out) {
  const TrainConfig cfg = resolve_config(o);
  const auto seeds = parse_seeds(seeds_str);
  const auto dir = resolve_out(out_opt, "protocol");
  const auto ds = graph::load_dataset(dataset);
  Manifest manifest(dir, "protocol");
  manifest["dataset"] = dataset_json(dataset, ds);
  manifest["variant"] = std::string(to_string(cfg.variant));
  manifest["seeds"] = seeds;
  manifest["config"] = to_json(cfg);
  manifest.write();
  const auto g = train::resolve_graph(ds, cfg);
  const auto res = train::run_protocol(ds, g ? &*g : nullptr, cfg, seeds, dir, &out);
  train::write_report_csv(dir / "report.csv", res);
  for (const auto& r : res.runs) out << "seed " << r.seed << "  " << fmt_metrics(r.test) << "\n";
  out << "mean    " << fmt_metrics(res.summary.mean) << "\n";
  out << "std     " << fmt_metrics(res.summary.std) << "\n";
  manifest.finish();
  return kExitOk;
}

int cmd_ablate(const std::string& dataset, const Overrides& o, const std::string& seeds_str,
               const std::optional<std::string>& out_opt, std::ostream& out) {
  const TrainConfig base = resolve_config(o);
  const auto seeds = parse_seeds(seeds_str);
  const auto dir = resolve_out(out_opt, "ablate");
  const auto ds = graph::load_dataset(dataset);
  Manifest manifest(dir, "ablate");
  manifest["dataset"] = dataset_json(dataset, ds);
  json variants = json::array();
  for (auto v : kAllVariants) variants.push_back(std::string(to_string(v)));
  manifest["variant"] = variants;
  manifest["seeds"] = seeds;
  manifest["config"] = to_json(base);
  manifest.write();

  TrainConfig with_graph = base;
  with_graph.variant = Variant::Full;
  const auto g = train::resolve_graph(ds, with_graph);
  std::vector<train::ProtocolResult> results;
  for (auto v : kAllVariants) {
    TrainConfig cfg = base;
    cfg.variant = v;
    const auto vdir = dir / std::string(to_string(v));
    results.push_back(train::run_protocol(ds, model::uses_graph(v) ? &*g : nullptr, cfg, seeds, vdir, &out));
    train::write_report_csv(vdir / "report.csv", results.back());
    out << results.back().method << "  " << fmt_metrics(results.back().summary.mean) << "\n";
  }
  train::write_ablation_csv(dir / "ablation.csv", results);
  manifest.finish();
  return kExitOk;
}

struct AnalyzeArgs {
  std::optional<std::string> checkpoint;
  std::optional<std::string> dataset;
  std::string what;
  std::optional<std::string> out;
  std::string n_values = "1000,2000,4000";
  std::size_t k = 10, dim = 16, hidden_dim = 128, proj_dim = 64, reps = 3;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const auto dir = resolve_out(a.out, "analyze");
  fs::create_directories(dir);
  if (a.what == "complexity") {
    std::vector<std::size_t> ns;
    for (auto v : parse_seeds(a.n_values)) ns.push_back(static_cast<std::size_t>(v));
    const auto rows = analysis::complexity_smoke(ns, a.k, a.dim, a.hidden_dim, a.proj_dim, a.reps);
    analysis::write_complexity_csv(dir / "complexity.csv", rows);
    for (const auto& r : rows) out << "n " << r.n << "  edges " << r.edges << "  " << r.seconds << " s\n";
    return kExitOk;
  }
  if (!a.checkpoint) throw ParameterError("--checkpoint is required for --what " + a.what);
  if (!a.dataset) throw ParameterError("--dataset is required for --what " + a.what);
  json meta;
  auto params = model::load_checkpoint<float>(*a.checkpoint, &meta);
  const auto ds = graph::load_dataset(*a.dataset);
  TrainConfig cfg = meta.contains("config") ? apply_json(TrainConfig{}, meta["config"]) : TrainConfig{};
  cfg.variant = params.variant;
  const auto g = train::resolve_graph(ds, cfg);
  const auto* gp = g ? &*g : nullptr;
  if (a.what == "curvature") {
    analysis::dump_curvature_field(params, ds, gp, analysis::Channel::Node, dir / "curvature_node.csv");
    if (model::uses_graph(params.variant)) {
      analysis::dump_curvature_field(params, ds, gp, analysis::Channel::Graph, dir / "curvature_graph.csv");
    }
  } else if (a.what == "features") {
    analysis::dump_feature_distributions(params, ds, gp, dir / "features.csv");
  } else if (a.what == "embeddings") {
    analysis::export_embeddings(params, ds, gp, dir / "embeddings.csv");
  } else {
    throw ParameterError("unknown --what \"" + a.what + "\"");
  }
  out << "wrote " << a.what << " dump to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_synth(const analysis::SynthConfig& sc, const std::optional<std::string>& out_opt, std::ostream& out) {
  const auto dir = resolve_out(out_opt, "synth");
  const auto ds = analysis::generate_synthetic(sc);
  graph::save_dataset(ds, dir);
  out << "wrote " << ds.n << " nodes (" << ds.num_bots() << " bots) to " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sector-anisotropic hyperbolic graph bot detector"};
  app.name("sahg");
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  BuildGraphArgs bg;
  auto* build = app.add_subcommand("build-graph", "write a k-NN or random k-regular edges.csv");
  build->add_option("--dataset", bg.dataset, "dataset directory (k-NN mode)");
  build->add_flag("--random-kregular", bg.random, "random k-regular mode");
  build->add_option("--n", bg.n, "node count (random mode)");
  build->add_option("--k", bg.k, "neighbors per node")->capture_default_str();
  build->add_option("--seed", bg.seed)->capture_default_str();
  build->add_option("--out", bg.out, "output edges.csv path");

  Overrides train_o;
  std::string train_ds;
  std::uint64_t train_seed = 0;
  std::optional<std::string> train_out;
  auto* trn = app.add_subcommand("train", "train one model");
  trn->add_option("--dataset", train_ds, "dataset directory")->required();
  trn->add_option("--seed", train_seed)->capture_default_str();
  trn->add_option("--out", train_out, "output directory");
  add_config_options(trn, train_o);

  Overrides proto_o;
  std::string proto_ds, proto_seeds = "0,1,2";
  std::optional<std::string> proto_out;
  auto* proto = app.add_subcommand("protocol", "train over several seeds and report mean and std");
  proto->add_option("--dataset", proto_ds, "dataset directory")->required();
  proto->add_option("--seeds", proto_seeds, "comma-separated seeds")->capture_default_str();
  proto->add_option("--out", proto_out, "output directory");
  add_config_options(proto, proto_o);

  Overrides abl_o;
  std::string abl_ds, abl_seeds = "0,1,2";
  std::optional<std::string> abl_out;
  auto* abl = app.add_subcommand("ablate", "run the protocol for every variant");
  abl->add_option("--dataset", abl_ds, "dataset directory")->required();
  abl->add_option("--seeds", abl_seeds, "comma-separated seeds")->capture_default_str();
  abl->add_option("--out", abl_out, "output directory");
  add_config_options(abl, abl_o, false);

  AnalyzeArgs an;
  auto* ana = app.add_subcommand("analyze", "geometric dumps of a trained checkpoint");
  ana->add_option("--checkpoint", an.checkpoint, "checkpoint file");
  ana->add_option("--dataset", an.dataset, "dataset directory");
  ana->add_option("--what", an.what, "curvature, features, embeddings or complexity")
      ->required()
      ->check(CLI::IsMember({"curvature", "features", "embeddings", "complexity"}));
  ana->add_option("--out", an.out, "output directory");
  ana->add_option("--n-values", an.n_values, "node counts for the complexity sweep")->capture_default_str();
  ana->add_option("--k", an.k)->capture_default_str();
  ana->add_option("--dim", an.dim)->capture_default_str();
  ana->add_option("--hidden-dim", an.hidden_dim)->capture_default_str();
  ana->add_option("--proj-dim", an.proj_dim)->capture_default_str();
  ana->add_option("--reps", an.reps)->capture_default_str();

  analysis::SynthConfig sc;
  std::optional<std::string> synth_out;
  auto* syn = app.add_subcommand("synth", "generate the synthetic anisotropic dataset");
  syn->add_option("--n", sc.n)->capture_default_str();
  syn->add_option("--bot-frac", sc.bot_fraction)->capture_default_str();
  syn->add_option("--clusters", sc.clusters)->capture_default_str();
  syn->add_option("--dim", sc.dim)->capture_default_str();
  syn->add_option("--concentration", sc.bot_concentration, "bot angular concentration")->capture_default_str();
  syn->add_option("--noise", sc.noise)->capture_default_str();
  syn->add_option("--seed", sc.seed)->capture_default_str();
  syn->add_option("--out", synth_out, "output dataset directory");

  std::vector<std::string> argv_store{"sahg"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build) return cmd_build_graph(bg, out);
    if (*trn) return cmd_train(train_ds, train_o, train_seed, train_out, out);
    if (*proto) return cmd_protocol(proto_ds, proto_o, proto_seeds, proto_out, out);
    if (*abl) return cmd_ablate(abl_ds, abl_o, abl_seeds, abl_out, out);
    if (*ana) return cmd_analyze(an, out);
    if (*syn) return cmd_synth(sc, synth_out, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}

}  // namespace sahg::cli
