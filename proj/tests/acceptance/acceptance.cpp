// Acceptance checks: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Usage: sahg_acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sahg/analysis/dumps.hpp"
#include "sahg/analysis/synth.hpp"
#include "sahg/autodiff/grad_check.hpp"
#include "sahg/autodiff/ops.hpp"
#include "sahg/cli/commands.hpp"
#include "sahg/geometry/sah.hpp"
#include "sahg/graph/construct.hpp"
#include "sahg/graph/dataset.hpp"
#include "sahg/model/checkpoint.hpp"
#include "sahg/model/sahg_model.hpp"
#include "sahg/train/losses.hpp"
#include "sahg/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace sahg;
using ad::Tape;
using ad::Tensor;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Tensor<double> randn(ad::Shape s, Rng& rng, double scale = 1.0) {
  auto t = Tensor<double>::zeros(std::move(s), true);
  for (auto& v : t.values()) v = scale * rng.normal();
  return t;
}

Tensor<double> randu(ad::Shape s, Rng& rng, double lo, double hi) {
  auto t = Tensor<double>::zeros(std::move(s), true);
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

Tensor<double> probe(Tape<double>& t, const Tensor<double>& y) {
  Rng rng(99);
  auto w = Tensor<double>::zeros(y.shape());
  for (auto& v : w.values()) v = rng.normal();
  return ad::sum(t, ad::mul(t, y, w));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

int run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::cerr << "command failed (" << code << "): " << err.str() << "\n";
  return code;
}

// --- 1. gradients -----------------------------------------------------------

Outcome gradient_suite() {
  using namespace sahg::ad;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_name;
  std::size_t checks = 0;
  auto check = [&](const std::string& name, const std::function<Tensor<double>(Tape<double>&)>& f,
                   std::vector<Tensor<double>> leaves) {
    const double e = grad_check(f, std::move(leaves)).max_rel_error;
    ++checks;
    if (e >= worst) worst = e, worst_name = name;
  };
  for (std::uint64_t p = 0; p < 3; ++p) {
    Rng rng(p, "acceptance-grad");
    auto x = randn({5, 4}, rng), W = randn({3, 4}, rng), b = randn({3}, rng);
    check("affine", [&](Tape<double>& t) { return probe(t, affine(t, x, W, b)); }, {x, W, b});
    for (auto k : {Unary::Gelu, Unary::Softplus, Unary::Sigmoid, Unary::Exp, Unary::Square, Unary::Sinh}) {
      auto u = randn({3, 4}, rng, 2.0);
      check("unary", [&](Tape<double>& t) { return probe(t, unary(t, k, u)); }, {u});
    }
    for (auto k : {Unary::Log, Unary::Sqrt}) {
      auto u = randu({3, 4}, rng, 0.2, 3.0);
      check("unary", [&](Tape<double>& t) { return probe(t, unary(t, k, u)); }, {u});
    }
    for (auto k : {Binary::Add, Binary::Sub, Binary::Mul, Binary::Div}) {
      auto a = randn({4, 3}, rng), row = randu({3}, rng, 0.5, 2), col = randu({4, 1}, rng, 0.5, 2);
      check("binary",
            [&](Tape<double>& t) { return probe(t, binary(t, k, binary(t, k, a, row), col)); }, {a, row, col});
    }
    auto pos = randu({6}, rng, 0.3, 2.0);
    check("scale/shift/pow/clamp",
          [&](Tape<double>& t) { return probe(t, clamp(t, pow(t, shift(t, scale(t, pos, 1.5), 0.25), 1.7), -1e2, 1e2)); },
          {pos});
    auto g = randn({4}, rng), bb = randn({4}, rng);
    auto lx = randn({5, 4}, rng);
    check("layer_norm", [&](Tape<double>& t) { return probe(t, layer_norm(t, lx, g, bb)); }, {lx, g, bb});
    auto s = randn({4, 3}, rng, 2.0);
    check("softmax_rows", [&](Tape<double>& t) { return probe(t, softmax_rows(t, s)); }, {s});
    check("entropy_from_logits", [&](Tape<double>& t) { return probe(t, entropy_from_logits(t, s)); }, {s});
    auto gr = graph::SparseGraph::from_edges(6, std::vector<graph::Edge>{{0, 1}, {1, 2}, {2, 3}, {0, 3}, {1, 4}});
    auto nx = randn({6, 3}, rng);
    check("sparse_mean_aggregate", [&](Tape<double>& t) { return probe(t, sparse_mean_aggregate(t, nx, gr.view())); },
          {nx});
    auto r = randn({4, 3}, rng);
    check("reductions",
          [&](Tape<double>& t) { return add(t, add(t, mean(t, square(t, r)), sum(t, r)), probe(t, sum_rows(t, r))); },
          {r});
    check("max_rows", [&](Tape<double>& t) { return probe(t, max_rows(t, r).value); }, {r});
    check("norm2_rows", [&](Tape<double>& t) { return probe(t, norm2_rows(t, r)); }, {r});
    for (auto m : {NormalizeMode::MaxEps, NormalizeMode::AddEps})
      check("normalize_rows", [&](Tape<double>& t) { return probe(t, normalize_rows(t, r, 1e-6, m)); }, {r});
    auto v = randn({3}, rng);
    check("gather/concat/reshape",
          [&](Tape<double>& t) {
            auto gth = gather_rows(t, nx, {4, 0, 4});
            return probe(t, reshape(t, concat_cols(t, {gth, v}), {12}));
          },
          {nx, v});
    check("dropout",
          [&](Tape<double>& t) {
            Rng mask(7);
            return probe(t, dropout(t, r, 0.3, mask));
          },
          {r});
    auto bn = randn({8}, rng);
    check("batch_norm",
          [&](Tape<double>& t) {
            auto rm = Tensor<double>::full({1}, 0.0), rv = Tensor<double>::full({1}, 1.0);
            return probe(t, batch_norm(t, bn, rm, rv, true));
          },
          {bn});
  }

  // full composed loss on an 8-node instance
  TrainConfig cfg;
  cfg.hidden_dim = 8;
  cfg.projection_dim = 4;
  cfg.warp_hidden_dim = 4;
  cfg.dropout = 0.0;
  auto params = model::init_params<double>(cfg, 3, 11);
  Rng rng(12);
  for (auto& v : params.node.wg2.values()) v = rng.normal(0, 0.5);
  for (auto& v : params.graph.wg2.values()) v = rng.normal(0, 0.5);
  auto X = randn({8, 3}, rng);
  X.set_requires_grad(false);
  auto g = graph::SparseGraph::from_edges(
      8, std::vector<graph::Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {2, 6}});
  std::vector<std::uint8_t> y{1, 0, 1, 1, 0, 0, 1, 0};
  std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<Tensor<double>> leaves;
  for (auto& nt : params.parameters()) leaves.push_back(nt.tensor);
  const double full = ad::grad_check(
                          [&](Tape<double>& t) {
                            model::Context<double> ctx{t, true};
                            auto out = model::forward(ctx, X, &g, params, rows);
                            return train::total_loss(t, out.probs, y, out.node.entropy, 2, 0.25, 2.0, 0.03, 20, 2)
                                .total;
                          },
                          leaves)
                          .max_rel_error;
  const double secs = seconds_since(t0);
  const double overall = std::max(worst, full);
  return {overall < 1e-4 && secs < 30.0,
          fmt("ops max rel err %.2e (%s, %zu op checks), full model %.2e, %.1f s", worst, worst_name.c_str(),
              checks, full, secs)};
}

// --- 2. geometry ------------------------------------------------------------

Outcome geometry_suite() {
  using namespace sahg::geometry;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SahPoint> pts;
  for (double r = 0.0; r <= 10.0; r += 0.05) pts.push_back({r, {}});
  double reduction = 0.0;
  for (double c : {0.01, 0.25, 1.0, 2.0, 4.0, 9.0}) reduction = std::max(reduction, check_constant_curvature_reduction(c, pts));
  double curvature = 0.0;
  for (int gi = 1; gi <= 50; ++gi) {
    for (int ri = 1; ri <= 30; ++ri) {
      const double gm = 0.1 * gi, r = 0.1 * ri;
      curvature = std::max(curvature, std::abs(radial_curvature_numeric(gm, r) - radial_curvature(gm)));
    }
  }
  const double small = std::abs(amplification_ratio(1e-4, 1.0) - 1.0);
  const double large = std::abs(amplification_ratio(2.0, 3.0) / (std::exp(6.0) / 12.0) - 1.0);
  const double secs = seconds_since(t0);
  return {reduction < 1e-14 && curvature < 1e-5 && small < 1e-8 && large < 5e-3 && secs < 5.0,
          fmt("reduction %.1e, curvature fd %.1e, ratio(1e-4)-1 %.1e, ratio(6) vs asymptote %.2e, %.2f s", reduction,
              curvature, small, large, secs)};
}

// --- 3. curvature gradient through the sector softmax -------------------------

Outcome appendix_oracle() {
  double worst = 0.0;
  for (std::uint64_t draw = 0; draw < 100; ++draw) {
    Rng rng(draw, "acceptance-appendix");
    const std::size_t K = 2 + rng.below(4), dp = 3 + rng.below(6);
    Tape<double> t;
    auto u = ad::normalize_rows(t, randn({1, dp}, rng), 1e-6, ad::NormalizeMode::MaxEps);
    auto protos = ad::normalize_rows(t, randn({K, dp}, rng), 1e-6, ad::NormalizeMode::AddEps);
    auto phi = ad::linear(t, u, protos);
    std::vector<double> tau(K);
    for (auto& v : tau) v = rng.uniform(0.5, 8.0);
    const double gamma_v = rng.uniform(0.05, 3.0);
    const std::size_t k = rng.below(K);
    Tape<double> t2;
    auto gamma = Tensor<double>::from({1, 1}, {gamma_v}, true);
    auto phic = Tensor<double>::from({1, K}, phi.values());
    auto q = ad::softmax_rows(t2, ad::mul(t2, ad::mul(t2, phic, Tensor<double>::from({K}, tau)), gamma));
    std::vector<double> onehot(K, 0.0);
    onehot[k] = 1.0;
    t2.backward(ad::sum(t2, ad::mul(t2, q, Tensor<double>::from({1, K}, onehot))));
    double mix = 0.0;
    for (std::size_t j = 0; j < K; ++j) mix += q[j] * tau[j] * phic[j];
    const double analytic = q[k] * (tau[k] * phic[k] - mix);
    worst = std::max(worst, std::abs(gamma.grad()[0] - analytic));
  }
  return {worst < 1e-8, fmt("max |autodiff - analytic| = %.2e over 100 draws", worst)};
}

// --- 4. k-NN oracle -----------------------------------------------------------

std::set<graph::Edge> brute_knn(const std::vector<float>& X, std::size_t n, std::size_t d, std::size_t k) {
  std::vector<double> norm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) norm[i] += double(X[i * d + c]) * X[i * d + c];
    norm[i] = std::sqrt(norm[i]);
  }
  std::set<graph::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double dot = 0.0;
      if (norm[i] > 0 && norm[j] > 0)
        for (std::size_t c = 0; c < d; ++c) dot += (double(X[i * d + c]) / norm[i]) * (double(X[j * d + c]) / norm[j]);
      cand.emplace_back(-dot, j);
    }
    std::sort(cand.begin(), cand.end());
    for (std::size_t m = 0; m < k; ++m) {
      const auto a = static_cast<graph::NodeId>(i), b = static_cast<graph::NodeId>(cand[m].second);
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  return edges;
}

Outcome knn_oracle() {
  std::size_t agree = 0;
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    Rng rng(inst, "acceptance-knn");
    const std::size_t n = 20 + rng.below(181), d = 2 + rng.below(31);
    const std::size_t k = std::vector<std::size_t>{1, 5, 10}[inst % 3];
    std::vector<float> X(n * d);
    for (auto& v : X) v = static_cast<float>(rng.normal());
    auto g = graph::build_knn_graph(X, n, d, k, 1 + rng.below(64));
    auto e = g.undirected_edges();
    agree += std::set<graph::Edge>(e.begin(), e.end()) == brute_knn(X, n, d, k);
  }
  return {agree == 20, fmt("%zu of 20 instances identical to brute force", agree)};
}

// --- 5. loss and schedule -----------------------------------------------------

Outcome loss_exactness() {
  const bool sched = train::lambda_schedule(0, 0.03, 20) == 0.03 && train::lambda_schedule(20, 0.03, 20) == 0.0;
  Rng rng(5);
  double ce_err = 0.0;
  bool zero_reg = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t B = 1 + rng.below(32);
    std::vector<double> p(B);
    std::vector<std::uint8_t> y(B), humans(B, 0);
    double ce = 0.0;
    for (std::size_t i = 0; i < B; ++i) {
      p[i] = rng.uniform(0.01, 0.99);
      y[i] = rng.bernoulli(0.5);
      ce -= y[i] ? std::log(p[i]) : std::log(1 - p[i]);
    }
    ce /= double(B);
    Tape<double> t;
    auto probs = Tensor<double>::from({B}, p);
    ce_err = std::max(ce_err, std::abs(train::focal_loss(t, probs, y, 1.0, 0.0).item() - ce));
    auto H = Tensor<double>::full({B}, 0.5);
    auto none = train::total_loss(t, probs, humans, H, 0, 0.25, 2.0, 0.03, 20, 2);
    zero_reg = zero_reg && none.entropy_reg == 0.0 &&
               none.total.item() == train::focal_loss(t, probs, humans, 0.25, 2.0).item();
  }
  return {sched && ce_err < 1e-12 && zero_reg,
          fmt("lambda(0)=lambda0 and lambda(T)=0: %s; focal vs CE %.1e; zero-bot regularizer exact: %s",
              sched ? "yes" : "no", ce_err, zero_reg ? "yes" : "no")};
}

// --- 6. initialization ----------------------------------------------------------

Outcome init_contract() {
  TrainConfig cfg;
  double worst_std = 0.0, worst_tau = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto p = model::init_params<double>(cfg, 16, seed);
    Rng rng(seed, "acceptance-dirs");
    Tape<double> t;
    auto u = ad::normalize_rows(t, randn({256, cfg.projection_dim}, rng), 1e-6, ad::NormalizeMode::MaxEps);
    for (auto* ch : {&p.node, &p.graph}) {
      auto g = model::local_warp(t, u, *ch);
      double m = 0, v = 0;
      for (double x : g.values()) m += x / 256;
      for (double x : g.values()) v += (x - m) * (x - m) / 256;
      worst_std = std::max(worst_std, std::sqrt(v));
      for (double l : ch->log_tau.values()) worst_tau = std::max(worst_tau, std::abs(std::exp(l) - 5.0));
    }
  }
  return {worst_std < 1e-2 && worst_tau < 1e-12,
          fmt("max std of gamma over 256 directions %.2e; max |tau - 5| %.1e", worst_std, worst_tau)};
}

// --- 7 and 8. end-to-end on the synthetic dataset --------------------------------

struct EndToEnd {
  Outcome quality, anisotropy;
};

EndToEnd synthetic_protocol(const fs::path& work) {
  const auto ds = analysis::generate_synthetic(analysis::SynthConfig{});
  TrainConfig cfg;
  cfg.knn_k = 10;
  const auto g = train::resolve_graph(ds, cfg);
  const auto res = train::run_protocol(ds, &*g, cfg, {0, 1, 2}, work / "synthetic_protocol");
  bool ok = true;
  double slowest = 0.0, min_f1 = 1.0, min_auc = 1.0;
  for (const auto& r : res.runs) {
    ok = ok && r.test.f1 >= 0.95 && r.test.auc >= 0.99 && r.seconds < 300.0;
    slowest = std::max(slowest, r.seconds);
    min_f1 = std::min(min_f1, r.test.f1);
    min_auc = std::min(min_auc, r.test.auc);
  }
  EndToEnd e;
  e.quality = {ok, fmt("test F1 %.4f +- %.4f (min %.4f), AUC %.4f +- %.4f (min %.4f), slowest run %.1f s",
                       res.summary.mean.f1, res.summary.std.f1, min_f1, res.summary.mean.auc, res.summary.std.auc,
                       min_auc, slowest)};

  int wins = 0;
  std::string per_seed;
  for (int s = 0; s < 3; ++s) {
    auto params = model::load_checkpoint<float>(work / "synthetic_protocol" / ("seed_" + std::to_string(s)) /
                                                "checkpoint.sahg");
    auto fw = analysis::forward_all(params, ds, &*g);
    double gb = 0, gh = 0;
    std::size_t nb = 0, nh = 0;
    for (std::size_t i = 0; i < ds.n; ++i) {
      if (ds.labels[i]) gb += fw.node.gamma[i], ++nb;
      else gh += fw.node.gamma[i], ++nh;
    }
    gb /= double(nb);
    gh /= double(nh);
    wins += gb > gh;
    per_seed += fmt("%sseed %d: %.4f vs %.4f", s ? "; " : "", s, gb, gh);
  }
  e.anisotropy = {wins >= 2, fmt("bots above humans in %d of 3 seeds (%s)", wins, per_seed.c_str())};
  return e;
}

// --- 9. ablation direction ---------------------------------------------------

Outcome ablation(const fs::path& data, const fs::path& work) {
  const auto out = work / "ablation";
  if (run_cli({"ablate", "--dataset", data.string(), "--seeds", "0,1,2,3,4", "--k", "10", "--out", out.string()}) != 0)
    return {false, "ablate command failed"};
  const auto rows = read_csv_rows(out / "ablation.csv");
  double full = NAN, iso = NAN;
  std::string table;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double f1 = std::stod(rows[i][5]);
    if (rows[i][0] == "sahg-full") full = f1;
    if (rows[i][0] == "sahg-isotropic") iso = f1;
    table += fmt("%s%s %.4f", i > 1 ? ", " : "", rows[i][0].c_str() + 5, f1);
  }
  return {rows.size() == 6 && full >= iso - 0.005,
          fmt("mean F1 over 5 seeds: %s (full - isotropic = %+.4f)", table.c_str(), full - iso)};
}

// --- 10. reproducibility ------------------------------------------------------

Outcome reproducibility(const fs::path& data, const fs::path& work) {
  for (auto name : {"repro_a", "repro_b"}) {
    if (run_cli({"protocol", "--dataset", data.string(), "--seeds", "0,1,2", "--out", (work / name).string()}) != 0)
      return {false, "protocol command failed"};
  }
  const auto a = slurp(work / "repro_a" / "report.csv"), b = slurp(work / "repro_b" / "report.csv");
  return {!a.empty() && a == b, fmt("report.csv %s (%zu bytes)", a == b ? "byte-identical" : "differs", a.size())};
}

// --- 11. external dataset pathway -----------------------------------------------

Outcome real_data_pathway(const fs::path& work) {
  // a dataset as a user would export it: features, labels and an edge list, no split file
  analysis::SynthConfig sc;
  sc.n = 1500;
  sc.dim = 24;
  sc.bot_fraction = 0.3;
  sc.seed = 7;
  auto ds = analysis::generate_synthetic(sc);
  ds.name = "export";
  ds.splits = {};
  ds.splits_from_file = false;
  ds.edges = graph::build_random_kregular_graph(ds.n, 5, 3).undirected_edges();
  const auto dir = work / "export_dataset";
  fs::remove_all(dir);
  graph::save_dataset(ds, dir);
  const auto out = work / "export_protocol";
  if (run_cli({"protocol", "--dataset", dir.string(), "--seeds", "0,1,2", "--out", out.string()}) != 0)
    return {false, "protocol command failed"};
  const auto rows = read_csv_rows(out / "report.csv");
  const std::vector<std::string> header{"method", "dataset", "seed", "ACC", "F1", "REC", "PRE", "AUC"};
  const bool shape = rows.size() == 6 && rows[0] == header && rows[4][2] == "mean" && rows[5][2] == "std";
  return {shape && !fs::exists(dir / "splits.json"),
          fmt("report with %zu rows; mean ACC %s F1 %s AUC %s", rows.size(), shape ? rows[4][3].substr(0, 6).c_str() : "?",
              shape ? rows[4][4].substr(0, 6).c_str() : "?", shape ? rows[4][7].substr(0, 6).c_str() : "?")};
}

// --- 12. complexity -------------------------------------------------------------

Outcome complexity() {
  const auto rows = analysis::complexity_smoke({1000, 2000, 4000}, 10, 16, 128, 64, 5);
  const bool ok = rows.size() == 3 && rows[1].ratio < 3.0 && rows[2].ratio < 3.0;
  return {ok, fmt("%.3f s, %.3f s, %.3f s; ratios %.2f, %.2f", rows[0].seconds, rows[1].seconds, rows[2].seconds,
                  rows[1].ratio, rows[2].ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "sahg_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  int failed = 0;
  auto report = [&](int id, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << o.detail << std::endl;
  };

  report(1, gradient_suite);
  report(2, geometry_suite);
  report(3, appendix_oracle);
  report(4, knn_oracle);
  report(5, loss_exactness);
  report(6, init_contract);

  EndToEnd e2e;
  try {
    e2e = synthetic_protocol(work);
  } catch (const std::exception& ex) {
    e2e.quality = e2e.anisotropy = {false, std::string("exception: ") + ex.what()};
  }
  report(7, [&] { return e2e.quality; });
  report(8, [&] { return e2e.anisotropy; });

  const auto data = work / "synthetic";
  const bool have_data =
      run_cli({"synth", "--n", "2000", "--dim", "16", "--bot-frac", "0.5", "--clusters", "2", "--seed", "0", "--out",
           data.string()}) == 0;
  report(9, [&]() -> Outcome { return have_data ? ablation(data, work) : Outcome{false, "synth command failed"}; });
  report(10, [&]() -> Outcome { return have_data ? reproducibility(data, work) : Outcome{false, "synth command failed"}; });
  report(11, [&] { return real_data_pathway(work); });
  report(12, complexity);

  std::cout << (failed ? "FAILED " : "ALL PASSED ") << 12 - failed << "/12" << std::endl;
  return failed ? 1 : 0;
}
