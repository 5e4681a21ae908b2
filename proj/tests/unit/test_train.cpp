#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "sahg/autodiff/grad_check.hpp"
#include "sahg/analysis/synth.hpp"
#include "sahg/error.hpp"
#include "sahg/model/checkpoint.hpp"
#include "sahg/model/sahg_model.hpp"
#include "sahg/train/losses.hpp"
#include "sahg/train/metrics.hpp"
#include "sahg/train/optim.hpp"
#include "sahg/train/trainer.hpp"

using namespace sahg;
using namespace sahg::train;
using ad::Tape;
using ad::Tensor;

namespace {

double focal_value(std::vector<double> p, std::vector<std::uint8_t> y, double alpha, double gamma_f) {
  Tape<double> t;
  const std::size_t n = p.size();
  return focal_loss(t, Tensor<double>::from({n}, std::move(p)), y, alpha, gamma_f).item();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sahg_test_train_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.hidden_dim = 16;
  c.projection_dim = 8;
  c.warp_hidden_dim = 8;
  c.batch_size = 64;
  c.max_epochs = 4;
  return c;
}

graph::Dataset tiny_dataset() {
  analysis::SynthConfig s;
  s.n = 200;
  s.dim = 6;
  return analysis::generate_synthetic(s);
}

}  // namespace

TEST_CASE("focal loss") {
  CHECK(focal_value({0.5}, {1}, 0.25, 2.0) == doctest::Approx(0.25 * 0.25 * std::numbers::ln2).epsilon(1e-12));
  CHECK(focal_value({0.5}, {1}, 0.25, 2.0) == doctest::Approx(0.043322).epsilon(1e-5));
  CHECK(focal_value({1.0 - 1e-12}, {1}, 0.25, 2.0) < 1e-12);
  // humans weigh 1 - alpha
  CHECK(focal_value({0.5}, {0}, 0.25, 2.0) == doctest::Approx(0.75 * 0.25 * std::numbers::ln2).epsilon(1e-12));

  SUBCASE("unit weights and zero focusing reduce to cross-entropy") {
    std::vector<double> p{0.9, 0.2, 0.6, 0.35, 0.01};
    std::vector<std::uint8_t> y{1, 0, 0, 1, 1};
    double ce = 0;
    for (std::size_t i = 0; i < p.size(); ++i) ce -= y[i] ? std::log(p[i]) : std::log(1 - p[i]);
    ce /= double(p.size());
    CHECK(std::abs(focal_value(p, y, 1.0, 0.0) - ce) < 1e-12);
  }
  SUBCASE("monotone in the true-class probability") {
    for (double alpha : {0.25, 0.5, 0.85}) {
      for (double gf : {0.0, 0.5, 2.0}) {
        for (std::uint8_t y : {0, 1}) {
          double prev = INFINITY;
          for (int i = 1; i < 100; ++i) {
            const double py = i / 100.0;
            const double v = focal_value({y ? py : 1 - py}, {y}, alpha, gf);
            CHECK(v < prev);
            prev = v;
          }
        }
      }
    }
  }
  SUBCASE("saturated probabilities stay finite") {
    CHECK(std::isfinite(focal_value({0.0, 1.0}, {1, 0}, 0.25, 2.0)));
  }
  SUBCASE("empty batch") { CHECK_THROWS_AS(focal_value({}, {}, 0.25, 2.0), DimensionError); }
  SUBCASE("gradient") {
    Rng rng(1);
    auto p = testutil::randu({6}, rng, 0.05, 0.95);
    std::vector<std::uint8_t> y{1, 0, 1, 0, 0, 1};
    auto rep = ad::grad_check([&](Tape<double>& t) { return focal_loss(t, p, y, 0.25, 2.0); }, {p});
    CHECK(rep.max_rel_error < 1e-6);
  }
}

TEST_CASE("lambda schedule") {
  CHECK(lambda_schedule(0, 0.03, 20) == 0.03);
  CHECK(lambda_schedule(10, 0.03, 20) == doctest::Approx(0.015).epsilon(1e-15));
  CHECK(lambda_schedule(20, 0.03, 20) == 0.0);
  CHECK(lambda_schedule(200, 0.03, 20) == 0.0);
  CHECK(lambda_schedule(0, 0.03, 0) == 0.0);
  CHECK(lambda_schedule(5, 0.03, 0) == 0.0);
}

TEST_CASE("total loss") {
  auto probs = Tensor<double>::from({3}, {0.7, 0.4, 0.2});
  auto H = Tensor<double>::from({3}, {std::numbers::ln2, 0.3, 0.1});
  Tape<double> t;
  const double focal_no_bots = focal_value({0.7, 0.4, 0.2}, {0, 0, 0}, 0.25, 2.0);
  auto none = total_loss(t, probs, std::vector<std::uint8_t>{0, 0, 0}, H, 0, 0.25, 2.0, 0.03, 20, 2);
  CHECK(none.total.item() == focal_no_bots);
  CHECK(none.entropy_reg == 0.0);

  const double focal_mixed = focal_value({0.7, 0.4, 0.2}, {1, 0, 0}, 0.25, 2.0);
  auto late = total_loss(t, probs, std::vector<std::uint8_t>{1, 0, 0}, H, 20, 0.25, 2.0, 0.03, 20, 2);
  CHECK(late.total.item() == focal_mixed);

  auto early = total_loss(t, probs, std::vector<std::uint8_t>{1, 0, 0}, H, 0, 0.25, 2.0, 0.03, 20, 2);
  CHECK(early.lambda == 0.03);
  CHECK(early.entropy_reg == doctest::Approx(0.03).epsilon(1e-5));
  CHECK(early.total.item() == doctest::Approx(focal_mixed + early.entropy_reg).epsilon(1e-14));

  auto undefined = total_loss(t, probs, std::vector<std::uint8_t>{1, 0, 0}, Tensor<double>{}, 0, 0.25, 2.0, 0.03,
                              20, 2);
  CHECK(undefined.total.item() == focal_mixed);
}

TEST_CASE("adamw") {
  SUBCASE("first step") {
    auto th = Tensor<double>::from({1}, {1.0}, true);
    AdamW<double> opt({th}, {.lr = 1e-3});
    th.grad()[0] = 1.0;
    opt.step();
    CHECK(th[0] == doctest::Approx(0.999).epsilon(1e-9));
    CHECK(opt.steps() == 1);
  }
  SUBCASE("zero gradient without decay") {
    auto th = Tensor<double>::from({2}, {1.5, -2.0}, true);
    AdamW<double> opt({th}, {.lr = 1e-3});
    opt.step();
    CHECK(th[0] == 1.5);
    CHECK(th[1] == -2.0);
  }
  SUBCASE("pure decay") {
    auto th = Tensor<double>::from({1}, {2.0}, true);
    AdamW<double> opt({th}, {.lr = 1e-3, .weight_decay = 0.1});
    th.grad()[0] = 0.0;
    opt.step();
    CHECK(th[0] == 2.0 * (1.0 - 1e-4));
  }
  SUBCASE("matches hand-coded moments for 100 steps") {
    auto th = Tensor<double>::from({1}, {3.0}, true);
    AdamWOptions o{.lr = 1e-2};
    AdamW<double> opt({th}, o);
    double ref = 3.0, m = 0, v = 0;
    for (int k = 1; k <= 100; ++k) {
      // f = (theta - 1)^2 / 2 + sin(theta)
      const double g = (ref - 1) + std::cos(ref);
      th.zero_grad();
      th.grad()[0] = (th[0] - 1) + std::cos(th[0]);
      opt.step();
      m = o.beta1 * m + (1 - o.beta1) * g;
      v = o.beta2 * v + (1 - o.beta2) * g * g;
      const double mh = m / (1 - std::pow(o.beta1, k)), vh = v / (1 - std::pow(o.beta2, k));
      ref -= o.lr * mh / (std::sqrt(vh) + o.eps);
      CHECK(std::abs(th[0] - ref) < 1e-12);
    }
  }
  SUBCASE("float parameters") {
    auto th = Tensor<float>::from({1}, {1.0f}, true);
    AdamW<float> opt({th}, {.lr = 1e-3});
    th.grad()[0] = -2.0f;
    opt.step();
    CHECK(th[0] == doctest::Approx(1.001).epsilon(1e-6));
  }
}

TEST_CASE("gradient clipping") {
  auto a = Tensor<double>::zeros({2}, true), b = Tensor<double>::zeros({1}, true);
  a.grad()[0] = 0.3;
  a.grad()[1] = 0.4;
  CHECK(clip_grad_norm<double>({a, b}, 1.0) == 1.0);
  CHECK(a.grad()[0] == 0.3);

  a.grad()[0] = 1.2;
  a.grad()[1] = 1.6;
  CHECK(clip_grad_norm<double>({a, b}, 1.0) == doctest::Approx(0.5));
  CHECK(grad_global_norm<double>({a, b}) == doctest::Approx(1.0).epsilon(1e-15));

  a.grad()[0] = 3;
  a.grad()[1] = 4;
  clip_grad_norm<double>({a}, 1.0);
  CHECK(a.grad()[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(a.grad()[1] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("metrics") {
  auto r = evaluate(std::vector<double>{0.9, 0.1}, std::vector<std::uint8_t>{1, 0});
  CHECK(r.acc == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK(r.auc == 1.0);

  CHECK(roc_auc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<std::uint8_t>{1, 0, 1}) == 0.5);

  r = evaluate(std::vector<double>{0.9, 0.8, 0.3, 0.1}, std::vector<std::uint8_t>{1, 0, 1, 0});
  CHECK(r.confusion.tp == 1);
  CHECK(r.confusion.fp == 1);
  CHECK(r.confusion.fn == 1);
  CHECK(r.confusion.tn == 1);
  CHECK(r.acc == 0.5);
  CHECK(r.auc == 0.75);
  CHECK(r.pre == 0.5);
  CHECK(r.rec == 0.5);

  bool undefined = false;
  CHECK(roc_auc(std::vector<double>{0.2, 0.9}, std::vector<std::uint8_t>{1, 1}, &undefined) == 0.5);
  CHECK(undefined);
  CHECK(evaluate(std::vector<double>{0.2}, std::vector<std::uint8_t>{0}).auc_undefined);

  // threshold is inclusive
  CHECK(evaluate(std::vector<double>{0.5}, std::vector<std::uint8_t>{1}).confusion.tp == 1);
  // no positive predictions: precision and F1 are zero rather than nan
  r = evaluate(std::vector<double>{0.1, 0.2}, std::vector<std::uint8_t>{1, 0});
  CHECK(r.pre == 0.0);
  CHECK(r.f1 == 0.0);

  SUBCASE("rank formula equals pairwise brute force") {
    Rng rng(3);
    for (int inst = 0; inst < 500; ++inst) {
      const std::size_t m = 2 + rng.below(19);
      std::vector<double> p(m);
      std::vector<std::uint8_t> y(m);
      for (std::size_t i = 0; i < m; ++i) {
        p[i] = double(rng.below(6)) / 5.0;  // coarse grid forces ties
        y[i] = rng.bernoulli(0.5);
      }
      double wins = 0, pairs = 0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          if (y[i] == 1 && y[j] == 0) {
            pairs += 1;
            wins += p[i] > p[j] ? 1.0 : p[i] == p[j] ? 0.5 : 0.0;
          }
      bool undef = false;
      const double auc = roc_auc(p, y, &undef);
      if (pairs == 0) {
        CHECK(undef);
      } else {
        CHECK(auc == doctest::Approx(wins / pairs).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("summaries") {
  MetricsReport a, b, c;
  a.acc = 0.8, b.acc = 0.9, c.acc = 1.0;
  a.auc = b.auc = c.auc = 0.7;
  auto s = summarize({a, b, c});
  CHECK(s.mean.acc == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(s.std.acc == doctest::Approx(std::sqrt(2.0 / 300.0)).epsilon(1e-12));
  CHECK(s.std.auc == 0.0);
  CHECK(summarize({a}).std.acc == 0.0);
}

TEST_CASE("early stopping") {
  EarlyStopping es(15);
  std::size_t stopped = 0;
  for (std::size_t e = 0; e < 100; ++e) {
    es.update(e, e <= 3 ? 0.5 + 0.1 * double(e) : 0.7);
    if (es.should_stop()) {
      stopped = e;
      break;
    }
  }
  CHECK(stopped == 18);
  CHECK(es.best_epoch() == 3);
  CHECK(es.best_score() == doctest::Approx(0.8));

  EarlyStopping ties(2);
  CHECK(ties.update(0, 0.9));
  CHECK_FALSE(ties.update(1, 0.9));
  CHECK_FALSE(ties.update(2, 0.9));
  CHECK(ties.should_stop());
  CHECK(ties.best_epoch() == 0);
}

TEST_CASE("training") {
  auto ds = tiny_dataset();
  auto cfg = tiny_config();
  auto g = resolve_graph(ds, cfg);
  REQUIRE(g.has_value());

  SUBCASE("same seed gives an identical history") {
    auto a = train_loop<float>(ds, &*g, cfg), b = train_loop<float>(ds, &*g, cfg);
    auto dir = scratch("hist");
    write_history_csv(dir / "a.csv", a.history);
    write_history_csv(dir / "b.csv", b.history);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv").rfind("epoch,train_loss,focal,entropy_reg,lambda,val_auc,val_f1,lr\n", 0) == 0);
    CHECK(model::serialize_checkpoint(a.params) == model::serialize_checkpoint(b.params));
    CHECK(a.history.size() == 4);
    CHECK(a.history[0].lambda == cfg.entropy_weight);
  }
  SUBCASE("result holds the best epoch's parameters") {
    cfg.max_epochs = 6;
    auto res = train_loop<double>(ds, &*g, cfg);
    double best = -1;
    std::size_t best_e = 0;
    for (const auto& h : res.history)
      if (h.val_auc > best) best = h.val_auc, best_e = h.epoch;
    CHECK(res.best_epoch == best_e);
    CHECK(res.best_val_auc == best);
    auto X = model::features_tensor<double>(ds.features, ds.n, ds.d);
    auto probs = model::predict(X, &*g, res.params, ds.splits.val);
    std::vector<std::uint8_t> yv;
    for (auto i : ds.splits.val) yv.push_back(ds.labels[i]);
    CHECK(roc_auc(probs, yv) == best);
    // bitwise through a checkpoint round trip
    auto back = model::deserialize_checkpoint<float>(model::serialize_checkpoint(res.params));
    auto resf = model::cast_params<float>(res.params);
    CHECK(model::serialize_checkpoint(back) == model::serialize_checkpoint(resf));
  }
  SUBCASE("divergence aborts with context") {
    cfg.learning_rate = 1e30;
    cfg.grad_clip_norm = 1e30;
    bool thrown = false;
    try {
      train_loop<float>(ds, &*g, cfg);
    } catch (const NumericError& e) {
      thrown = true;
      CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
    CHECK(thrown);
  }
  SUBCASE("no-graph variant needs no graph") {
    cfg.variant = Variant::NoGraph;
    CHECK_FALSE(resolve_graph(ds, cfg).has_value());
    CHECK_NOTHROW(train_loop<float>(ds, nullptr, cfg));
  }
}

TEST_CASE("protocol") {
  auto ds = tiny_dataset();
  auto cfg = tiny_config();
  cfg.max_epochs = 2;
  auto g = resolve_graph(ds, cfg);
  auto dir = scratch("protocol");
  auto res = run_protocol(ds, &*g, cfg, {0, 1}, dir);
  CHECK(res.method == "sahg-full");
  CHECK(res.runs.size() == 2);
  CHECK(std::filesystem::exists(dir / "seed_0" / "checkpoint.sahg"));
  CHECK(std::filesystem::exists(dir / "seed_1" / "history.csv"));
  write_report_csv(dir / "report.csv", res);
  std::ifstream in(dir / "report.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "method,dataset,seed,ACC,F1,REC,PRE,AUC");
  CHECK(lines[3].find(",mean,") != std::string::npos);
  CHECK(lines[4].find(",std,") != std::string::npos);

  auto one = run_protocol(ds, &*g, cfg, {0});
  CHECK(one.summary.std.acc == 0.0);
  CHECK(one.runs[0].test.acc == res.runs[0].test.acc);
  CHECK_THROWS_AS(run_protocol(ds, &*g, cfg, {}), ParameterError);
}

TEST_CASE("shipped config files match the presets") {
  for (auto name : {"default", "fox8-23", "botsim-24", "mgtab"}) {
    INFO(name);
    const auto file = std::filesystem::path(SAHG_SOURCE_DIR) / "configs" / (std::string(name) + ".json");
    CHECK(to_json(load_config_file(file.string())) == to_json(preset(name)));
  }
  const auto d = preset("default");
  CHECK(d.learning_rate == 1e-3);
  CHECK(d.entropy_weight == 0.03);
  CHECK(d.temperature_init == 5.0);
  CHECK(preset("mgtab").entropy_weight == 0.05);
  CHECK_THROWS_AS(preset("nope"), ParameterError);
}
