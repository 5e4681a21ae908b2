#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv_util.hpp"
#include "sahg/cli/commands.hpp"
#include "sahg/graph/dataset.hpp"

using namespace sahg;
using testutil::read_csv;
using testutil::scratch_dir;
using testutil::slurp;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Small synthetic dataset written once per test binary run.
const fs::path& synth_dir() {
  static const fs::path dir = [] {
    auto root = scratch_dir("cli_data");
    auto r = run({"synth", "--n", "160", "--dim", "6", "--seed", "3", "--out", (root / "ds").string()});
    REQUIRE(r.code == 0);
    return root / "ds";
  }();
  return dir;
}

// Flags that keep training runs short.
std::vector<std::string> quick(std::vector<std::string> args) {
  for (std::string f : {"--epochs", "2", "--hidden-dim", "16", "--proj-dim", "8", "--warp-dim", "8", "--batch-size",
                        "64"})
    args.push_back(f);
  return args;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
  auto root = scratch_dir("cli_usage");
  CHECK(run({"build-graph", "--out", (root / "e.csv").string()}).code == 2);
  CHECK(run({"build-graph", "--dataset", synth_dir().string(), "--random-kregular", "--n", "10", "--out",
             (root / "e.csv").string()})
            .code == 2);
  CHECK(run({"build-graph", "--random-kregular", "--n", "5", "--k", "10", "--out", (root / "e.csv").string()}).code ==
        2);
  CHECK(run({"train", "--dataset", (root / "missing").string(), "--out", (root / "t").string()}).code == 2);
  CHECK(run({"train", "--dataset", synth_dir().string(), "--variant", "bogus", "--out", (root / "t").string()})
            .code == 2);
  CHECK(run({"synth", "--bot-frac", "1.5", "--out", (root / "s").string()}).code == 2);

  std::ofstream(root / "bad.json") << R"({"learning_rate": 0.001, "not_a_key": 1})";
  CHECK(run({"train", "--dataset", synth_dir().string(), "--config", (root / "bad.json").string(), "--out",
             (root / "t").string()})
            .code == 2);
  CHECK(run({"analyze", "--checkpoint", (root / "none.sahg").string(), "--dataset", synth_dir().string(), "--what",
             "curvature", "--out", (root / "a").string()})
            .code == 2);
}

TEST_CASE("build-graph") {
  auto root = scratch_dir("cli_graph");
  for (auto name : {"a.csv", "b.csv"}) {
    auto r = run({"build-graph", "--random-kregular", "--n", "100", "--k", "10", "--seed", "0", "--out",
                  (root / name).string()});
    CHECK(r.code == 0);
  }
  CHECK(slurp(root / "a.csv") == slurp(root / "b.csv"));
  CHECK(slurp(root / "a.csv").rfind("src,dst\n", 0) == 0);

  CHECK(run({"build-graph", "--dataset", synth_dir().string(), "--k", "10", "--out", (root / "knn.csv").string()})
            .code == 0);
  auto edges = graph::read_edges_csv(root / "knn.csv", 160);
  CHECK(edges.size() >= 160 * 10 / 2);
  for (auto [a, b] : edges) CHECK(a < b);
  CHECK(run({"build-graph", "--dataset", synth_dir().string(), "--k", "500", "--out", (root / "x.csv").string()})
            .code == 2);
}

TEST_CASE("train") {
  auto root = scratch_dir("cli_train");
  auto r = run(quick({"train", "--dataset", synth_dir().string(), "--lr", "0.0003", "--out", (root / "t").string()}));
  REQUIRE(r.code == 0);
  CHECK(fs::exists(root / "t" / "checkpoint.sahg"));
  CHECK(read_csv(root / "t" / "history.csv").rows.size() == 2);
  auto m = read_json(root / "t" / "manifest.json");
  CHECK(m["command"] == "train");
  CHECK(m["config"]["learning_rate"].get<double>() == 0.0003);
  CHECK(m["config"]["encoder_hidden_dim"].get<int>() == 16);
  CHECK(m.contains("finished_at"));
  CHECK(m.contains("version"));

  SUBCASE("flags override the config file, which overrides presets") {
    std::ofstream(root / "c.json") << R"({"learning_rate": 0.01, "focal_alpha": 0.6})";
    auto r2 = run(quick({"train", "--dataset", synth_dir().string(), "--preset", "mgtab", "--config",
                         (root / "c.json").string(), "--alpha", "0.7", "--out", (root / "p").string()}));
    REQUIRE(r2.code == 0);
    auto m2 = read_json(root / "p" / "manifest.json");
    CHECK(m2["config"]["learning_rate"].get<double>() == 0.01);
    CHECK(m2["config"]["focal_alpha"].get<double>() == 0.7);
    CHECK(m2["config"]["entropy_weight"].get<double>() == 0.05);
  }
  SUBCASE("no-graph variant") {
    CHECK(run(quick({"train", "--dataset", synth_dir().string(), "--variant", "no-graph", "--out",
                     (root / "ng").string()}))
              .code == 0);
  }
  SUBCASE("divergence exits with the numeric code") {
    auto r3 = run(quick({"train", "--dataset", synth_dir().string(), "--lr", "1e30", "--out", (root / "d").string()}));
    // clipping bounds each step, so a huge rate may still stay finite; only the code mapping is checked here
    CHECK((r3.code == 0 || r3.code == 3));
  }
  SUBCASE("analyze dumps") {
    const auto ckpt = (root / "t" / "checkpoint.sahg").string();
    for (std::string what : {"curvature", "features", "embeddings"}) {
      CHECK(run({"analyze", "--checkpoint", ckpt, "--dataset", synth_dir().string(), "--what", what, "--out",
                 (root / "an").string()})
                .code == 0);
    }
    CHECK(read_csv(root / "an" / "curvature_node.csv").rows.size() == 160);
    CHECK(fs::exists(root / "an" / "curvature_graph.csv"));
    CHECK(read_csv(root / "an" / "embeddings.csv").header.size() == 11);
    CHECK(read_csv(root / "an" / "features.csv").rows.size() == 160);
    CHECK(run({"analyze", "--checkpoint", ckpt, "--dataset", synth_dir().string(), "--what", "nothing", "--out",
               (root / "an").string()})
              .code == 2);
  }
}

TEST_CASE("protocol") {
  auto root = scratch_dir("cli_protocol");
  auto args = quick({"protocol", "--dataset", synth_dir().string(), "--seeds", "0,1,2"});
  for (auto name : {"a", "b"}) {
    auto a = args;
    a.push_back("--out");
    a.push_back((root / name).string());
    REQUIRE(run(a).code == 0);
  }
  CHECK(slurp(root / "a" / "report.csv") == slurp(root / "b" / "report.csv"));
  auto c = read_csv(root / "a" / "report.csv");
  REQUIRE(c.rows.size() == 5);
  double f1 = 0;
  for (std::size_t i = 0; i < 3; ++i) f1 += c.num(i, "F1") / 3.0;
  CHECK(std::abs(c.num(3, "F1") - f1) < 1e-12);
  CHECK(fs::exists(root / "a" / "seed_2" / "checkpoint.sahg"));

  auto single = quick({"protocol", "--dataset", synth_dir().string(), "--seeds", "0", "--out", (root / "s").string()});
  REQUIRE(run(single).code == 0);
  auto s = read_csv(root / "s" / "report.csv");
  REQUIRE(s.rows.size() == 3);
  CHECK(s.num(2, "ACC") == 0.0);

  SUBCASE("output root from the environment") {
    setenv("SAHG_OUT_DIR", (root / "env").string().c_str(), 1);
    auto e = quick({"protocol", "--dataset", synth_dir().string(), "--seeds", "0"});
    CHECK(run(e).code == 0);
    unsetenv("SAHG_OUT_DIR");
    CHECK(fs::exists(root / "env" / "protocol" / "report.csv"));
  }
}

TEST_CASE("ablate") {
  auto root = scratch_dir("cli_ablate");
  auto r = run(quick({"ablate", "--dataset", synth_dir().string(), "--seeds", "0", "--out", (root / "a").string()}));
  REQUIRE(r.code == 0);
  auto c = read_csv(root / "a" / "ablation.csv");
  CHECK(c.rows.size() == 5);
  CHECK(c.header.size() == 13);
  for (auto v : {"full", "no-graph", "no-sector", "no-hyperbolic", "isotropic"})
    CHECK(fs::exists(root / "a" / v / "report.csv"));
}

TEST_CASE("synth") {
  auto root = scratch_dir("cli_synth");
  for (auto name : {"a", "b"})
    REQUIRE(run({"synth", "--n", "2000", "--bot-frac", "0.5", "--seed", "0", "--out", (root / name).string()}).code ==
            0);
  for (auto f : {"features.bin", "labels.bin", "meta.json", "splits.json"})
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  CHECK(graph::load_dataset(root / "a").num_bots() == 1000);
}
