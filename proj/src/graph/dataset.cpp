#include "sahg/graph/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>
#include <tuple>

#include "sahg/error.hpp"
#include "sahg/rng.hpp"

namespace sahg::graph {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t Dataset::num_bots() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

namespace {

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& file, std::string_view bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + file.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

json parse_json(const fs::path& file) {
  try {
    return json::parse(read_file(file));
  } catch (const json::exception& e) {
    throw FormatError(file.filename().string() + ": " + e.what());
  }
}

std::vector<std::size_t> index_list(const json& j, const char* key, const fs::path& file) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw FormatError(file.filename().string() + ": missing array \"" + key + "\"");
  }
  std::vector<std::size_t> out;
  for (const auto& v : j[key]) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw FormatError(file.filename().string() + ": non-integer index in \"" + key + "\"");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

}  // namespace

void validate(const Dataset& ds) {
  if (ds.features.size() != ds.n * ds.d) throw ParameterError("feature matrix size does not equal n*d");
  if (ds.labels.size() != ds.n) throw ParameterError("label count does not equal n");
  for (std::size_t i = 0; i < ds.n; ++i) {
    if (ds.labels[i] > 1) {
      throw ParameterError("label " + std::to_string(ds.labels[i]) + " at node " + std::to_string(i) +
                           " is not 0 or 1");
    }
  }
  if (ds.edges) {
    for (const auto& [a, b] : *ds.edges) {
      if (a >= ds.n || b >= ds.n) throw ParameterError("edge endpoint outside [0, n)");
      if (a == b) throw ParameterError("self-loop on node " + std::to_string(a));
    }
  }
  std::vector<std::uint8_t> seen(ds.n, 0);
  for (const auto* part : {&ds.splits.train, &ds.splits.val, &ds.splits.test}) {
    for (auto i : *part) {
      if (i >= ds.n) throw ParameterError("split index " + std::to_string(i) + " outside [0, n)");
      if (seen[i]++) throw ParameterError("node " + std::to_string(i) + " appears in more than one split");
    }
  }
}

Splits make_splits(std::span<const std::uint8_t> labels, std::array<double, 3> fractions, std::uint64_t seed) {
  const double total = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(total - 1.0) > 1e-9 || *std::min_element(fractions.begin(), fractions.end()) < 0.0) {
    throw ParameterError("split fractions must be non-negative and sum to 1");
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) throw ParameterError("label outside {0, 1} at node " + std::to_string(i));
    by_class[labels[i]].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < 3) {
      throw ParameterError("cannot stratify: class " + std::to_string(c) + " has " +
                           std::to_string(by_class[c].size()) + " members (need >= 3)");
    }
  }

  Rng rng(seed, "splits");
  // (relative rank, class, node)
  std::vector<std::tuple<double, int, std::size_t>> order;
  for (int c = 0; c < 2; ++c) {
    auto& members = by_class[c];
    std::shuffle(members.begin(), members.end(), rng.engine());
    for (std::size_t j = 0; j < members.size(); ++j) {
      order.emplace_back((double(j) + 0.5) / double(members.size()), c, members[j]);
    }
  }
  std::sort(order.begin(), order.end());

  const std::size_t n = labels.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fractions[0] * double(n)));
  const auto n_trval = std::min(n, static_cast<std::size_t>(std::llround((fractions[0] + fractions[1]) * double(n))));
  Splits s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t node = std::get<2>(order[i]);
    (i < n_train ? s.train : i < n_trval ? s.val : s.test).push_back(node);
  }
  for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
  if (s.train.empty()) s.warnings.emplace_back("train split is empty");
  if (s.val.empty()) s.warnings.emplace_back("validation split is empty");
  if (s.test.empty()) s.warnings.emplace_back("test split is empty");
  return s;
}

std::vector<Edge> read_edges_csv(const fs::path& file, std::size_t n) {
  std::ifstream in(file);
  if (!in) throw FormatError("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(file.filename().string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "src,dst") throw FormatError(file.filename().string() + ": expected header \"src,dst\"");
  std::vector<Edge> edges;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    long long a = -1, b = -1;
    try {
      std::size_t pa = 0, pb = 0;
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      a = std::stoll(line.substr(0, comma), &pa);
      b = std::stoll(line.substr(comma + 1), &pb);
      if (pa != comma || pb != line.size() - comma - 1) throw std::invalid_argument("trailing data");
    } catch (const std::exception&) {
      throw FormatError(file.filename().string() + " row " + std::to_string(row) + ": malformed \"" + line + "\"");
    }
    if (a < 0 || b < 0 || std::size_t(a) >= n || std::size_t(b) >= n) {
      throw FormatError(file.filename().string() + " row " + std::to_string(row) + ": endpoint outside [0," +
                        std::to_string(n) + ")");
    }
    if (a == b) {
      throw FormatError(file.filename().string() + " row " + std::to_string(row) + ": self-loop " +
                        std::to_string(a) + "," + std::to_string(b));
    }
    edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  return edges;
}

void write_edges_csv(const fs::path& file, std::span<const Edge> edges) {
  std::string out = "src,dst\n";
  for (const auto& [a, b] : edges) {
    out += std::to_string(a);
    out += ',';
    out += std::to_string(b);
    out += '\n';
  }
  write_file(file, out);
}

Dataset load_dataset(const fs::path& dir, std::uint64_t split_seed) {
  if (!fs::is_directory(dir)) throw FormatError("dataset directory not found: " + dir.string());
  Dataset ds;

  const auto meta_path = dir / "meta.json";
  const json meta = parse_json(meta_path);
  try {
    ds.n = meta.at("n").get<std::size_t>();
    ds.d = meta.at("d").get<std::size_t>();
    ds.name = meta.value("name", dir.filename().string());
    const auto dtype = meta.value("feature_dtype", std::string("f32"));
    if (dtype != "f32") throw FormatError("meta.json: unsupported feature_dtype \"" + dtype + "\"");
  } catch (const json::exception& e) {
    throw FormatError(std::string("meta.json: ") + e.what());
  }

  const std::string feat = read_file(dir / "features.bin");
  if (feat.size() != ds.n * ds.d * sizeof(float)) {
    throw FormatError("features.bin: " + std::to_string(feat.size()) + " bytes, meta.json n*d implies " +
                      std::to_string(ds.n * ds.d * sizeof(float)));
  }
  ds.features.resize(ds.n * ds.d);
  std::memcpy(ds.features.data(), feat.data(), feat.size());
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& f : ds.features) {
      f = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(f)));
    }
  }

  const std::string lab = read_file(dir / "labels.bin");
  if (lab.size() != ds.n) {
    throw FormatError("labels.bin: " + std::to_string(lab.size()) + " bytes, expected " + std::to_string(ds.n));
  }
  ds.labels.assign(lab.begin(), lab.end());
  for (std::size_t i = 0; i < ds.n; ++i) {
    if (ds.labels[i] > 1) {
      throw FormatError("labels.bin: value " + std::to_string(ds.labels[i]) + " at node " + std::to_string(i) +
                        " (labels must be 0 or 1)");
    }
  }

  if (fs::exists(dir / "edges.csv")) ds.edges = read_edges_csv(dir / "edges.csv", ds.n);

  if (fs::exists(dir / "splits.json")) {
    const auto sp = dir / "splits.json";
    const json j = parse_json(sp);
    ds.splits.train = index_list(j, "train", sp);
    ds.splits.val = index_list(j, "val", sp);
    ds.splits.test = index_list(j, "test", sp);
    ds.splits_from_file = true;
  } else {
    ds.splits = make_splits(ds.labels, {0.7, 0.1, 0.2}, split_seed);
  }

  try {
    validate(ds);
  } catch (const ParameterError& e) {
    throw FormatError(dir.string() + ": " + e.what());
  }
  return ds;
}

void save_dataset(const Dataset& ds, const fs::path& dir) {
  validate(ds);
  fs::create_directories(dir);
  // Key order fixed by nlohmann's sorted object map, so output is stable.
  json meta = {{"n", ds.n}, {"d", ds.d}, {"name", ds.name}, {"feature_dtype", "f32"}};
  write_file(dir / "meta.json", meta.dump(2) + "\n");

  std::string feat(ds.features.size() * sizeof(float), '\0');
  std::memcpy(feat.data(), ds.features.data(), feat.size());
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < ds.features.size(); ++i) {
      const auto v = __builtin_bswap32(std::bit_cast<std::uint32_t>(ds.features[i]));
      std::memcpy(feat.data() + i * 4, &v, 4);
    }
  }
  write_file(dir / "features.bin", feat);
  write_file(dir / "labels.bin", std::string(ds.labels.begin(), ds.labels.end()));

  if (ds.edges) write_edges_csv(dir / "edges.csv", *ds.edges);
  if (!ds.splits.train.empty() || !ds.splits.val.empty() || !ds.splits.test.empty()) {
    json sp = {{"train", ds.splits.train}, {"val", ds.splits.val}, {"test", ds.splits.test}};
    write_file(dir / "splits.json", sp.dump() + "\n");
  }
}

}  // namespace sahg::graph
