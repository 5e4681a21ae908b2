#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sahg/graph/sparse_graph.hpp"

namespace sahg::graph {

struct Splits {
  std::vector<std::size_t> train, val, test;
  std::vector<std::string> warnings;
};

/// Node features, binary labels (1 = bot), optional undirected edge list and
/// train/val/test partitions.
struct Dataset {
  std::string name;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<float> features;  // n x d, row-major
  std::vector<std::uint8_t> labels;
  std::optional<std::vector<Edge>> edges;
  Splits splits;
  bool splits_from_file = false;

  std::span<const float> row(std::size_t i) const { return std::span<const float>(features).subspan(i * d, d); }
  std::size_t num_bots() const;
};

// Throws ParameterError naming the first violated invariant.
void validate(const Dataset& ds);

/// Reads the on-disk directory format:
///   meta.json     {"n", "d", "name", "feature_dtype": "f32"}
///   features.bin  n*d little-endian f32, row-major
///   labels.bin    n bytes in {0, 1}
///   edges.csv     optional, header "src,dst", 0-based undirected pairs
///   splits.json   optional, {"train": [...], "val": [...], "test": [...]}
/// Without splits.json a stratified 0.7/0.1/0.2 split is drawn from
/// `split_seed`.
Dataset load_dataset(const std::filesystem::path& dir, std::uint64_t split_seed = 0);

// Writes every file of the format; edges.csv / splits.json only when present.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

void write_edges_csv(const std::filesystem::path& file, std::span<const Edge> edges);
std::vector<Edge> read_edges_csv(const std::filesystem::path& file, std::size_t n);

/// Stratified partition. Each class is shuffled with `seed`, classes are
/// interleaved by relative rank, and the merged order is cut at
/// round(f0 N) and round((f0 + f1) N). Throws ParameterError when a class
/// has fewer than 3 members or the fractions do not sum to 1.
Splits make_splits(std::span<const std::uint8_t> labels, std::array<double, 3> fractions, std::uint64_t seed);

}  // namespace sahg::graph
