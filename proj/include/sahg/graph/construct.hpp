#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sahg/graph/sparse_graph.hpp"

namespace sahg::graph {

inline constexpr std::size_t kDefaultSimilarityBatch = 1024;

enum class Exec { Serial, Parallel };

/// For every row of X (n x d), the k most cosine-similar other rows, most
/// similar first; ties go to the lower index. Rows are l2-normalized first
/// and zero rows have similarity 0 to everything. Similarities are computed
/// for `batch_rows` query rows at a time, so memory stays at batch_rows * n.
/// Throws ParameterError unless 1 <= k < n.
std::vector<std::vector<NodeId>> knn_out_neighbors(std::span<const float> X, std::size_t n, std::size_t d,
                                                   std::size_t k,
                                                   std::size_t batch_rows = kDefaultSimilarityBatch,
                                                   Exec exec = Exec::Parallel);

// Union-symmetrized cosine k-NN graph.
SparseGraph build_knn_graph(std::span<const float> X, std::size_t n, std::size_t d, std::size_t k,
                            std::size_t batch_rows = kDefaultSimilarityBatch, Exec exec = Exec::Parallel);

/// k distinct uniformly drawn neighbors per node (never itself), sorted.
std::vector<std::vector<NodeId>> random_out_neighbors(std::size_t n, std::size_t k, std::uint64_t seed);

SparseGraph build_random_kregular_graph(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace sahg::graph
