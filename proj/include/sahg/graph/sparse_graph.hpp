#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "sahg/autodiff/kernels.hpp"

namespace sahg::graph {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Undirected, unweighted adjacency in compressed-row form.
///
/// Every constructor yields a symmetric graph with no self-loops and
/// ascending column indices in each row. Immutable once built.
class SparseGraph {
 public:
  SparseGraph() = default;

  static SparseGraph empty(std::size_t n);
  // Union of the given pairs in both directions; duplicates collapse.
  // Throws ParameterError on self-loops or endpoints >= n.
  static SparseGraph from_edges(std::size_t n, std::span<const Edge> edges);
  // Union-symmetrization of per-node directed out-lists.
  static SparseGraph from_out_lists(const std::vector<std::vector<NodeId>>& out);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return cols_.size() / 2; }
  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::span<const NodeId> neighbors(std::size_t i) const {
    return std::span<const NodeId>(cols_).subspan(offsets_[i], degree(i));
  }
  kernels::CsrView view() const { return {offsets_, cols_}; }

  // Each undirected edge once, as (lo, hi), in row-major order.
  std::vector<Edge> undirected_edges() const;

  // Symmetry, no self-loops, sorted unique rows.
  bool check_invariants() const;

  friend bool operator==(const SparseGraph&, const SparseGraph&) = default;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<NodeId> cols_;
};

}  // namespace sahg::graph
