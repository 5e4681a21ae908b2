#include "sahg/graph/sparse_graph.hpp"

#include <algorithm>
#include <string>

#include "sahg/error.hpp"

namespace sahg::graph {


SparseGraph SparseGraph::empty(std::size_t n) {
  return from_edges(n, {});
}

SparseGraph SparseGraph::from_edges(std::size_t n, std::span<const Edge> edges) {
  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw ParameterError("edge (" + std::to_string(a) + "," + std::to_string(b) + ") outside [0," +
                           std::to_string(n) + ")");
    }
    if (a == b) throw ParameterError("self-loop on node " + std::to_string(a));
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  SparseGraph g;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    g.offsets_[i + 1] = g.offsets_[i] + static_cast<std::uint32_t>(row.size());
  }
  g.cols_.reserve(g.offsets_[n]);
  for (const auto& row : adj) g.cols_.insert(g.cols_.end(), row.begin(), row.end());
  return g;
}

SparseGraph SparseGraph::from_out_lists(const std::vector<std::vector<NodeId>>& out) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (NodeId j : out[i]) edges.emplace_back(static_cast<NodeId>(i), j);
  }
  return from_edges(out.size(), edges);
}

std::vector<Edge> SparseGraph::undirected_edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t i = 0; i < num_nodes(); ++i) {
    for (NodeId j : neighbors(i)) {
      if (i < j) out.emplace_back(static_cast<NodeId>(i), j);
    }
  }
  return out;
}

bool SparseGraph::check_invariants() const {
  const std::size_t n = num_nodes();
  for (std::size_t i = 0; i < n; ++i) {
    auto row = neighbors(i);
    for (std::size_t e = 0; e < row.size(); ++e) {
      if (row[e] >= n || row[e] == i) return false;
      if (e > 0 && row[e - 1] >= row[e]) return false;
      auto back = neighbors(row[e]);
      if (!std::binary_search(back.begin(), back.end(), static_cast<NodeId>(i))) return false;
    }
  }
  return true;
}

}  // namespace sahg::graph
