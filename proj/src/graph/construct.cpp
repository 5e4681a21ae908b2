#include "sahg/graph/construct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sahg/autodiff/kernels.hpp"
#include "sahg/error.hpp"
#include "sahg/rng.hpp"

namespace sahg::graph {

namespace {

void check_k(std::size_t n, std::size_t k) {
  if (k < 1 || k >= n) {
    throw ParameterError("k must satisfy 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
  }
}

// Selects the top-k of one similarity row into `out`.
void select_top_k(std::span<const double> sims, std::size_t self, std::size_t k, std::vector<NodeId>& scratch,
                  std::vector<NodeId>& out) {
  scratch.clear();
  for (std::size_t j = 0; j < sims.size(); ++j) {
    if (j != self) scratch.push_back(static_cast<NodeId>(j));
  }
  auto better = [&](NodeId a, NodeId b) { return sims[a] > sims[b] || (sims[a] == sims[b] && a < b); };
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end(), better);
  out.assign(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k));
}

}  // namespace

std::vector<std::vector<NodeId>> knn_out_neighbors(std::span<const float> X, std::size_t n, std::size_t d,
                                                   std::size_t k, std::size_t batch_rows, Exec exec) {
  check_k(n, k);
  if (X.size() != n * d) throw DimensionError("knn: feature buffer does not hold n*d values");
  if (batch_rows == 0) throw ParameterError("knn: batch size must be positive");

  std::vector<double> unit(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    double ss = 0.0;
    for (std::size_t c = 0; c < d; ++c) ss += double(X[i * d + c]) * double(X[i * d + c]);
    const double norm = std::sqrt(ss);
    for (std::size_t c = 0; c < d; ++c) unit[i * d + c] = norm > 0.0 ? double(X[i * d + c]) / norm : 0.0;
  }

  std::vector<std::vector<NodeId>> out(n);
  std::vector<double> block(std::min(batch_rows, n) * n);
  for (std::size_t start = 0; start < n; start += batch_rows) {
    const std::size_t rows = std::min(batch_rows, n - start);
    const auto count = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel if (exec == Exec::Parallel)
    {
      std::vector<NodeId> scratch;
      scratch.reserve(n);
#pragma omp for schedule(static)
      for (std::ptrdiff_t r = 0; r < count; ++r) {
        const std::size_t i = start + static_cast<std::size_t>(r);
        double* sims = block.data() + static_cast<std::size_t>(r) * n;
        for (std::size_t j = 0; j < n; ++j) sims[j] = kernels::dot(&unit[i * d], &unit[j * d], d);
        select_top_k(std::span<const double>(sims, n), i, k, scratch, out[i]);
      }
    }
  }
  return out;
}

SparseGraph build_knn_graph(std::span<const float> X, std::size_t n, std::size_t d, std::size_t k,
                            std::size_t batch_rows, Exec exec) {
  return SparseGraph::from_out_lists(knn_out_neighbors(X, n, d, k, batch_rows, exec));
}

std::vector<std::vector<NodeId>> random_out_neighbors(std::size_t n, std::size_t k, std::uint64_t seed) {
  check_k(n, k);
  Rng rng(seed, "random-kregular");
  std::vector<std::vector<NodeId>> out(n);
  std::vector<NodeId> picked;
  for (std::size_t i = 0; i < n; ++i) {
    // Floyd's sampling of k distinct values from [0, n-1), then skip i.
    picked.clear();
    for (std::size_t j = n - 1 - k; j < n - 1; ++j) {
      auto t = static_cast<NodeId>(rng.below(j + 1));
      if (std::find(picked.begin(), picked.end(), t) != picked.end()) t = static_cast<NodeId>(j);
      picked.push_back(t);
    }
    for (auto& v : picked) {
      if (v >= i) ++v;
    }
    std::sort(picked.begin(), picked.end());
    out[i] = picked;
  }
  return out;
}

SparseGraph build_random_kregular_graph(std::size_t n, std::size_t k, std::uint64_t seed) {
  return SparseGraph::from_out_lists(random_out_neighbors(n, k, seed));
}

}  // namespace sahg::graph
