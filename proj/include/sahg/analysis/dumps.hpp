#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "sahg/graph/dataset.hpp"
#include "sahg/graph/sparse_graph.hpp"
#include "sahg/model/params.hpp"
#include "sahg/model/sahg_model.hpp"

namespace sahg::analysis {

enum class Channel { Node, Graph };

// Eval-mode forward over every node of the dataset.
model::ForwardOutput<float> forward_all(model::SahgParams<float>& params, const graph::Dataset& ds,
                                        const graph::SparseGraph* g);

/// Disk coordinates for plotting: the two coordinates of u with the largest
/// variance over the rows (lower index on ties), rescaled to unit length and
/// placed at radius tanh(r / 2).
std::vector<std::pair<double, double>> poincare_disk(const ad::Tensor<float>& u, const ad::Tensor<float>& r);

// node,label,r,gamma,H,A,disk_x,disk_y. Throws ParameterError when the
// variant has no such channel or no curvature field.
void dump_curvature_field(model::SahgParams<float>& params, const graph::Dataset& ds, const graph::SparseGraph* g,
                          Channel channel, const std::filesystem::path& out);

// Per node and channel: the feature vector fed to the head plus raw r, H, A
// and gamma. Quantities a variant does not compute are written as nan.
void dump_feature_distributions(model::SahgParams<float>& params, const graph::Dataset& ds,
                                const graph::SparseGraph* g, const std::filesystem::path& out);

// label followed by the fused head input.
void export_embeddings(model::SahgParams<float>& params, const graph::Dataset& ds, const graph::SparseGraph* g,
                       const std::filesystem::path& out);

struct ComplexityRow {
  std::size_t n = 0;
  std::size_t edges = 0;
  double seconds = 0.0;  // median over repetitions
  double ratio = 0.0;    // seconds / previous row's seconds (0 for the first)
};

/// Times one training-mode forward and backward pass over all nodes of a
/// synthetic dataset with its k-NN graph, for each n.
std::vector<ComplexityRow> complexity_smoke(const std::vector<std::size_t>& n_values, std::size_t k, std::size_t dim,
                                            std::size_t hidden_dim, std::size_t projection_dim,
                                            std::size_t repetitions = 3);
void write_complexity_csv(const std::filesystem::path& out, const std::vector<ComplexityRow>& rows);

}  // namespace sahg::analysis
