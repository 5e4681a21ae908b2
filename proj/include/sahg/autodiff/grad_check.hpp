#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sahg/autodiff/tape.hpp"
#include "sahg/autodiff/tensor.hpp"

namespace sahg::ad {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_leaf = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

using ScalarFn = std::function<Tensor<double>(Tape<double>&)>;

/// Compares the tape gradient of `f` against central differences
/// (f(x+h) - f(x-h)) / 2h for every element of every leaf.
///
/// Per-element error is |a - n| / max(|a|, |n|, floor). `f` must rebuild its
/// graph from the current leaf values on each call and return a scalar.
GradCheckReport grad_check(const ScalarFn& f, std::vector<Tensor<double>> leaves, double h = 1e-5,
                           double floor = 1e-3);

}  // namespace sahg::ad
