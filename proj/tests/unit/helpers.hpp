#pragma once

#include <cmath>
#include <vector>

#include "sahg/autodiff/ops.hpp"
#include "sahg/rng.hpp"

namespace testutil {

using sahg::Rng;
using sahg::ad::Shape;
using sahg::ad::Tape;
using sahg::ad::Tensor;

inline Tensor<double> randn(Shape s, Rng& rng, bool grad = true, double scale = 1.0) {
  auto t = Tensor<double>::zeros(std::move(s), grad);
  for (auto& v : t.values()) v = scale * rng.normal();
  return t;
}

inline Tensor<double> randu(Shape s, Rng& rng, double lo, double hi, bool grad = true) {
  auto t = Tensor<double>::zeros(std::move(s), grad);
  for (auto& v : t.values()) v = rng.uniform(lo, hi);
  return t;
}

// sum(y * w) for a fixed random w, so every output element gets a distinct
// upstream gradient.
inline Tensor<double> probe(Tape<double>& t, const Tensor<double>& y, std::uint64_t seed = 99) {
  Rng rng(seed);
  auto w = Tensor<double>::zeros(y.shape());
  for (auto& v : w.values()) v = rng.normal();
  return sahg::ad::sum(t, sahg::ad::mul(t, y, w));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testutil
