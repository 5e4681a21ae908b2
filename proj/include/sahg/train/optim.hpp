#pragma once

#include <cstddef>
#include <vector>

#include "sahg/autodiff/tensor.hpp"

namespace sahg::train {

using ad::Tensor;

struct AdamWOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Adam with decoupled weight decay. The decay theta -= lr * wd * theta is
/// applied before the bias-corrected moment step. Moments are kept in double
/// whatever the parameter precision.
template <typename T>
class AdamW {
 public:
  AdamW(std::vector<Tensor<T>> params, AdamWOptions opts);

  // Consumes each parameter's current gradient; parameters that never
  // received one are treated as having a zero gradient.
  void step();
  std::size_t steps() const { return t_; }
  const AdamWOptions& options() const { return opts_; }
  void set_lr(double lr) { opts_.lr = lr; }

 private:
  std::vector<Tensor<T>> params_;
  AdamWOptions opts_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

// Scales all gradients by min(1, max_norm / global_l2_norm) and returns the
// applied scale.
template <typename T>
double clip_grad_norm(const std::vector<Tensor<T>>& params, double max_norm);

template <typename T>
double grad_global_norm(const std::vector<Tensor<T>>& params);

}  // namespace sahg::train
