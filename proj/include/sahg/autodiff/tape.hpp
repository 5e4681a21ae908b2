#pragma once

#include <functional>
#include <vector>

#include "sahg/autodiff/tensor.hpp"

namespace sahg::ad {

/// Define-by-run record of differentiable operations.
///
/// Ops push a backward closure together with the tensor they produced.
/// backward() walks the records in reverse recording order exactly once
/// each. A tape is owned by a single thread for the duration of a pass.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  bool enabled() const { return enabled_; }
  void set_enabled(bool on) { enabled_ = on; }

  // True when an op over these inputs must be recorded.
  bool wants(std::initializer_list<const Tensor<T>*> inputs) const;

  void record(const Tensor<T>& output, BackwardFn fn);

  /// Seeds d(loss)=1 and replays every record in reverse. Intermediate
  /// gradients are reset first, so calling it twice accumulates exactly
  /// twice the leaf gradients.
  void backward(const Tensor<T>& loss);

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Tensor<T> output;
    BackwardFn fn;
  };
  std::vector<Node> nodes_;
  bool enabled_ = true;
};

/// Disables recording for its lifetime.
template <typename T>
class NoGradGuard {
 public:
  explicit NoGradGuard(Tape<T>& tape) : tape_(tape), prev_(tape.enabled()) { tape.set_enabled(false); }
  ~NoGradGuard() { tape_.set_enabled(prev_); }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  Tape<T>& tape_;
  bool prev_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace sahg::ad
