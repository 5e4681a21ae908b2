#include "sahg/autodiff/tape.hpp"

#include "sahg/error.hpp"

namespace sahg::ad {

template <typename T>
bool Tape<T>::wants(std::initializer_list<const Tensor<T>*> inputs) const {
  if (!enabled_) return false;
  for (const auto* t : inputs) {
    if (t && t->defined() && t->requires_grad()) return true;
  }
  return false;
}

template <typename T>
void Tape<T>::record(const Tensor<T>& output, BackwardFn fn) {
  nodes_.push_back(Node{output, std::move(fn)});
}

template <typename T>
void Tape<T>::backward(const Tensor<T>& loss) {
  if (loss.numel() != 1) {
    throw DimensionError("backward needs a scalar loss, got " + shape_str(loss.shape()));
  }
  if (!loss.requires_grad()) return;  // constant w.r.t. every leaf

  for (auto& node : nodes_) {
    if (node.output.has_grad()) node.output.zero_grad();
  }
  Tensor<T> seed = loss;
  seed.grad()[0] += T(1);
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (!it->output.has_grad()) continue;  // no gradient reached this node
    it->fn();
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace sahg::ad
