#include "sahg/autodiff/tensor.hpp"

#include <algorithm>

#include "sahg/error.hpp"

namespace sahg::ad {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T fill, bool requires_grad) {
  if (shape.size() > 2) throw DimensionError("tensor rank > 2 unsupported: " + shape_str(shape));
  auto s = std::make_shared<TensorStorage<T>>();
  s->value.assign(shape_numel(shape), fill);
  s->shape = std::move(shape);
  s->requires_grad = requires_grad;
  return Tensor(std::move(s));
}

template <typename T>
Tensor<T> Tensor<T>::from(Shape shape, std::vector<T> values, bool requires_grad) {
  if (shape.size() > 2) throw DimensionError("tensor rank > 2 unsupported: " + shape_str(shape));
  if (shape_numel(shape) != values.size()) {
    throw DimensionError("shape " + shape_str(shape) + " holds " + std::to_string(shape_numel(shape)) +
                         " values, got " + std::to_string(values.size()));
  }
  auto s = std::make_shared<TensorStorage<T>>();
  s->shape = std::move(shape);
  s->value = std::move(values);
  s->requires_grad = requires_grad;
  return Tensor(std::move(s));
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T v, bool requires_grad) {
  return from({}, {v}, requires_grad);
}

template <typename T>
std::size_t Tensor<T>::rows() const {
  return s_->shape.empty() ? 1 : s_->shape[0];
}

template <typename T>
std::size_t Tensor<T>::cols() const {
  return s_->shape.size() < 2 ? 1 : s_->shape[1];
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) throw DimensionError("item() on tensor of shape " + shape_str(shape()));
  return s_->value[0];
}

template <typename T>
std::span<T> Tensor<T>::grad() const {
  if (s_->grad.size() != s_->value.size()) s_->grad.assign(s_->value.size(), T(0));
  return s_->grad;
}

template <typename T>
void Tensor<T>::zero_grad() const {
  std::fill(s_->grad.begin(), s_->grad.end(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  auto t = from(shape(), values(), requires_grad());
  if (has_grad()) t.s_->grad = s_->grad;
  return t;
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace sahg::ad
