#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sahg::ad {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

template <typename T>
struct TensorStorage {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until first touched by backward
  bool requires_grad = false;
};

/// Dense row-major array of rank 0, 1 or 2 with an optional gradient slot.
///
/// Copies are handles onto the same storage, which is what lets the tape
/// route gradients back to parameters. Use clone() for an independent copy.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T fill, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<T> values, bool requires_grad = false);
  static Tensor scalar(T v, bool requires_grad = false);

  bool defined() const { return static_cast<bool>(s_); }
  const Shape& shape() const { return s_->shape; }
  std::size_t rank() const { return s_->shape.size(); }
  std::size_t numel() const { return s_->value.size(); }
  // Leading dimension (1 for scalars), and trailing width (1 for rank < 2).
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<T> data() { return s_->value; }
  std::span<const T> data() const { return s_->value; }
  std::vector<T>& values() { return s_->value; }
  const std::vector<T>& values() const { return s_->value; }
  T item() const;
  T& operator[](std::size_t i) { return s_->value[i]; }
  const T& operator[](std::size_t i) const { return s_->value[i]; }
  T& at(std::size_t r, std::size_t c) { return s_->value[r * cols() + c]; }
  const T& at(std::size_t r, std::size_t c) const { return s_->value[r * cols() + c]; }

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool on) { s_->requires_grad = on; }

  bool has_grad() const { return !s_->grad.empty(); }
  // Gradient buffer, allocated (zeroed) on first access. Constness is
  // shallow: a const handle still refers to mutable storage.
  std::span<T> grad() const;
  void zero_grad() const;
  void drop_grad() const { s_->grad.clear(); }

  Tensor clone() const;
  bool same_storage(const Tensor& other) const { return s_ == other.s_; }
  TensorStorage<T>* storage() const { return s_.get(); }

 private:
  explicit Tensor(std::shared_ptr<TensorStorage<T>> s) : s_(std::move(s)) {}
  std::shared_ptr<TensorStorage<T>> s_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace sahg::ad
