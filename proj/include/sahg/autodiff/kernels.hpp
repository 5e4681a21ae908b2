#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

// Dense and sparse inner loops behind the differentiable ops.
//
// Every kernel exists twice: `serial` is the reference, `omp` splits the
// outermost row loop across OpenMP threads. Both call the same per-row
// routine, and no reduction ever crosses a row boundary, so the two agree
// bitwise for any thread count.

namespace sahg::kernels {

// Compressed-row adjacency. The mean-aggregate backward assumes symmetry.
struct CsrView {
  std::span<const std::uint32_t> offsets;  // size n + 1
  std::span<const std::uint32_t> cols;
  std::size_t n() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

// Fixed-order dot product (eight interleaved partial sums).
template <typename T>
T dot(const T* a, const T* b, std::size_t n);

#define SAHG_KERNEL_DECLS                                                                              \
  /* y[r, o] = sum_i x[r, i] * w[o, i] + bias[o]; bias may be empty. */                                \
  template <typename T>                                                                                \
  void linear_forward(std::span<const T> x, std::size_t rows, std::size_t in, std::span<const T> w,    \
                      std::size_t out, std::span<const T> bias, std::span<T> y);                       \
  /* dx[r, i] += sum_o dy[r, o] * w[o, i] */                                                           \
  template <typename T>                                                                                \
  void linear_backward_input(std::span<const T> dy, std::size_t rows, std::size_t out,                 \
                             std::span<const T> w, std::size_t in, std::span<T> dx);                   \
  /* dw[o, i] += sum_r dy[r, o] * x[r, i];  db[o] += sum_r dy[r, o]; db may be empty. */               \
  template <typename T>                                                                                \
  void linear_backward_weight(std::span<const T> dy, std::size_t rows, std::size_t out,                \
                              std::span<const T> x, std::size_t in, std::span<T> dw, std::span<T> db); \
  /* y[i] = mean_{j in N(i)} x[j]; zero row when N(i) is empty. */                                     \
  template <typename T>                                                                                \
  void mean_aggregate(const CsrView& g, std::span<const T> x, std::size_t width, std::span<T> y);      \
  /* dx[j] += sum_{i in N(j)} dy[i] / deg(i); valid for symmetric g. */                                \
  template <typename T>                                                                                \
  void mean_aggregate_backward(const CsrView& g, std::span<const T> dy, std::size_t width,             \
                               std::span<T> dx);

namespace serial {
SAHG_KERNEL_DECLS
}  // namespace serial

namespace omp {
SAHG_KERNEL_DECLS
}  // namespace omp

#undef SAHG_KERNEL_DECLS

int max_threads();

}  // namespace sahg::kernels
