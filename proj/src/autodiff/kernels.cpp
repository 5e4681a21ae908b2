#include "sahg/autodiff/kernels.hpp"

#include <omp.h>

namespace sahg::kernels {

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  T acc[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t l = 0; l < 8; ++l) acc[l] += a[i + l] * b[i + l];
  }
  T tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail;
}

template float dot<float>(const float*, const float*, std::size_t);
template double dot<double>(const double*, const double*, std::size_t);

int max_threads() { return omp_get_max_threads(); }

namespace {

template <typename T>
inline void axpy(T a, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
inline void linear_forward_row(const T* x, std::size_t in, const T* w, std::size_t out, const T* bias, T* y) {
  for (std::size_t o = 0; o < out; ++o) {
    T v = dot(x, w + o * in, in);
    y[o] = bias ? v + bias[o] : v;
  }
}

template <typename T>
inline void linear_backward_input_row(const T* dy, std::size_t out, const T* w, std::size_t in, T* dx) {
  for (std::size_t o = 0; o < out; ++o) {
    if (dy[o] != T(0)) axpy(dy[o], w + o * in, dx, in);
  }
}

template <typename T>
inline void linear_backward_weight_row(const T* dy, std::size_t rows, std::size_t out, std::size_t o,
                                       const T* x, std::size_t in, T* dw_row, T* db) {
  T bsum = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const T g = dy[r * out + o];
    bsum += g;
    if (g != T(0)) axpy(g, x + r * in, dw_row, in);
  }
  if (db) db[o] += bsum;
}

template <typename T>
inline void mean_aggregate_row(const CsrView& g, std::size_t i, const T* x, std::size_t width, T* y) {
  const auto begin = g.offsets[i], end = g.offsets[i + 1];
  for (std::size_t c = 0; c < width; ++c) y[c] = T(0);
  if (begin == end) return;
  for (auto e = begin; e < end; ++e) axpy(T(1), x + std::size_t(g.cols[e]) * width, y, width);
  const T inv = T(1) / T(end - begin);
  for (std::size_t c = 0; c < width; ++c) y[c] *= inv;
}

template <typename T>
inline void mean_aggregate_backward_row(const CsrView& g, std::size_t j, const T* dy, std::size_t width, T* dx) {
  for (auto e = g.offsets[j]; e < g.offsets[j + 1]; ++e) {
    const std::size_t i = g.cols[e];
    const T inv = T(1) / T(g.offsets[i + 1] - g.offsets[i]);
    axpy(inv, dy + i * width, dx, width);
  }
}

template <typename T>
const T* ptr_or_null(std::span<const T> s) {
  return s.empty() ? nullptr : s.data();
}
template <typename T>
T* ptr_or_null(std::span<T> s) {
  return s.empty() ? nullptr : s.data();
}

// Below this many multiply-adds the thread team costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;

}  // namespace

namespace serial {

template <typename T>
void linear_forward(std::span<const T> x, std::size_t rows, std::size_t in, std::span<const T> w,
                    std::size_t out, std::span<const T> bias, std::span<T> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    linear_forward_row(x.data() + r * in, in, w.data(), out, ptr_or_null(bias), y.data() + r * out);
  }
}

template <typename T>
void linear_backward_input(std::span<const T> dy, std::size_t rows, std::size_t out, std::span<const T> w,
                           std::size_t in, std::span<T> dx) {
  for (std::size_t r = 0; r < rows; ++r) {
    linear_backward_input_row(dy.data() + r * out, out, w.data(), in, dx.data() + r * in);
  }
}

template <typename T>
void linear_backward_weight(std::span<const T> dy, std::size_t rows, std::size_t out, std::span<const T> x,
                            std::size_t in, std::span<T> dw, std::span<T> db) {
  for (std::size_t o = 0; o < out; ++o) {
    linear_backward_weight_row(dy.data(), rows, out, o, x.data(), in, dw.data() + o * in, ptr_or_null(db));
  }
}

template <typename T>
void mean_aggregate(const CsrView& g, std::span<const T> x, std::size_t width, std::span<T> y) {
  for (std::size_t i = 0; i < g.n(); ++i) mean_aggregate_row(g, i, x.data(), width, y.data() + i * width);
}

template <typename T>
void mean_aggregate_backward(const CsrView& g, std::span<const T> dy, std::size_t width, std::span<T> dx) {
  for (std::size_t j = 0; j < g.n(); ++j) {
    mean_aggregate_backward_row(g, j, dy.data(), width, dx.data() + j * width);
  }
}

}  // namespace serial

namespace omp {

template <typename T>
void linear_forward(std::span<const T> x, std::size_t rows, std::size_t in, std::span<const T> w,
                    std::size_t out, std::span<const T> bias, std::span<T> y) {
  const auto n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) if (rows * in * out > kParallelWork)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    linear_forward_row(x.data() + r * in, in, w.data(), out, ptr_or_null(bias), y.data() + r * out);
  }
}

template <typename T>
void linear_backward_input(std::span<const T> dy, std::size_t rows, std::size_t out, std::span<const T> w,
                           std::size_t in, std::span<T> dx) {
  const auto n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) if (rows * in * out > kParallelWork)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    linear_backward_input_row(dy.data() + r * out, out, w.data(), in, dx.data() + r * in);
  }
}

template <typename T>
void linear_backward_weight(std::span<const T> dy, std::size_t rows, std::size_t out, std::span<const T> x,
                            std::size_t in, std::span<T> dw, std::span<T> db) {
  const auto n = static_cast<std::ptrdiff_t>(out);
#pragma omp parallel for schedule(static) if (rows * in * out > kParallelWork)
  for (std::ptrdiff_t o = 0; o < n; ++o) {
    linear_backward_weight_row(dy.data(), rows, out, o, x.data(), in, dw.data() + o * in, ptr_or_null(db));
  }
}

template <typename T>
void mean_aggregate(const CsrView& g, std::span<const T> x, std::size_t width, std::span<T> y) {
  const auto n = static_cast<std::ptrdiff_t>(g.n());
#pragma omp parallel for schedule(static) if (g.cols.size() * width > kParallelWork)
  for (std::ptrdiff_t i = 0; i < n; ++i) mean_aggregate_row(g, i, x.data(), width, y.data() + i * width);
}

template <typename T>
void mean_aggregate_backward(const CsrView& g, std::span<const T> dy, std::size_t width, std::span<T> dx) {
  const auto n = static_cast<std::ptrdiff_t>(g.n());
#pragma omp parallel for schedule(static) if (g.cols.size() * width > kParallelWork)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    mean_aggregate_backward_row(g, j, dy.data(), width, dx.data() + j * width);
  }
}

}  // namespace omp

#define SAHG_INSTANTIATE(NS, T)                                                                              \
  template void NS::linear_forward<T>(std::span<const T>, std::size_t, std::size_t, std::span<const T>,     \
                                      std::size_t, std::span<const T>, std::span<T>);                       \
  template void NS::linear_backward_input<T>(std::span<const T>, std::size_t, std::size_t,                  \
                                             std::span<const T>, std::size_t, std::span<T>);                \
  template void NS::linear_backward_weight<T>(std::span<const T>, std::size_t, std::size_t,                 \
                                              std::span<const T>, std::size_t, std::span<T>, std::span<T>); \
  template void NS::mean_aggregate<T>(const CsrView&, std::span<const T>, std::size_t, std::span<T>);       \
  template void NS::mean_aggregate_backward<T>(const CsrView&, std::span<const T>, std::size_t, std::span<T>);

SAHG_INSTANTIATE(serial, float)
SAHG_INSTANTIATE(serial, double)
SAHG_INSTANTIATE(omp, float)
SAHG_INSTANTIATE(omp, double)

#undef SAHG_INSTANTIATE

}  // namespace sahg::kernels
