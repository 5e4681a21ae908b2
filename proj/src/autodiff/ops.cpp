#include "sahg/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "sahg/error.hpp"

namespace sahg::ad {

double gelu_value(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double softplus_value(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid_value(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

template <typename T>
Tensor<T> make_output(Shape shape, bool tracked) {
  return Tensor<T>::zeros(std::move(shape), tracked);
}

template <typename T>
void require_rank2(const Tensor<T>& x, const char* op) {
  if (x.rank() != 2) {
    throw DimensionError(std::string(op) + " expects a matrix, got " + shape_str(x.shape()));
  }
}

template <typename T>
T gelu_grad(T x) {
  const double xd = x;
  const double cdf = 0.5 * (1.0 + std::erf(xd / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * xd * xd) / std::sqrt(2.0 * std::numbers::pi);
  return static_cast<T>(cdf + xd * pdf);
}

template <typename T>
T unary_value(Unary kind, T x) {
  switch (kind) {
    case Unary::Gelu: return static_cast<T>(gelu_value(x));
    case Unary::Softplus: return static_cast<T>(softplus_value(x));
    case Unary::Sigmoid: return static_cast<T>(sigmoid_value(x));
    case Unary::Exp: return std::exp(x);
    case Unary::Log:
      if (!(x > T(0))) throw DomainError("log of non-positive value " + std::to_string(x));
      return std::log(x);
    case Unary::Square: return x * x;
    case Unary::Sqrt:
      if (!(x > T(0))) throw DomainError("sqrt of non-positive value " + std::to_string(x));
      return std::sqrt(x);
    case Unary::Sinh: return std::sinh(x);
  }
  return x;
}

// d y / d x given input x and output y.
template <typename T>
T unary_grad(Unary kind, T x, T y) {
  switch (kind) {
    case Unary::Gelu: return gelu_grad(x);
    case Unary::Softplus: return static_cast<T>(sigmoid_value(x));
    case Unary::Sigmoid: return y * (T(1) - y);
    case Unary::Exp: return y;
    case Unary::Log: return T(1) / x;
    case Unary::Square: return T(2) * x;
    case Unary::Sqrt: return T(0.5) / y;
    case Unary::Sinh: return std::cosh(x);
  }
  return T(0);
}

// View of a rank <= 2 operand as (rows, cols) with broadcast strides.
struct Bcast {
  std::size_t rows, cols;
};

template <typename T>
Bcast as2d(const Tensor<T>& t) {
  if (t.rank() == 0) return {1, 1};
  if (t.rank() == 1) return {1, t.shape()[0]};
  return {t.shape()[0], t.shape()[1]};
}

std::size_t bdim(std::size_t a, std::size_t b, const Shape& sa, const Shape& sb) {
  if (a == b || b == 1) return a;
  if (a == 1) return b;
  throw DimensionError("cannot broadcast " + shape_str(sa) + " with " + shape_str(sb));
}

}  // namespace

template <typename T>
Tensor<T> affine(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& W, const Tensor<T>& b) {
  require_rank2(x, "affine");
  require_rank2(W, "affine");
  const std::size_t B = x.rows(), m = x.cols(), n = W.rows();
  if (W.cols() != m) {
    throw DimensionError("affine: input " + shape_str(x.shape()) + " does not match weight " +
                         shape_str(W.shape()));
  }
  if (b.defined() && b.numel() != n) {
    throw DimensionError("affine: bias " + shape_str(b.shape()) + " does not match weight " +
                         shape_str(W.shape()));
  }
  const bool tracked = tape.wants({&x, &W, &b});
  auto y = make_output<T>({B, n}, tracked);
  kernels::omp::linear_forward<T>(x.data(), B, m, W.data(), n, b.defined() ? b.data() : std::span<const T>{},
                                  y.data());
  if (tracked) {
    tape.record(y, [x, W, b, y, B, m, n]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      if (x.requires_grad()) kernels::omp::linear_backward_input<T>(dy, B, n, W.data(), m, x.grad());
      const bool wb = b.defined() && b.requires_grad();
      if (W.requires_grad()) {
        kernels::omp::linear_backward_weight<T>(dy, B, n, x.data(), m, W.grad(), wb ? b.grad() : std::span<T>{});
      } else if (wb) {
        auto db = b.grad();
        for (std::size_t r = 0; r < B; ++r)
          for (std::size_t o = 0; o < n; ++o) db[o] += dy[r * n + o];
      }
    });
  }
  return y;
}

template <typename T>
Tensor<T> unary(Tape<T>& tape, Unary kind, const Tensor<T>& x) {
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(x.shape(), tracked);
  const auto xs = x.data();
  auto ys = y.data();
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = unary_value(kind, xs[i]);
  if (tracked) {
    tape.record(y, [kind, x, y]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      const auto xs = x.data();
      const auto ys = std::as_const(y).data();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * unary_grad(kind, xs[i], ys[i]);
    });
  }
  return y;
}

template <typename T>
Tensor<T> binary(Tape<T>& tape, Binary kind, const Tensor<T>& a, const Tensor<T>& b) {
  const Bcast A = as2d(a), Bv = as2d(b);
  const std::size_t R = bdim(A.rows, Bv.rows, a.shape(), b.shape());
  const std::size_t C = bdim(A.cols, Bv.cols, a.shape(), b.shape());
  Shape out_shape;
  if (a.rank() <= 1 && b.rank() <= 1) {
    if (std::max(a.rank(), b.rank()) == 1) out_shape = {C};
  } else {
    out_shape = {R, C};
  }
  const std::size_t ars = A.rows == 1 ? 0 : A.cols, acs = A.cols == 1 ? 0 : 1;
  const std::size_t brs = Bv.rows == 1 ? 0 : Bv.cols, bcs = Bv.cols == 1 ? 0 : 1;

  const bool tracked = tape.wants({&a, &b});
  auto y = make_output<T>(out_shape, tracked);
  const auto as = a.data(), bs = b.data();
  auto ys = y.data();
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      const T av = as[r * ars + c * acs], bv = bs[r * brs + c * bcs];
      T v = T(0);
      switch (kind) {
        case Binary::Add: v = av + bv; break;
        case Binary::Sub: v = av - bv; break;
        case Binary::Mul: v = av * bv; break;
        case Binary::Div:
          if (bv == T(0)) throw DomainError("division by zero");
          v = av / bv;
          break;
      }
      ys[r * C + c] = v;
    }
  }
  if (tracked) {
    tape.record(y, [=]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      const auto as = a.data(), bs = b.data();
      std::span<T> da = a.requires_grad() ? a.grad() : std::span<T>{};
      std::span<T> db = b.requires_grad() ? b.grad() : std::span<T>{};
      for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t c = 0; c < C; ++c) {
          const std::size_t ia = r * ars + c * acs, ib = r * brs + c * bcs;
          const T g = dy[r * C + c];
          switch (kind) {
            case Binary::Add:
              if (!da.empty()) da[ia] += g;
              if (!db.empty()) db[ib] += g;
              break;
            case Binary::Sub:
              if (!da.empty()) da[ia] += g;
              if (!db.empty()) db[ib] -= g;
              break;
            case Binary::Mul:
              if (!da.empty()) da[ia] += g * bs[ib];
              if (!db.empty()) db[ib] += g * as[ia];
              break;
            case Binary::Div:
              if (!da.empty()) da[ia] += g / bs[ib];
              if (!db.empty()) db[ib] -= g * as[ia] / (bs[ib] * bs[ib]);
              break;
          }
        }
      }
    });
  }
  return y;
}

template <typename T>
Tensor<T> scale(Tape<T>& tape, const Tensor<T>& x, T s) {
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(x.shape(), tracked);
  for (std::size_t i = 0; i < x.numel(); ++i) y[i] = x[i] * s;
  if (tracked) {
    tape.record(y, [x, y, s]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * s;
    });
  }
  return y;
}

template <typename T>
Tensor<T> shift(Tape<T>& tape, const Tensor<T>& x, T s) {
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(x.shape(), tracked);
  for (std::size_t i = 0; i < x.numel(); ++i) y[i] = x[i] + s;
  if (tracked) {
    tape.record(y, [x, y]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
    });
  }
  return y;
}

template <typename T>
Tensor<T> pow(Tape<T>& tape, const Tensor<T>& x, T e) {
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(x.shape(), tracked);
  for (std::size_t i = 0; i < x.numel(); ++i) {
    if (!(x[i] > T(0))) throw DomainError("pow of non-positive base " + std::to_string(x[i]));
    y[i] = e == T(0) ? T(1) : std::pow(x[i], e);
  }
  if (tracked) {
    tape.record(y, [x, y, e]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      if (e == T(0)) return;
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * e * std::pow(x[i], e - T(1));
    });
  }
  return y;
}

template <typename T>
Tensor<T> clamp(Tape<T>& tape, const Tensor<T>& x, T lo, T hi) {
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(x.shape(), tracked);
  for (std::size_t i = 0; i < x.numel(); ++i) y[i] = std::clamp(x[i], lo, hi);
  if (tracked) {
    tape.record(y, [x, y, lo, hi]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t i = 0; i < dx.size(); ++i) {
        if (x[i] >= lo && x[i] <= hi) dx[i] += dy[i];
      }
    });
  }
  return y;
}

template <typename T>
Tensor<T> layer_norm(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, T eps) {
  require_rank2(x, "layer_norm");
  const std::size_t B = x.rows(), n = x.cols();
  if (n == 0) throw DimensionError("layer_norm over zero-width rows");
  if (gain.numel() != n || bias.numel() != n) {
    throw DimensionError("layer_norm: input " + shape_str(x.shape()) + " vs gain " + shape_str(gain.shape()) +
                         " / bias " + shape_str(bias.shape()));
  }
  const bool tracked = tape.wants({&x, &gain, &bias});
  auto y = make_output<T>(x.shape(), tracked);
  std::vector<T> xhat(B * n), inv_std(B);
  for (std::size_t r = 0; r < B; ++r) {
    const T* row = x.data().data() + r * n;
    T mu = 0;
    for (std::size_t c = 0; c < n; ++c) mu += row[c];
    mu /= T(n);
    T var = 0;
    for (std::size_t c = 0; c < n; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= T(n);
    inv_std[r] = T(1) / std::sqrt(var + eps);
    for (std::size_t c = 0; c < n; ++c) {
      xhat[r * n + c] = (row[c] - mu) * inv_std[r];
      y[r * n + c] = gain[c] * xhat[r * n + c] + bias[c];
    }
  }
  if (tracked) {
    tape.record(y, [x, gain, bias, y, xhat = std::move(xhat), inv_std = std::move(inv_std), B, n]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      if (gain.requires_grad()) {
        auto dg = gain.grad();
        for (std::size_t r = 0; r < B; ++r)
          for (std::size_t c = 0; c < n; ++c) dg[c] += dy[r * n + c] * xhat[r * n + c];
      }
      if (bias.requires_grad()) {
        auto db = bias.grad();
        for (std::size_t r = 0; r < B; ++r)
          for (std::size_t c = 0; c < n; ++c) db[c] += dy[r * n + c];
      }
      if (x.requires_grad()) {
        auto dx = x.grad();
        for (std::size_t r = 0; r < B; ++r) {
          T m1 = 0, m2 = 0;
          for (std::size_t c = 0; c < n; ++c) {
            const T g = dy[r * n + c] * gain[c];
            m1 += g;
            m2 += g * xhat[r * n + c];
          }
          m1 /= T(n);
          m2 /= T(n);
          for (std::size_t c = 0; c < n; ++c) {
            const T g = dy[r * n + c] * gain[c];
            dx[r * n + c] += inv_std[r] * (g - m1 - xhat[r * n + c] * m2);
          }
        }
      }
    });
  }
  return y;
}

template <typename T>
Tensor<T> softmax_rows(Tape<T>& tape, const Tensor<T>& logits) {
  require_rank2(logits, "softmax_rows");
  const std::size_t B = logits.rows(), K = logits.cols();
  if (K == 0) throw DimensionError("softmax_rows over zero columns");
  const bool tracked = tape.wants({&logits});
  auto y = make_output<T>(logits.shape(), tracked);
  for (std::size_t r = 0; r < B; ++r) {
    const T* l = logits.data().data() + r * K;
    const T mx = *std::max_element(l, l + K);
    T s = 0;
    for (std::size_t k = 0; k < K; ++k) {
      y[r * K + k] = std::exp(l[k] - mx);
      s += y[r * K + k];
    }
    for (std::size_t k = 0; k < K; ++k) y[r * K + k] /= s;
  }
  if (tracked) {
    tape.record(y, [logits, y, B, K]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = logits.grad();
      for (std::size_t r = 0; r < B; ++r) {
        T dot = 0;
        for (std::size_t k = 0; k < K; ++k) dot += dy[r * K + k] * y[r * K + k];
        for (std::size_t k = 0; k < K; ++k) dx[r * K + k] += y[r * K + k] * (dy[r * K + k] - dot);
      }
    });
  }
  return y;
}

template <typename T>
Tensor<T> entropy_from_logits(Tape<T>& tape, const Tensor<T>& logits) {
  require_rank2(logits, "entropy_from_logits");
  const std::size_t B = logits.rows(), K = logits.cols();
  if (K == 0) throw DimensionError("entropy over zero columns");
  const bool tracked = tape.wants({&logits});
  auto h = make_output<T>({B}, tracked);
  std::vector<T> q(B * K), logq(B * K);
  for (std::size_t r = 0; r < B; ++r) {
    const T* l = logits.data().data() + r * K;
    const T mx = *std::max_element(l, l + K);
    T s = 0;
    for (std::size_t k = 0; k < K; ++k) s += std::exp(l[k] - mx);
    const T lse = mx + std::log(s);
    T H = 0;
    for (std::size_t k = 0; k < K; ++k) {
      logq[r * K + k] = l[k] - lse;
      q[r * K + k] = std::exp(logq[r * K + k]);
      H -= q[r * K + k] * logq[r * K + k];
    }
    h[r] = H;
  }
  if (tracked) {
    tape.record(h, [logits, h, q = std::move(q), logq = std::move(logq), B, K]() mutable {
      std::span<const T> dh = std::as_const(h).grad();
      auto dx = logits.grad();
      for (std::size_t r = 0; r < B; ++r) {
        for (std::size_t k = 0; k < K; ++k) {
          dx[r * K + k] -= dh[r] * q[r * K + k] * (logq[r * K + k] + h[r]);
        }
      }
    });
  }
  return h;
}

template <typename T>
Tensor<T> sparse_mean_aggregate(Tape<T>& tape, const Tensor<T>& x, const kernels::CsrView& graph) {
  require_rank2(x, "sparse_mean_aggregate");
  if (graph.n() != x.rows()) {
    throw DimensionError("sparse_mean_aggregate: graph has " + std::to_string(graph.n()) +
                         " nodes, features " + shape_str(x.shape()));
  }
  const std::size_t d = x.cols();
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(x.shape(), tracked);
  kernels::omp::mean_aggregate<T>(graph, x.data(), d, y.data());
  if (tracked) {
    tape.record(y, [x, y, graph, d]() mutable {
      kernels::omp::mean_aggregate_backward<T>(graph, std::as_const(y).grad(), d, x.grad());
    });
  }
  return y;
}

template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& x) {
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>({}, tracked);
  T s = 0;
  for (auto v : x.data()) s += v;
  y[0] = s;
  if (tracked) {
    tape.record(y, [x, y]() mutable {
      const T g = std::as_const(y).grad()[0];
      for (auto& d : x.grad()) d += g;
    });
  }
  return y;
}

template <typename T>
Tensor<T> mean(Tape<T>& tape, const Tensor<T>& x) {
  if (x.numel() == 0) throw DimensionError("mean of an empty tensor");
  return scale(tape, sum(tape, x), T(1) / T(x.numel()));
}

template <typename T>
Tensor<T> sum_rows(Tape<T>& tape, const Tensor<T>& x) {
  require_rank2(x, "sum_rows");
  const std::size_t B = x.rows(), K = x.cols();
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>({B}, tracked);
  for (std::size_t r = 0; r < B; ++r) {
    T s = 0;
    for (std::size_t k = 0; k < K; ++k) s += x[r * K + k];
    y[r] = s;
  }
  if (tracked) {
    tape.record(y, [x, y, B, K]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t r = 0; r < B; ++r)
        for (std::size_t k = 0; k < K; ++k) dx[r * K + k] += dy[r];
    });
  }
  return y;
}

template <typename T>
MaxRowsResult<T> max_rows(Tape<T>& tape, const Tensor<T>& x) {
  require_rank2(x, "max_rows");
  const std::size_t B = x.rows(), K = x.cols();
  if (K == 0) throw DimensionError("max_rows over zero columns");
  const bool tracked = tape.wants({&x});
  MaxRowsResult<T> out{make_output<T>({B}, tracked), std::vector<std::size_t>(B, 0)};
  for (std::size_t r = 0; r < B; ++r) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k) {
      if (x[r * K + k] > x[r * K + best]) best = k;
    }
    out.index[r] = best;
    out.value[r] = x[r * K + best];
  }
  if (tracked) {
    tape.record(out.value, [x, y = out.value, idx = out.index, K]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t r = 0; r < idx.size(); ++r) dx[r * K + idx[r]] += dy[r];
    });
  }
  return out;
}

template <typename T>
Tensor<T> norm2_rows(Tape<T>& tape, const Tensor<T>& x) {
  require_rank2(x, "norm2_rows");
  const std::size_t B = x.rows(), n = x.cols();
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>({B}, tracked);
  for (std::size_t r = 0; r < B; ++r) {
    const T* row = x.data().data() + r * n;
    y[r] = std::sqrt(kernels::dot(row, row, n));
  }
  if (tracked) {
    tape.record(y, [x, y, B, n]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t r = 0; r < B; ++r) {
        if (y[r] == T(0)) continue;  // subgradient 0 at the origin
        const T s = dy[r] / y[r];
        for (std::size_t c = 0; c < n; ++c) dx[r * n + c] += s * x[r * n + c];
      }
    });
  }
  return y;
}

template <typename T>
Tensor<T> normalize_rows(Tape<T>& tape, const Tensor<T>& x, T eps, NormalizeMode mode) {
  require_rank2(x, "normalize_rows");
  const std::size_t B = x.rows(), n = x.cols();
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(x.shape(), tracked);
  std::vector<T> norms(B);
  for (std::size_t r = 0; r < B; ++r) {
    const T* row = x.data().data() + r * n;
    norms[r] = std::sqrt(kernels::dot(row, row, n));
    const T denom = mode == NormalizeMode::MaxEps ? std::max(norms[r], eps) : norms[r] + eps;
    for (std::size_t c = 0; c < n; ++c) y[r * n + c] = row[c] / denom;
  }
  if (tracked) {
    tape.record(y, [x, y, norms = std::move(norms), eps, mode, B, n]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t r = 0; r < B; ++r) {
        const T nr = norms[r];
        const T* xr = x.data().data() + r * n;
        const T* gr = dy.data() + r * n;
        T* dr = dx.data() + r * n;
        const T xg = kernels::dot(xr, gr, n);
        if (mode == NormalizeMode::MaxEps) {
          if (nr > eps) {
            // d(x/|x|) = (g - x (x.g)/|x|^2) / |x|
            for (std::size_t c = 0; c < n; ++c) dr[c] += (gr[c] - xr[c] * xg / (nr * nr)) / nr;
          } else {
            for (std::size_t c = 0; c < n; ++c) dr[c] += gr[c] / eps;
          }
        } else {
          const T denom = nr + eps;
          for (std::size_t c = 0; c < n; ++c) {
            T v = gr[c] / denom;
            if (nr > T(0)) v -= xr[c] * xg / (nr * denom * denom);
            dr[c] += v;
          }
        }
      }
    });
  }
  return y;
}

template <typename T>
Tensor<T> gather_rows(Tape<T>& tape, const Tensor<T>& x, const std::vector<std::size_t>& rows) {
  if (x.rank() == 0) throw DimensionError("gather_rows on a scalar");
  const std::size_t n = x.rows(), w = x.cols();
  for (auto r : rows) {
    if (r >= n) throw DimensionError("gather_rows: index " + std::to_string(r) + " out of " + shape_str(x.shape()));
  }
  Shape shape = x.rank() == 1 ? Shape{rows.size()} : Shape{rows.size(), w};
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(shape, tracked);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(x.data().data() + rows[i] * w, w, y.data().data() + i * w);
  }
  if (tracked) {
    tape.record(y, [x, y, rows, w]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < w; ++c) dx[rows[i] * w + c] += dy[i * w + c];
    });
  }
  return y;
}

template <typename T>
Tensor<T> concat_cols(Tape<T>& tape, const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols of nothing");
  const std::size_t B = parts[0].rows();
  std::size_t width = 0;
  bool tracked = false;
  for (const auto& p : parts) {
    if (p.rank() == 0 || p.rank() > 2 || p.rows() != B) {
      throw DimensionError("concat_cols: part " + shape_str(p.shape()) + " vs " + shape_str(parts[0].shape()));
    }
    width += p.cols();
    tracked = tracked || tape.wants({&p});
  }
  auto y = make_output<T>({B, width}, tracked);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const std::size_t c = p.cols();
    for (std::size_t r = 0; r < B; ++r)
      for (std::size_t j = 0; j < c; ++j) y[r * width + off + j] = p[r * c + j];
    off += c;
  }
  if (tracked) {
    tape.record(y, [parts, y, B, width]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      std::size_t off = 0;
      for (auto& p : parts) {
        const std::size_t c = p.cols();
        if (p.requires_grad()) {
          auto dp = p.grad();
          for (std::size_t r = 0; r < B; ++r)
            for (std::size_t j = 0; j < c; ++j) dp[r * c + j] += dy[r * width + off + j];
        }
        off += c;
      }
    });
  }
  return y;
}

template <typename T>
Tensor<T> reshape(Tape<T>& tape, const Tensor<T>& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape " + shape_str(x.shape()) + " to " + shape_str(shape));
  }
  const bool tracked = tape.wants({&x});
  auto y = Tensor<T>::from(std::move(shape), x.values(), tracked);
  if (tracked) {
    tape.record(y, [x, y]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
    });
  }
  return y;
}

template <typename T>
Tensor<T> dropout(Tape<T>& tape, const Tensor<T>& x, T p, Rng& rng) {
  if (p <= T(0)) return x;
  if (p >= T(1)) throw DomainError("dropout probability must be < 1");
  const T keep_scale = T(1) / (T(1) - p);
  std::vector<T> mask(x.numel());
  for (auto& m : mask) m = rng.bernoulli(static_cast<double>(p)) ? T(0) : keep_scale;
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(x.shape(), tracked);
  for (std::size_t i = 0; i < mask.size(); ++i) y[i] = x[i] * mask[i];
  if (tracked) {
    tape.record(y, [x, y, mask = std::move(mask)]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * mask[i];
    });
  }
  return y;
}

template <typename T>
Tensor<T> batch_norm(Tape<T>& tape, const Tensor<T>& x, Tensor<T>& running_mean, Tensor<T>& running_var,
                     bool training, T momentum, T eps) {
  if (x.rank() != 1) throw DimensionError("batch_norm expects a vector, got " + shape_str(x.shape()));
  const std::size_t B = x.numel();
  const bool tracked = tape.wants({&x});
  auto y = make_output<T>(x.shape(), tracked);
  if (!training || B == 0) {
    const T inv = T(1) / std::sqrt(running_var[0] + eps);
    const T mu = running_mean[0];
    for (std::size_t i = 0; i < B; ++i) y[i] = (x[i] - mu) * inv;
    if (tracked) {
      tape.record(y, [x, y, inv]() mutable {
        std::span<const T> dy = std::as_const(y).grad();
        auto dx = x.grad();
        for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * inv;
      });
    }
    return y;
  }
  T mu = 0;
  for (auto v : x.data()) mu += v;
  mu /= T(B);
  T var = 0;
  for (auto v : x.data()) var += (v - mu) * (v - mu);
  const T var_biased = var / T(B);
  const T var_unbiased = B > 1 ? var / T(B - 1) : var_biased;
  running_mean[0] = (T(1) - momentum) * running_mean[0] + momentum * mu;
  running_var[0] = (T(1) - momentum) * running_var[0] + momentum * var_unbiased;

  const T inv = T(1) / std::sqrt(var_biased + eps);
  std::vector<T> xhat(B);
  for (std::size_t i = 0; i < B; ++i) {
    xhat[i] = (x[i] - mu) * inv;
    y[i] = xhat[i];
  }
  if (tracked) {
    tape.record(y, [x, y, xhat = std::move(xhat), inv, B]() mutable {
      std::span<const T> dy = std::as_const(y).grad();
      auto dx = x.grad();
      T m1 = 0, m2 = 0;
      for (std::size_t i = 0; i < B; ++i) {
        m1 += dy[i];
        m2 += dy[i] * xhat[i];
      }
      m1 /= T(B);
      m2 /= T(B);
      for (std::size_t i = 0; i < B; ++i) dx[i] += inv * (dy[i] - m1 - xhat[i] * m2);
    });
  }
  return y;
}

#define SAHG_OPS_INSTANTIATE(T)                                                                             \
  template Tensor<T> affine<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> unary<T>(Tape<T>&, Unary, const Tensor<T>&);                                           \
  template Tensor<T> binary<T>(Tape<T>&, Binary, const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> scale<T>(Tape<T>&, const Tensor<T>&, T);                                               \
  template Tensor<T> shift<T>(Tape<T>&, const Tensor<T>&, T);                                               \
  template Tensor<T> pow<T>(Tape<T>&, const Tensor<T>&, T);                                                 \
  template Tensor<T> clamp<T>(Tape<T>&, const Tensor<T>&, T, T);                                            \
  template Tensor<T> layer_norm<T>(Tape<T>&, const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T);      \
  template Tensor<T> softmax_rows<T>(Tape<T>&, const Tensor<T>&);                                           \
  template Tensor<T> entropy_from_logits<T>(Tape<T>&, const Tensor<T>&);                                    \
  template Tensor<T> sparse_mean_aggregate<T>(Tape<T>&, const Tensor<T>&, const kernels::CsrView&);         \
  template Tensor<T> sum<T>(Tape<T>&, const Tensor<T>&);                                                    \
  template Tensor<T> mean<T>(Tape<T>&, const Tensor<T>&);                                                   \
  template Tensor<T> sum_rows<T>(Tape<T>&, const Tensor<T>&);                                               \
  template MaxRowsResult<T> max_rows<T>(Tape<T>&, const Tensor<T>&);                                        \
  template Tensor<T> norm2_rows<T>(Tape<T>&, const Tensor<T>&);                                             \
  template Tensor<T> normalize_rows<T>(Tape<T>&, const Tensor<T>&, T, NormalizeMode);                       \
  template Tensor<T> gather_rows<T>(Tape<T>&, const Tensor<T>&, const std::vector<std::size_t>&);           \
  template Tensor<T> concat_cols<T>(Tape<T>&, const std::vector<Tensor<T>>&);                               \
  template Tensor<T> reshape<T>(Tape<T>&, const Tensor<T>&, Shape);                                         \
  template Tensor<T> dropout<T>(Tape<T>&, const Tensor<T>&, T, Rng&);                                       \
  template Tensor<T> batch_norm<T>(Tape<T>&, const Tensor<T>&, Tensor<T>&, Tensor<T>&, bool, T, T);

SAHG_OPS_INSTANTIATE(float)
SAHG_OPS_INSTANTIATE(double)

#undef SAHG_OPS_INSTANTIATE

}  // namespace sahg::ad
