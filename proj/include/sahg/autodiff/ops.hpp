#pragma once

#include <cstddef>
#include <vector>

#include "sahg/autodiff/kernels.hpp"
#include "sahg/autodiff/tape.hpp"
#include "sahg/autodiff/tensor.hpp"
#include "sahg/rng.hpp"

// Differentiable operations. Each op computes its forward value eagerly and,
// when the tape is enabled and some input requires a gradient, records the
// exact backward rule. Inputs to an op must outlive the tape that recorded it
// (tensors are ref-counted; sparse graphs are not).

namespace sahg::ad {

enum class Unary { Gelu, Softplus, Sigmoid, Exp, Log, Square, Sqrt, Sinh };
enum class Binary { Add, Sub, Mul, Div };

// x / max(|x|, eps) or x / (|x| + eps), row by row.
enum class NormalizeMode { MaxEps, AddEps };

template <typename T>
struct MaxRowsResult {
  Tensor<T> value;                 // [B]
  std::vector<std::size_t> index;  // argmax per row, lowest index on ties
};

// out[i] = W x[i] + b.  x: [B x m], W: [n x m], b: [n] (may be undefined).
template <typename T>
Tensor<T> affine(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& W, const Tensor<T>& b);

template <typename T>
Tensor<T> linear(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& W) {
  return affine(tape, x, W, Tensor<T>{});
}

template <typename T>
Tensor<T> unary(Tape<T>& tape, Unary kind, const Tensor<T>& x);

// Rank <= 2 broadcasting, shapes right-aligned: [B x K] op [K] broadcasts
// along rows, [B x K] op [B x 1] along columns, anything op scalar.
template <typename T>
Tensor<T> binary(Tape<T>& tape, Binary kind, const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(Tape<T>& tape, const Tensor<T>& x, T s);
template <typename T>
Tensor<T> shift(Tape<T>& tape, const Tensor<T>& x, T s);
// x^e for x > 0.
template <typename T>
Tensor<T> pow(Tape<T>& tape, const Tensor<T>& x, T e);
// Gradient passes only where lo <= x <= hi.
template <typename T>
Tensor<T> clamp(Tape<T>& tape, const Tensor<T>& x, T lo, T hi);

template <typename T>
Tensor<T> layer_norm(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias,
                     T eps = T(1e-5));

template <typename T>
Tensor<T> softmax_rows(Tape<T>& tape, const Tensor<T>& logits);

// H_i = -sum_k q_ik log q_ik with q = softmax_rows(logits), evaluated through
// log-softmax so saturated rows stay finite.
template <typename T>
Tensor<T> entropy_from_logits(Tape<T>& tape, const Tensor<T>& logits);

template <typename T>
Tensor<T> sparse_mean_aggregate(Tape<T>& tape, const Tensor<T>& x, const kernels::CsrView& graph);

template <typename T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& x);
template <typename T>
Tensor<T> mean(Tape<T>& tape, const Tensor<T>& x);
template <typename T>
Tensor<T> sum_rows(Tape<T>& tape, const Tensor<T>& x);
template <typename T>
MaxRowsResult<T> max_rows(Tape<T>& tape, const Tensor<T>& x);
template <typename T>
Tensor<T> norm2_rows(Tape<T>& tape, const Tensor<T>& x);
template <typename T>
Tensor<T> normalize_rows(Tape<T>& tape, const Tensor<T>& x, T eps, NormalizeMode mode);

template <typename T>
Tensor<T> gather_rows(Tape<T>& tape, const Tensor<T>& x, const std::vector<std::size_t>& rows);
// Each part is [B] (one column) or [B x c].
template <typename T>
Tensor<T> concat_cols(Tape<T>& tape, const std::vector<Tensor<T>>& parts);
template <typename T>
Tensor<T> reshape(Tape<T>& tape, const Tensor<T>& x, Shape shape);

// Inverted dropout; identity when p == 0.
template <typename T>
Tensor<T> dropout(Tape<T>& tape, const Tensor<T>& x, T p, Rng& rng);

// Affine-free standardization of a [B] vector. Training mode uses batch
// statistics and folds them into the running buffers; eval mode uses the
// running buffers.
template <typename T>
Tensor<T> batch_norm(Tape<T>& tape, const Tensor<T>& x, Tensor<T>& running_mean, Tensor<T>& running_var,
                     bool training, T momentum = T(0.1), T eps = T(1e-5));

// Named pointwise shorthands.
template <typename T> Tensor<T> gelu(Tape<T>& t, const Tensor<T>& x) { return unary(t, Unary::Gelu, x); }
template <typename T> Tensor<T> softplus(Tape<T>& t, const Tensor<T>& x) { return unary(t, Unary::Softplus, x); }
template <typename T> Tensor<T> sigmoid(Tape<T>& t, const Tensor<T>& x) { return unary(t, Unary::Sigmoid, x); }
template <typename T> Tensor<T> exp(Tape<T>& t, const Tensor<T>& x) { return unary(t, Unary::Exp, x); }
template <typename T> Tensor<T> log(Tape<T>& t, const Tensor<T>& x) { return unary(t, Unary::Log, x); }
template <typename T> Tensor<T> square(Tape<T>& t, const Tensor<T>& x) { return unary(t, Unary::Square, x); }
template <typename T> Tensor<T> sqrt(Tape<T>& t, const Tensor<T>& x) { return unary(t, Unary::Sqrt, x); }
template <typename T> Tensor<T> sinh(Tape<T>& t, const Tensor<T>& x) { return unary(t, Unary::Sinh, x); }
template <typename T> Tensor<T> add(Tape<T>& t, const Tensor<T>& a, const Tensor<T>& b) { return binary(t, Binary::Add, a, b); }
template <typename T> Tensor<T> sub(Tape<T>& t, const Tensor<T>& a, const Tensor<T>& b) { return binary(t, Binary::Sub, a, b); }
template <typename T> Tensor<T> mul(Tape<T>& t, const Tensor<T>& a, const Tensor<T>& b) { return binary(t, Binary::Mul, a, b); }
template <typename T> Tensor<T> div(Tape<T>& t, const Tensor<T>& a, const Tensor<T>& b) { return binary(t, Binary::Div, a, b); }

// Scalar reference functions shared with tests and the geometry module.
double gelu_value(double x);
double softplus_value(double x);
double sigmoid_value(double x);

}  // namespace sahg::ad
