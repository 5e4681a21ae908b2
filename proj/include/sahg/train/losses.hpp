#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "sahg/autodiff/ops.hpp"

namespace sahg::train {

using ad::Tape;
using ad::Tensor;

inline constexpr double kProbClamp = 1e-7;
inline constexpr double kLossEps = 1e-6;

/// Mean over the batch of -alpha_y (1 - p_y)^gamma_f log p_y, where p_y is the
/// probability assigned to the true class. alpha weights bots; humans get
/// 1 - alpha (or 1 when alpha == 1).
template <typename T>
Tensor<T> focal_loss(Tape<T>& tape, const Tensor<T>& probs, std::span<const std::uint8_t> y, double alpha,
                     double gamma_f);

// lambda0 * max(0, 1 - t / warmup); zero throughout when warmup == 0.
double lambda_schedule(std::size_t epoch, double lambda0, std::size_t warmup);

template <typename T>
struct LossTerms {
  Tensor<T> total;
  double focal = 0.0;
  double entropy_reg = 0.0;  // already multiplied by lambda
  double lambda = 0.0;
};

/// Focal loss plus lambda(t) times the mean normalized node-channel entropy
/// over bot rows of the batch. `entropy` may be undefined (variants without
/// sectors), in which case the regularizer is zero.
template <typename T>
LossTerms<T> total_loss(Tape<T>& tape, const Tensor<T>& probs, std::span<const std::uint8_t> y,
                        const Tensor<T>& entropy, std::size_t epoch, double alpha, double gamma_f, double lambda0,
                        std::size_t warmup, std::size_t num_prototypes);

}  // namespace sahg::train
