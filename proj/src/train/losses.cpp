#include "sahg/train/losses.hpp"

#include <cmath>

#include "sahg/error.hpp"

namespace sahg::train {

template <typename T>
Tensor<T> focal_loss(Tape<T>& t, const Tensor<T>& probs, std::span<const std::uint8_t> y, double alpha,
                     double gamma_f) {
  const std::size_t B = probs.numel();
  if (B == 0) throw DimensionError("focal_loss: empty batch");
  if (y.size() != B) throw DimensionError("focal_loss: label count does not match batch");
  const double a_neg = alpha < 1.0 ? 1.0 - alpha : 1.0;
  // p_y = y p + (1 - y)(1 - p) = (1 - y) + (2y - 1) p
  std::vector<T> sign(B), offset(B), weight(B);
  for (std::size_t i = 0; i < B; ++i) {
    sign[i] = y[i] ? T(1) : T(-1);
    offset[i] = y[i] ? T(0) : T(1);
    weight[i] = static_cast<T>(y[i] ? alpha : a_neg);
  }
  auto p = ad::clamp(t, probs, static_cast<T>(kProbClamp), static_cast<T>(1.0 - kProbClamp));
  auto py = ad::add(t, ad::mul(t, p, Tensor<T>::from({B}, sign)), Tensor<T>::from({B}, offset));
  auto nll = ad::scale(t, ad::log(t, py), T(-1));
  Tensor<T> per = nll;
  if (gamma_f != 0.0) {
    auto one_minus = ad::shift(t, ad::scale(t, py, T(-1)), T(1));
    // (1 - p_y) can reach exactly 0 only outside the clamp, so pow's x > 0 holds.
    per = ad::mul(t, ad::pow(t, one_minus, static_cast<T>(gamma_f)), nll);
  }
  per = ad::mul(t, per, Tensor<T>::from({B}, weight));
  return ad::mean(t, per);
}

double lambda_schedule(std::size_t epoch, double lambda0, std::size_t warmup) {
  if (warmup == 0) return 0.0;
  return lambda0 * std::max(0.0, 1.0 - static_cast<double>(epoch) / static_cast<double>(warmup));
}

template <typename T>
LossTerms<T> total_loss(Tape<T>& t, const Tensor<T>& probs, std::span<const std::uint8_t> y,
                        const Tensor<T>& entropy, std::size_t epoch, double alpha, double gamma_f, double lambda0,
                        std::size_t warmup, std::size_t num_prototypes) {
  LossTerms<T> out;
  auto focal = focal_loss(t, probs, y, alpha, gamma_f);
  out.focal = static_cast<double>(focal.item());
  out.lambda = lambda_schedule(epoch, lambda0, warmup);
  std::size_t n_bot = 0;
  for (auto v : y) n_bot += v ? 1 : 0;
  if (out.lambda == 0.0 || n_bot == 0 || !entropy.defined()) {
    out.total = focal;
    return out;
  }
  const std::size_t B = y.size();
  std::vector<T> mask(B);
  for (std::size_t i = 0; i < B; ++i) mask[i] = y[i] ? T(1) : T(0);
  const double norm = std::log(static_cast<double>(num_prototypes)) + kLossEps;
  const double coef = out.lambda / (norm * (static_cast<double>(n_bot) + kLossEps));
  auto masked = ad::sum(t, ad::mul(t, entropy, Tensor<T>::from({B}, mask)));
  auto reg = ad::scale(t, masked, static_cast<T>(coef));
  out.entropy_reg = static_cast<double>(reg.item());
  out.total = ad::add(t, focal, reg);
  return out;
}

template Tensor<float> focal_loss<float>(Tape<float>&, const Tensor<float>&, std::span<const std::uint8_t>, double,
                                         double);
template Tensor<double> focal_loss<double>(Tape<double>&, const Tensor<double>&, std::span<const std::uint8_t>,
                                           double, double);
template LossTerms<float> total_loss<float>(Tape<float>&, const Tensor<float>&, std::span<const std::uint8_t>,
                                            const Tensor<float>&, std::size_t, double, double, double, std::size_t,
                                            std::size_t);
template LossTerms<double> total_loss<double>(Tape<double>&, const Tensor<double>&, std::span<const std::uint8_t>,
                                              const Tensor<double>&, std::size_t, double, double, double,
                                              std::size_t, std::size_t);

}  // namespace sahg::train
