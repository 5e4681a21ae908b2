#include "sahg/train/optim.hpp"

#include <cmath>

#include "sahg/error.hpp"

namespace sahg::train {

template <typename T>
AdamW<T>::AdamW(std::vector<Tensor<T>> params, AdamWOptions opts) : params_(std::move(params)), opts_(opts) {
  if (!(opts_.lr > 0.0)) throw ParameterError("AdamW: learning rate must be > 0");
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.emplace_back(p.numel(), 0.0);
    v_.emplace_back(p.numel(), 0.0);
  }
}

template <typename T>
void AdamW<T>::step() {
  ++t_;
  const double b1 = opts_.beta1, b2 = opts_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double decay = 1.0 - opts_.lr * opts_.weight_decay;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    auto& m = m_[i];
    auto& v = v_[i];
    auto theta = p.data();
    const bool has = p.has_grad();
    const auto g = p.grad();
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double gj = has ? static_cast<double>(g[j]) : 0.0;
      double th = static_cast<double>(theta[j]);
      if (opts_.weight_decay != 0.0) th *= decay;
      m[j] = b1 * m[j] + (1.0 - b1) * gj;
      v[j] = b2 * v[j] + (1.0 - b2) * gj * gj;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      th -= opts_.lr * mhat / (std::sqrt(vhat) + opts_.eps);
      theta[j] = static_cast<T>(th);
    }
  }
}

template <typename T>
double grad_global_norm(const std::vector<Tensor<T>>& params) {
  double ss = 0.0;
  for (const auto& p : params) {
    if (!p.has_grad()) continue;
    for (T g : p.grad()) ss += static_cast<double>(g) * static_cast<double>(g);
  }
  return std::sqrt(ss);
}

template <typename T>
double clip_grad_norm(const std::vector<Tensor<T>>& params, double max_norm) {
  const double total = grad_global_norm(params);
  if (!(total > max_norm)) return 1.0;
  const double scale = max_norm / total;
  for (const auto& p : params) {
    if (!p.has_grad()) continue;
    for (auto& g : p.grad()) g = static_cast<T>(static_cast<double>(g) * scale);
  }
  return scale;
}

template class AdamW<float>;
template class AdamW<double>;
template double clip_grad_norm<float>(const std::vector<Tensor<float>>&, double);
template double clip_grad_norm<double>(const std::vector<Tensor<double>>&, double);
template double grad_global_norm<float>(const std::vector<Tensor<float>>&);
template double grad_global_norm<double>(const std::vector<Tensor<double>>&);

}  // namespace sahg::train
