#include "tensor/adam.hpp"

#include <cmath>

namespace evoke {

template <typename T>
Adam<T>::Adam(std::vector<NamedParameter<T>> params, AdamOptions options)
    : params_(std::move(params)) {
  state_.options = options;
  for (const auto& p : params_) {
    state_.m.emplace_back(p.var.dims());
    state_.v.emplace_back(p.var.dims());
  }
}

template <typename T>
void Adam<T>::step() {
  for (const auto& p : params_) {
    if (!p.var.has_grad()) continue;
    for (T g : p.var.grad().data()) {
      if (std::isnan(g)) {
        fail(ErrorCode::Numeric, "NaN gradient in parameter '" + p.name + "' at step " +
                                     std::to_string(state_.step + 1));
      }
    }
  }
  ++state_.step;
  const AdamOptions& o = state_.options;
  const double t = static_cast<double>(state_.step);
  const T b1 = static_cast<T>(o.beta1);
  const T b2 = static_cast<T>(o.beta2);
  const T c1 = static_cast<T>(1.0 / (1.0 - std::pow(o.beta1, t)));
  const T c2 = static_cast<T>(1.0 / (1.0 - std::pow(o.beta2, t)));
  const T lr = static_cast<T>(o.lr);
  const T eps = static_cast<T>(o.eps);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto& p = params_[k];
    if (!p.var.has_grad()) continue;
    auto value = p.var.mutable_value().data();
    const auto grad = p.var.grad().data();
    auto m = state_.m[k].data();
    auto v = state_.v[k].data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const T g = grad[i];
      m[i] = b1 * m[i] + (T{1} - b1) * g;
      v[i] = b2 * v[i] + (T{1} - b2) * g * g;
      const T mhat = m[i] * c1;
      const T vhat = v[i] * c2;
      value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.var.zero_grad();
}

template class Adam<float>;
template class Adam<double>;

}  // namespace evoke
