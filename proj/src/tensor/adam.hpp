#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tensor/autograd.hpp"

namespace evoke {

template <typename T>
struct NamedParameter {
  std::string name;
  Variable<T> var;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamState {
  std::uint64_t step = 0;
  std::vector<Tensor<T>> m;
  std::vector<Tensor<T>> v;
  AdamOptions options;
};

/// Adam with bias correction. Parameters without a gradient are treated as
/// having a zero gradient.
template <typename T>
class Adam {
 public:
  Adam(std::vector<NamedParameter<T>> params, AdamOptions options = {});

  /// Throws ErrorCode::Numeric naming the parameter if any gradient is NaN.
  void step();
  void zero_grad();

  const AdamState<T>& state() const { return state_; }
  const std::vector<NamedParameter<T>>& parameters() const { return params_; }

 private:
  std::vector<NamedParameter<T>> params_;
  AdamState<T> state_;
};

}  // namespace evoke
