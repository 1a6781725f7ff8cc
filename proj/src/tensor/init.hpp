#pragma once

#include "tensor/prng.hpp"
#include "tensor/tensor.hpp"

namespace evoke {

/// Product of all extents after the first (cin*kh*kw for conv, in for linear).
std::size_t fan_in(const Shape& dims);

/// Uniform on (-sqrt(6/fan_in), +sqrt(6/fan_in)).
template <typename T>
Tensor<T> kaiming_init(Prng& prng, const Shape& dims);

}  // namespace evoke
