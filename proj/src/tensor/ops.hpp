#pragma once

#include <cstddef>

#include "tensor/autograd.hpp"

namespace evoke {

/// Zero padding per spatial side. Stride is always 1.
struct Padding {
  std::size_t top = 0;
  std::size_t bottom = 0;
  std::size_t left = 0;
  std::size_t right = 0;
};

/// Padding that keeps spatial extents unchanged for a k x k kernel. Even
/// kernels put the extra row/column after: k=4 gives 1 before, 2 after.
Padding same_padding(std::size_t kernel);

/// input [n,cin,h,w], weight [cout,cin,kh,kw], bias [cout]
template <typename T>
Variable<T> conv2d(const Variable<T>& input, const Variable<T>& weight,
                   const Variable<T>& bias, Padding pad);

/// input [n,f], weight [out,f], bias [out] -> input * weight^T + bias
template <typename T>
Variable<T> linear(const Variable<T>& input, const Variable<T>& weight,
                   const Variable<T>& bias);

template <typename T>
Variable<T> relu(const Variable<T>& input);

template <typename T>
Variable<T> sigmoid(const Variable<T>& input);

/// [n, ...] -> [n, prod(...)]
template <typename T>
Variable<T> flatten(const Variable<T>& input);

template <typename T>
Variable<T> scale(const Variable<T>& input, double factor);

template <typename T>
Variable<T> add(const Variable<T>& a, const Variable<T>& b);

template <typename T>
Variable<T> sum(const Variable<T>& input);

/// Mean over the batch axis of the per-row sum of binary cross-entropy,
/// evaluated in the softplus form. Targets may be soft but must lie in [0,1].
template <typename T>
Variable<T> bce_with_logits(const Variable<T>& logits, const Tensor<T>& targets);

/// Scalar sigmoid, stable for large |x|.
double stable_sigmoid(double x);
/// log(1 + exp(x)) without overflow.
double softplus(double x);

}  // namespace evoke
