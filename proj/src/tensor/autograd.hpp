#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tensor/tensor.hpp"

namespace evoke {

template <typename T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;  // empty until a backward pass reaches this node
  bool requires_grad = false;
  std::string op = "leaf";
  std::vector<std::shared_ptr<Node<T>>> inputs;
  // Reads this node's grad and accumulates into the inputs' grads.
  std::function<void(Node<T>&)> backward;

  Tensor<T>& grad_buffer() {
    if (grad.empty()) grad = Tensor<T>(value.dims());
    return grad;
  }
};

/// A value in the differentiable computation, with optional gradient.
template <typename T>
class Variable {
 public:
  Variable() = default;
  explicit Variable(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

  static Variable leaf(Tensor<T> value, bool requires_grad = false) {
    auto node = std::make_shared<Node<T>>();
    node->value = std::move(value);
    node->requires_grad = requires_grad;
    return Variable(std::move(node));
  }

  bool defined() const { return node_ != nullptr; }
  const Tensor<T>& value() const { return node_->value; }
  /// Direct write access for optimizers and checkpoint loading.
  Tensor<T>& mutable_value() { return node_->value; }
  const Shape& dims() const { return node_->value.dims(); }
  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  const Tensor<T>& grad() const { return node_->grad; }
  void zero_grad() { node_->grad = Tensor<T>(); }
  const std::string& op() const { return node_->op; }

  const std::shared_ptr<Node<T>>& node() const { return node_; }

 private:
  std::shared_ptr<Node<T>> node_;
};

/// Topologically ordered view of the nodes a scalar loss depends on.
template <typename T>
struct ComputeGraph {
  std::vector<Node<T>*> nodes;  // inputs precede consumers
};

template <typename T>
ComputeGraph<T> trace(const Variable<T>& output);

/// Populates grad on every requires_grad node reachable from `loss`.
/// Gradients accumulate (sum) into leaves across calls until zero_grad.
template <typename T>
void backward(const Variable<T>& loss);

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

/// Creates the result node of an operator. Records inputs and the backward
/// closure only when recording is enabled and some input requires grad.
template <typename T>
Variable<T> make_result(std::string op, Tensor<T> value,
                        std::vector<std::shared_ptr<Node<T>>> inputs,
                        std::function<void(Node<T>&)> backward_fn) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->op = std::move(op);
  bool needs = false;
  if (grad_enabled()) {
    for (const auto& in : inputs) needs = needs || in->requires_grad;
  }
  if (needs) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward_fn);
  }
  return Variable<T>(std::move(node));
}

}  // namespace evoke
