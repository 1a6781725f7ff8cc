#include "tensor/autograd.hpp"

#include <unordered_set>
#include <utility>

namespace evoke {

namespace {
thread_local bool t_grad_enabled = true;
}

bool grad_enabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

template <typename T>
ComputeGraph<T> trace(const Variable<T>& output) {
  ComputeGraph<T> graph;
  if (!output.defined() || !output.requires_grad()) return graph;
  // Iterative post-order DFS: a node is emitted after all of its inputs.
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(output.node().get(), 0);
  visited.insert(output.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node<T>* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      graph.nodes.push_back(node);
      stack.pop_back();
    }
  }
  return graph;
}

template <typename T>
void backward(const Variable<T>& loss) {
  require(loss.defined() && loss.value().size() == 1, ErrorCode::Contract,
          "backward requires a scalar loss, got dims " +
              (loss.defined() ? shape_string(loss.dims()) : std::string("<undefined>")));
  if (!loss.requires_grad()) return;
  ComputeGraph<T> graph = trace(loss);
  loss.node()->grad_buffer()[0] += T{1};
  for (auto it = graph.nodes.rbegin(); it != graph.nodes.rend(); ++it) {
    Node<T>* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
  // Interior gradients are only needed during the pass.
  for (Node<T>* node : graph.nodes) {
    if (!node->inputs.empty()) node->grad = Tensor<T>();
  }
}

template ComputeGraph<float> trace(const Variable<float>&);
template ComputeGraph<double> trace(const Variable<double>&);
template void backward(const Variable<float>&);
template void backward(const Variable<double>&);

}  // namespace evoke
