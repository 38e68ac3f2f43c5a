#include "ddikit/core/tensor.hpp"

#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace ddikit::core {

std::int64_t shape_size(const Shape& shape) {
  std::int64_t n = 1;
  for (std::int64_t d : shape) {
    if (d < 0) throw std::invalid_argument("tensor shape has a negative dimension");
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream oss;
  oss << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) oss << "x";
    oss << shape[i];
  }
  oss << "]";
  return oss.str();
}

std::vector<Scalar>& TensorNode::ensure_grad() {
  if (grad.empty()) grad.assign(values.size(), 0.0);
  return grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, Scalar value, bool requires_grad) {
  auto node = std::make_shared<TensorNode>();
  const std::int64_t n = shape_size(shape);
  node->shape = std::move(shape);
  node->values.assign(static_cast<std::size_t>(n), value);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::from_values(Shape shape, std::vector<Scalar> values, bool requires_grad) {
  if (shape_size(shape) != static_cast<std::int64_t>(values.size())) {
    throw std::invalid_argument("tensor: " + shape_str(shape) + " does not hold " +
                                std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::scalar(Scalar value, bool requires_grad) {
  return from_values({1, 1}, {value}, requires_grad);
}

const Shape& Tensor::shape() const { return node_->shape; }

std::int64_t Tensor::size() const { return node_->size(); }

std::int64_t Tensor::rows() const {
  if (node_->shape.size() != 2) {
    throw std::logic_error("rows(): tensor is not 2-d, shape " + shape_str(node_->shape));
  }
  return node_->shape[0];
}

std::int64_t Tensor::cols() const {
  if (node_->shape.size() != 2) {
    throw std::logic_error("cols(): tensor is not 2-d, shape " + shape_str(node_->shape));
  }
  return node_->shape[1];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }

void Tensor::set_requires_grad(bool on) {
  if (!node_->is_leaf) throw std::logic_error("set_requires_grad: only leaf tensors");
  node_->requires_grad = on;
}

bool Tensor::is_leaf() const { return node_->is_leaf; }

std::span<const Scalar> Tensor::values() const { return node_->values; }

std::span<Scalar> Tensor::values_mut() {
  if (!node_->is_leaf) {
    throw std::logic_error("values_mut: interior nodes of a record are immutable");
  }
  return node_->values;
}

Scalar Tensor::item() const {
  if (node_->size() != 1) {
    throw std::logic_error("item(): tensor has " + std::to_string(node_->size()) + " elements");
  }
  return node_->values[0];
}

bool Tensor::has_grad() const { return !node_->grad.empty(); }

std::span<const Scalar> Tensor::grad() const { return node_->grad; }

std::span<Scalar> Tensor::grad_mut() { return node_->ensure_grad(); }

void Tensor::zero_grad() {
  if (!node_->grad.empty()) node_->grad.assign(node_->values.size(), 0.0);
}

namespace {

void topo_collect(TensorNode* root, std::vector<TensorNode*>& order) {
  // Iterative post-order DFS; recursion would overflow on deep records.
  std::unordered_set<TensorNode*> visited;
  std::vector<std::pair<TensorNode*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (next_child < node->parents.size()) {
      TensorNode* parent = node->parents[next_child++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
}

}  // namespace

void Tensor::backward() const {
  TensorNode* root = node_.get();
  if (root->size() != 1) {
    throw std::logic_error("backward(): root must be a one-element tensor, shape " +
                           shape_str(root->shape));
  }
  if (!root->requires_grad) return;  // nothing reachable needs gradients
  if (root->backward_done) {
    throw std::logic_error("backward(): record already replayed; records are single-use");
  }
  root->backward_done = true;

  std::vector<TensorNode*> order;
  topo_collect(root, order);

  root->ensure_grad()[0] += 1.0;
  // Post-order puts parents before children; walk children-first.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* node = *it;
    if (node->backward_fn && !node->grad.empty()) node->backward_fn(*node);
  }
}

Tensor make_node(Shape shape, std::vector<Tensor> parents,
                 std::function<void(TensorNode&)> backward_fn) {
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->values.resize(static_cast<std::size_t>(shape_size(node->shape)));
  node->is_leaf = false;
  bool needs_grad = false;
  for (const Tensor& p : parents) needs_grad = needs_grad || p.requires_grad();
  node->requires_grad = needs_grad;
  if (needs_grad) {
    node->parents.reserve(parents.size());
    for (const Tensor& p : parents) node->parents.push_back(p.node_ptr());
    node->backward_fn = std::move(backward_fn);
  }
  return Tensor(std::move(node));
}

}  // namespace ddikit::core
