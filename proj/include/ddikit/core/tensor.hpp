#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ddikit::core {

using Scalar = double;
using Shape = std::vector<std::int64_t>;

std::int64_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

struct TensorNode;

/// Shared handle to a node of the computation record.
///
/// Values are computed eagerly; each non-leaf node stores its parents and a
/// closure that pushes adjoints backwards. backward() from a one-element
/// tensor replays the recorded operations in reverse topological order,
/// accumulating gradients additively wherever a tensor fans out. A record
/// is single-use: running backward twice through the same root throws.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, Scalar value, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<Scalar> values, bool requires_grad = false);
  static Tensor scalar(Scalar value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::int64_t size() const;
  std::int64_t rows() const;  // 2-d accessors
  std::int64_t cols() const;

  bool requires_grad() const;
  void set_requires_grad(bool on);  // leaves only
  bool is_leaf() const;

  std::span<const Scalar> values() const;
  std::span<Scalar> values_mut();  // leaves only (parameter updates)
  Scalar item() const;             // one-element tensors

  bool has_grad() const;
  std::span<const Scalar> grad() const;
  std::span<Scalar> grad_mut();  // allocates zeros on first use
  void zero_grad();

  void backward() const;

  TensorNode* node() const { return node_.get(); }
  const std::shared_ptr<TensorNode>& node_ptr() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<TensorNode> node_;

  friend Tensor make_node(Shape shape, std::vector<Tensor> parents,
                          std::function<void(TensorNode&)> backward_fn);
};

struct TensorNode {
  Shape shape;
  std::vector<Scalar> values;
  std::vector<Scalar> grad;  // empty until first touched
  bool requires_grad = false;
  bool is_leaf = true;
  bool backward_done = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward_fn;

  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  std::vector<Scalar>& ensure_grad();
};

/// Builds an interior node. requires_grad is inherited from the parents; the
/// backward closure is dropped when no parent needs gradients.
Tensor make_node(Shape shape, std::vector<Tensor> parents,
                 std::function<void(TensorNode&)> backward_fn);

}  // namespace ddikit::core
