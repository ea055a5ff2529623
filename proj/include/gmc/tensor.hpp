#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace gmc {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);

class Tensor;

namespace detail {

struct TensorImpl : std::enable_shared_from_this<TensorImpl> {
  Shape shape;
  std::vector<double> data;
  bool requires_grad = false;
  std::vector<double> grad;  // sized lazily
  std::vector<Tensor> parents;
  std::function<void(const Tensor& out)> backward_fn;

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

}  // namespace detail

/// Dense double-precision tensor; a node in a define-by-run autodiff graph.
/// Value-semantics handle: copies share the same storage and graph node.
/// The graph is rebuilt on every forward pass and freed when the handles go
/// out of scope. Single-threaded per graph.
class Tensor {
 public:
  using BackwardFn = std::function<void(const Tensor& out)>;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl)
      : impl_(std::move(impl)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from_vector(std::vector<double> data, Shape shape,
                            bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  /// Records a custom differentiable operation. `backward` receives the
  /// output tensor (whose grad is fully accumulated by then) and must add
  /// into the parents' grads via accumulate_grad(). If no parent requires
  /// grad the node is created detached and `backward` is dropped.
  static Tensor make_op(std::vector<double> data, Shape shape,
                        std::vector<Tensor> parents, BackwardFn backward);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  std::size_t numel() const { return impl_->data.size(); }
  bool requires_grad() const { return impl_ && impl_->requires_grad; }

  const std::vector<double>& data() const { return impl_->data; }
  std::vector<double>& data() { return impl_->data; }

  /// Gradient buffer; zeros if backward never reached this tensor.
  const std::vector<double>& grad() const {
    impl_->ensure_grad();
    return impl_->grad;
  }
  void zero_grad() {
    if (impl_) impl_->grad.assign(impl_->data.size(), 0.0);
  }

  /// Adds into this tensor's grad buffer. No-op unless requires_grad.
  void accumulate_grad(const std::vector<double>& delta) const;
  void accumulate_grad_at(std::size_t index, double delta) const {
    if (!requires_grad()) return;
    impl_->ensure_grad();
    impl_->grad[index] += delta;
  }

  /// Scalar extraction; tensor must hold exactly one element.
  double value() const;

  /// Copy of the values with no graph linkage and no gradient.
  Tensor detach() const;

  /// Reverse-mode sweep from this scalar. Every requires_grad tensor
  /// reachable through the graph receives its accumulated derivative.
  void backward() const;

  bool same_node(const Tensor& other) const { return impl_ == other.impl_; }

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

}  // namespace gmc
