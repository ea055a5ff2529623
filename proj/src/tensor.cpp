#include "gmc/tensor.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace gmc {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

namespace {

std::shared_ptr<detail::TensorImpl> make_impl(std::vector<double> data,
                                              Shape shape,
                                              bool requires_grad) {
  if (shape_numel(shape) != data.size())
    throw std::invalid_argument("tensor: shape does not match element count");
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = std::move(shape);
  impl->data = std::move(data);
  impl->requires_grad = requires_grad;
  return impl;
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::vector<double> data(shape_numel(shape), 0.0);
  return Tensor(make_impl(std::move(data), std::move(shape), requires_grad));
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  std::vector<double> data(shape_numel(shape), value);
  return Tensor(make_impl(std::move(data), std::move(shape), requires_grad));
}

Tensor Tensor::from_vector(std::vector<double> data, Shape shape,
                           bool requires_grad) {
  return Tensor(make_impl(std::move(data), std::move(shape), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return from_vector({value}, {1}, requires_grad);
}

Tensor Tensor::make_op(std::vector<double> data, Shape shape,
                       std::vector<Tensor> parents, BackwardFn backward) {
  bool needs_grad = false;
  for (const Tensor& p : parents)
    if (p.requires_grad()) needs_grad = true;
  auto impl = make_impl(std::move(data), std::move(shape), needs_grad);
  if (needs_grad) {
    impl->parents = std::move(parents);
    impl->backward_fn = std::move(backward);
  }
  return Tensor(impl);
}

void Tensor::accumulate_grad(const std::vector<double>& delta) const {
  if (!requires_grad()) return;
  if (delta.size() != impl_->data.size())
    throw std::invalid_argument("tensor: gradient size mismatch");
  impl_->ensure_grad();
  for (std::size_t i = 0; i < delta.size(); ++i) impl_->grad[i] += delta[i];
}

double Tensor::value() const {
  if (!impl_ || impl_->data.size() != 1)
    throw std::logic_error("tensor: value() requires exactly one element");
  return impl_->data[0];
}

Tensor Tensor::detach() const {
  return from_vector(impl_->data, impl_->shape, false);
}

void Tensor::backward() const {
  if (!impl_ || impl_->data.size() != 1)
    throw std::logic_error("tensor: backward() requires a scalar");
  if (!impl_->requires_grad)
    throw std::logic_error("tensor: backward() on a detached tensor");

  // Iterative post-order DFS; recursion would overflow on deep chains.
  std::vector<detail::TensorImpl*> order;
  std::unordered_set<detail::TensorImpl*> visited;
  struct Frame {
    detail::TensorImpl* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack;
  stack.push_back({impl_.get(), 0});
  visited.insert(impl_.get());
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next_parent < top.node->parents.size()) {
      detail::TensorImpl* parent =
          top.node->parents[top.next_parent].impl_.get();
      ++top.next_parent;
      if (parent->requires_grad && visited.insert(parent).second)
        stack.push_back({parent, 0});
    } else {
      order.push_back(top.node);
      stack.pop_back();
    }
  }

  impl_->ensure_grad();
  impl_->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::TensorImpl* node = *it;
    if (node->backward_fn) node->backward_fn(Tensor(node->shared_from_this()));
  }
}

}  // namespace gmc
