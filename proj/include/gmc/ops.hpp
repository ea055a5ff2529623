#pragma once

#include <vector>

#include "gmc/tensor.hpp"

namespace gmc {

// Elementwise binary ops. Shapes must match, or one operand may broadcast:
// a single-element tensor against anything, or a length-n vector (or 1xn
// matrix) against the rows of an m x n matrix.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

// Elementwise unary ops.
Tensor neg(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor sqrt(const Tensor& x);   // negative input -> error
Tensor square(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor erf(const Tensor& x);    // NaN input -> error

// 2-D matrix product.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& x);

// Max-subtracted softmax along `axis`.
Tensor softmax(const Tensor& x, std::size_t axis);

// Reductions. The axis forms reduce that dimension away.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor sum(const Tensor& x, std::size_t axis);
Tensor mean(const Tensor& x, std::size_t axis);

// Layout ops.
Tensor reshape(const Tensor& x, Shape shape);
Tensor permute(const Tensor& x, const std::vector<std::size_t>& axes);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor slice_rows(const Tensor& x, std::size_t start, std::size_t count);

// Scalar product of two equal-length vectors: sum(a*b).
Tensor dot(const Tensor& a, const Tensor& b);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& x) { return neg(x); }
inline Tensor operator+(const Tensor& a, double b) {
  return add(a, Tensor::scalar(b));
}
inline Tensor operator-(const Tensor& a, double b) {
  return sub(a, Tensor::scalar(b));
}
inline Tensor operator*(const Tensor& a, double b) {
  return mul(a, Tensor::scalar(b));
}
inline Tensor operator/(const Tensor& a, double b) {
  return div(a, Tensor::scalar(b));
}
inline Tensor operator+(double a, const Tensor& b) {
  return add(Tensor::scalar(a), b);
}
inline Tensor operator-(double a, const Tensor& b) {
  return sub(Tensor::scalar(a), b);
}
inline Tensor operator*(double a, const Tensor& b) {
  return mul(Tensor::scalar(a), b);
}
inline Tensor operator/(double a, const Tensor& b) {
  return div(Tensor::scalar(a), b);
}

}  // namespace gmc
