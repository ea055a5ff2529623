#include "gmc/ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "gmc/erf.hpp"

namespace gmc {

namespace {

// Broadcast layout of a binary elementwise op, resolved at construction.
enum class Pairing {
  equal,      // identical shapes
  a_scalar,   // a has one element
  b_scalar,   // b has one element
  a_rowvec,   // a is a length-n vector, b is m x n
  b_rowvec,   // b is a length-n vector, a is m x n
};

bool is_rowvec_of(const Shape& vec, const Shape& mat) {
  if (mat.size() != 2) return false;
  std::size_t n = mat[1];
  if (vec.size() == 1 && vec[0] == n) return true;
  if (vec.size() == 2 && vec[0] == 1 && vec[1] == n) return true;
  return false;
}

Pairing resolve_pairing(const Tensor& a, const Tensor& b, const char* name) {
  if (a.shape() == b.shape()) return Pairing::equal;
  if (a.numel() == 1 && b.numel() == 1)
    // Keep the higher-rank shape, e.g. {1,1} times {1} stays {1,1}.
    return a.shape().size() >= b.shape().size() ? Pairing::b_scalar
                                                : Pairing::a_scalar;
  if (a.numel() == 1) return Pairing::a_scalar;
  if (b.numel() == 1) return Pairing::b_scalar;
  if (is_rowvec_of(a.shape(), b.shape())) return Pairing::a_rowvec;
  if (is_rowvec_of(b.shape(), a.shape())) return Pairing::b_rowvec;
  throw std::invalid_argument(std::string(name) + ": shape mismatch");
}

struct BinaryPlan {
  Pairing pairing;
  Shape out_shape;
  std::size_t out_n = 0;
  std::size_t cols = 0;  // row-vector length for the rowvec pairings

  std::size_t ia(std::size_t i) const {
    if (pairing == Pairing::a_scalar) return 0;
    if (pairing == Pairing::a_rowvec) return i % cols;
    return i;
  }
  std::size_t ib(std::size_t i) const {
    if (pairing == Pairing::b_scalar) return 0;
    if (pairing == Pairing::b_rowvec) return i % cols;
    return i;
  }
};

BinaryPlan make_plan(const Tensor& a, const Tensor& b, const char* name) {
  BinaryPlan plan;
  plan.pairing = resolve_pairing(a, b, name);
  switch (plan.pairing) {
    case Pairing::equal:
    case Pairing::b_scalar:
    case Pairing::b_rowvec:
      plan.out_shape = a.shape();
      break;
    case Pairing::a_scalar:
    case Pairing::a_rowvec:
      plan.out_shape = b.shape();
      break;
  }
  plan.out_n = shape_numel(plan.out_shape);
  if (plan.pairing == Pairing::a_rowvec) plan.cols = a.numel();
  if (plan.pairing == Pairing::b_rowvec) plan.cols = b.numel();
  return plan;
}

// Shared skeleton: forward combines av/bv per broadcast plan; backward maps
// the output gradient through (dfda, dfdb) evaluated at the forward inputs.
Tensor binary_op(const Tensor& a, const Tensor& b, const char* name,
                 const std::function<double(double, double)>& f,
                 const std::function<double(double, double)>& dfda,
                 const std::function<double(double, double)>& dfdb) {
  BinaryPlan plan = make_plan(a, b, name);
  std::vector<double> out(plan.out_n);
  const std::vector<double>& av = a.data();
  const std::vector<double>& bv = b.data();
  for (std::size_t i = 0; i < plan.out_n; ++i)
    out[i] = f(av[plan.ia(i)], bv[plan.ib(i)]);
  return Tensor::make_op(
      std::move(out), plan.out_shape, {a, b},
      [a, b, plan, dfda, dfdb](const Tensor& o) {
        const std::vector<double>& go = o.grad();
        const std::vector<double>& av = a.data();
        const std::vector<double>& bv = b.data();
        if (a.requires_grad()) {
          std::vector<double> ga(a.numel(), 0.0);
          for (std::size_t i = 0; i < plan.out_n; ++i)
            ga[plan.ia(i)] += go[i] * dfda(av[plan.ia(i)], bv[plan.ib(i)]);
          a.accumulate_grad(ga);
        }
        if (b.requires_grad()) {
          std::vector<double> gb(b.numel(), 0.0);
          for (std::size_t i = 0; i < plan.out_n; ++i)
            gb[plan.ib(i)] += go[i] * dfdb(av[plan.ia(i)], bv[plan.ib(i)]);
          b.accumulate_grad(gb);
        }
      });
}

struct AxisSpan {
  std::size_t outer, n, inner;
};

AxisSpan axis_span(const Shape& shape, std::size_t axis, const char* name) {
  if (axis >= shape.size())
    throw std::invalid_argument(std::string(name) + ": axis out of range");
  AxisSpan s{1, shape[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  for (double y : b.data())
    if (y == 0.0) throw std::domain_error("div: zero denominator");
  return binary_op(
      a, b, "div", [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

namespace {

Tensor unary_op(const Tensor& x, const char* /*name*/,
                const std::function<double(double)>& f,
                const std::function<double(double, double)>& dfdx_from_x_y) {
  std::vector<double> out(x.numel());
  const std::vector<double>& xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(xv[i]);
  return Tensor::make_op(
      std::move(out), x.shape(), {x},
      [x, dfdx_from_x_y](const Tensor& o) {
        const std::vector<double>& go = o.grad();
        const std::vector<double>& xv = x.data();
        const std::vector<double>& yv = o.data();
        std::vector<double> gx(xv.size());
        for (std::size_t i = 0; i < gx.size(); ++i)
          gx[i] = go[i] * dfdx_from_x_y(xv[i], yv[i]);
        x.accumulate_grad(gx);
      });
}

}  // namespace

Tensor neg(const Tensor& x) {
  return unary_op(
      x, "neg", [](double v) { return -v; },
      [](double, double) { return -1.0; });
}

Tensor exp(const Tensor& x) {
  return unary_op(
      x, "exp", [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Tensor sqrt(const Tensor& x) {
  for (double v : x.data())
    if (v < 0.0) throw std::domain_error("sqrt: negative input");
  return unary_op(
      x, "sqrt", [](double v) { return std::sqrt(v); },
      [](double, double y) { return 0.5 / y; });
}

Tensor square(const Tensor& x) {
  return unary_op(
      x, "square", [](double v) { return v * v; },
      [](double v, double) { return 2.0 * v; });
}

Tensor tanh(const Tensor& x) {
  return unary_op(
      x, "tanh", [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor erf(const Tensor& x) {
  for (double v : x.data())
    if (std::isnan(v)) throw std::invalid_argument("erf: NaN input");
  return unary_op(
      x, "erf", [](double v) { return erf_value(v); },
      [](double v, double) { return erf_derivative(v); });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2)
    throw std::invalid_argument("matmul: operands must be 2-D");
  std::size_t m = a.shape()[0], k = a.shape()[1];
  std::size_t k2 = b.shape()[0], n = b.shape()[1];
  if (k != k2) throw std::invalid_argument("matmul: inner dimension mismatch");
  std::vector<double> out(m * n, 0.0);
  const std::vector<double>& av = a.data();
  const std::vector<double>& bv = b.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      double aip = av[i * k + p];
      for (std::size_t j = 0; j < n; ++j)
        out[i * n + j] += aip * bv[p * n + j];
    }
  return Tensor::make_op(
      std::move(out), {m, n}, {a, b}, [a, b, m, k, n](const Tensor& o) {
        const std::vector<double>& go = o.grad();
        const std::vector<double>& av = a.data();
        const std::vector<double>& bv = b.data();
        if (a.requires_grad()) {
          std::vector<double> ga(m * k, 0.0);  // ga = go . b^T
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
              double g = go[i * n + j];
              for (std::size_t p = 0; p < k; ++p)
                ga[i * k + p] += g * bv[p * n + j];
            }
          a.accumulate_grad(ga);
        }
        if (b.requires_grad()) {
          std::vector<double> gb(k * n, 0.0);  // gb = a^T . go
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t p = 0; p < k; ++p) {
              double apv = av[i * k + p];
              for (std::size_t j = 0; j < n; ++j)
                gb[p * n + j] += apv * go[i * n + j];
            }
          b.accumulate_grad(gb);
        }
      });
}

Tensor transpose(const Tensor& x) {
  if (x.shape().size() != 2)
    throw std::invalid_argument("transpose: operand must be 2-D");
  return permute(x, {1, 0});
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  AxisSpan s = axis_span(x.shape(), axis, "softmax");
  const std::vector<double>& xv = x.data();
  std::vector<double> out(xv.size());
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t in = 0; in < s.inner; ++in) {
      double hi = xv[(o * s.n) * s.inner + in];
      for (std::size_t j = 1; j < s.n; ++j)
        hi = std::max(hi, xv[(o * s.n + j) * s.inner + in]);
      double z = 0.0;
      for (std::size_t j = 0; j < s.n; ++j) {
        double e = std::exp(xv[(o * s.n + j) * s.inner + in] - hi);
        out[(o * s.n + j) * s.inner + in] = e;
        z += e;
      }
      for (std::size_t j = 0; j < s.n; ++j)
        out[(o * s.n + j) * s.inner + in] /= z;
    }
  return Tensor::make_op(
      std::move(out), x.shape(), {x}, [x, s](const Tensor& o) {
        // gx = y * (go - sum_axis(go * y))
        const std::vector<double>& go = o.grad();
        const std::vector<double>& yv = o.data();
        std::vector<double> gx(yv.size());
        for (std::size_t ot = 0; ot < s.outer; ++ot)
          for (std::size_t in = 0; in < s.inner; ++in) {
            double acc = 0.0;
            for (std::size_t j = 0; j < s.n; ++j) {
              std::size_t idx = (ot * s.n + j) * s.inner + in;
              acc += go[idx] * yv[idx];
            }
            for (std::size_t j = 0; j < s.n; ++j) {
              std::size_t idx = (ot * s.n + j) * s.inner + in;
              gx[idx] = yv[idx] * (go[idx] - acc);
            }
          }
        x.accumulate_grad(gx);
      });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return Tensor::make_op({total}, {1}, {x}, [x](const Tensor& o) {
    double g = o.grad()[0];
    std::vector<double> gx(x.numel(), g);
    x.accumulate_grad(gx);
  });
}

Tensor mean(const Tensor& x) {
  if (x.numel() == 0) throw std::invalid_argument("mean: empty tensor");
  return sum(x) / static_cast<double>(x.numel());
}

Tensor sum(const Tensor& x, std::size_t axis) {
  AxisSpan s = axis_span(x.shape(), axis, "sum");
  Shape out_shape;
  for (std::size_t i = 0; i < x.shape().size(); ++i)
    if (i != axis) out_shape.push_back(x.shape()[i]);
  if (out_shape.empty()) out_shape = {1};
  std::vector<double> out(s.outer * s.inner, 0.0);
  const std::vector<double>& xv = x.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t j = 0; j < s.n; ++j)
      for (std::size_t in = 0; in < s.inner; ++in)
        out[o * s.inner + in] += xv[(o * s.n + j) * s.inner + in];
  return Tensor::make_op(
      std::move(out), out_shape, {x}, [x, s](const Tensor& o) {
        const std::vector<double>& go = o.grad();
        std::vector<double> gx(x.numel());
        for (std::size_t ot = 0; ot < s.outer; ++ot)
          for (std::size_t j = 0; j < s.n; ++j)
            for (std::size_t in = 0; in < s.inner; ++in)
              gx[(ot * s.n + j) * s.inner + in] = go[ot * s.inner + in];
        x.accumulate_grad(gx);
      });
}

Tensor mean(const Tensor& x, std::size_t axis) {
  AxisSpan s = axis_span(x.shape(), axis, "mean");
  return sum(x, axis) / static_cast<double>(s.n);
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel())
    throw std::invalid_argument("reshape: element count mismatch");
  std::vector<double> out = x.data();
  return Tensor::make_op(std::move(out), std::move(shape), {x},
                         [x](const Tensor& o) { x.accumulate_grad(o.grad()); });
}

Tensor permute(const Tensor& x, const std::vector<std::size_t>& axes) {
  const Shape& in_shape = x.shape();
  std::size_t rank = in_shape.size();
  if (axes.size() != rank)
    throw std::invalid_argument("permute: axes length mismatch");
  std::vector<bool> seen(rank, false);
  for (std::size_t a : axes) {
    if (a >= rank || seen[a])
      throw std::invalid_argument("permute: invalid axis list");
    seen[a] = true;
  }
  Shape out_shape(rank);
  for (std::size_t i = 0; i < rank; ++i) out_shape[i] = in_shape[axes[i]];

  std::vector<std::size_t> in_strides(rank, 1), out_strides(rank, 1);
  for (std::size_t i = rank; i-- > 1;) {
    in_strides[i - 1] = in_strides[i] * in_shape[i];
    out_strides[i - 1] = out_strides[i] * out_shape[i];
  }
  // source[i] = flat input index contributing to flat output index i
  std::size_t n = x.numel();
  std::vector<std::size_t> source(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i, src = 0;
    for (std::size_t d = 0; d < rank; ++d) {
      std::size_t coord = rem / out_strides[d];
      rem %= out_strides[d];
      src += coord * in_strides[axes[d]];
    }
    source[i] = src;
  }
  const std::vector<double>& xv = x.data();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = xv[source[i]];
  return Tensor::make_op(
      std::move(out), std::move(out_shape), {x},
      [x, source](const Tensor& o) {
        const std::vector<double>& go = o.grad();
        std::vector<double> gx(x.numel());
        for (std::size_t i = 0; i < go.size(); ++i) gx[source[i]] = go[i];
        x.accumulate_grad(gx);
      });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw std::invalid_argument("concat: no operands");
  const Shape& first = parts[0].shape();
  std::size_t rank = first.size();
  if (axis >= rank) throw std::invalid_argument("concat: axis out of range");
  std::size_t total_axis = 0;
  for (const Tensor& t : parts) {
    if (t.shape().size() != rank)
      throw std::invalid_argument("concat: rank mismatch");
    for (std::size_t d = 0; d < rank; ++d)
      if (d != axis && t.shape()[d] != first[d])
        throw std::invalid_argument("concat: non-concat dimension mismatch");
    total_axis += t.shape()[axis];
  }
  Shape out_shape = first;
  out_shape[axis] = total_axis;
  AxisSpan s = axis_span(out_shape, axis, "concat");

  std::vector<double> out(shape_numel(out_shape));
  std::size_t base = 0;
  for (const Tensor& t : parts) {
    std::size_t tn = t.shape()[axis];
    const std::vector<double>& tv = t.data();
    for (std::size_t o = 0; o < s.outer; ++o) {
      const double* src = tv.data() + o * tn * s.inner;
      double* dst = out.data() + (o * s.n + base) * s.inner;
      std::copy(src, src + tn * s.inner, dst);
    }
    base += tn;
  }
  return Tensor::make_op(
      std::move(out), out_shape, parts, [parts, s](const Tensor& o) {
        const std::vector<double>& go = o.grad();
        std::size_t base = 0;
        for (const Tensor& t : parts) {
          std::size_t axis_len = t.numel() / (s.outer * s.inner);
          if (t.requires_grad()) {
            std::vector<double> gt(t.numel());
            for (std::size_t ot = 0; ot < s.outer; ++ot) {
              const double* src = go.data() + (ot * s.n + base) * s.inner;
              double* dst = gt.data() + ot * axis_len * s.inner;
              std::copy(src, src + axis_len * s.inner, dst);
            }
            t.accumulate_grad(gt);
          }
          base += axis_len;
        }
      });
}

Tensor slice_rows(const Tensor& x, std::size_t start, std::size_t count) {
  if (x.shape().size() != 2)
    throw std::invalid_argument("slice_rows: operand must be 2-D");
  std::size_t rows = x.shape()[0], cols = x.shape()[1];
  if (start + count > rows)
    throw std::invalid_argument("slice_rows: range out of bounds");
  const std::vector<double>& xv = x.data();
  std::vector<double> out(xv.begin() + start * cols,
                          xv.begin() + (start + count) * cols);
  return Tensor::make_op(
      std::move(out), {count, cols}, {x},
      [x, start, count, cols](const Tensor& o) {
        const std::vector<double>& go = o.grad();
        std::vector<double> gx(x.numel(), 0.0);
        std::copy(go.begin(), go.end(), gx.begin() + start * cols);
        x.accumulate_grad(gx);
      });
}

Tensor dot(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw std::invalid_argument("dot: shape mismatch");
  return sum(mul(a, b));
}

}  // namespace gmc
