#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gmc/erf.hpp"
#include "gmc/grad_check.hpp"
#include "gmc/ops.hpp"
#include "gmc/optim.hpp"
#include "gmc/rng.hpp"
#include "gmc/tensor.hpp"

using namespace gmc;

namespace {

Tensor t1(std::vector<double> v, bool rg = false) {
  Shape s{v.size()};
  return Tensor::from_vector(std::move(v), s, rg);
}

}  // namespace

TEST_CASE("erf matches correctly rounded reference values") {
  // Reference: system libm / published tables, good to < 1 ulp.
  const struct {
    double x, y;
  } table[] = {
      {0.0, 0.0},
      {0.1, 0.1124629160182849},
      {0.25, 0.2763263901682369},
      {0.5, 0.5204998778130465},
      {1.0, 0.8427007929497149},
      {1.5, 0.9661051464753108},
      {1.75, 0.9866716712191824},
      {2.0, 0.9953222650189527},
      {2.5, 0.999593047982555},
      {3.0, 0.9999779095030014},
      {4.0, 0.9999999845827421},
      {5.0, 0.9999999999984626},
  };
  for (const auto& row : table) {
    CHECK(std::abs(erf_value(row.x) - row.y) < 1e-13);
    CHECK(std::abs(erf_value(-row.x) + row.y) < 1e-13);
  }
}

TEST_CASE("erf is exactly odd and within 1e-12 of libm on a dense grid") {
  for (int i = -6500; i <= 6500; i += 7) {
    double x = i / 1000.0;
    CHECK(erf_value(-x) == -erf_value(x));
    CHECK(std::abs(erf_value(x) - std::erf(x)) < 1e-12);
  }
  CHECK(erf_value(0.0) == 0.0);
  CHECK(erf_value(8.0) == 1.0);
  CHECK(erf_value(-8.0) == -1.0);
}

TEST_CASE("erf derivative and normal helpers") {
  CHECK(std::abs(erf_derivative(0.0) - 1.1283791670955126) < 1e-15);
  CHECK(std::abs(erf_derivative(1.0) - 0.4151074974205947) < 1e-15);
  CHECK(std::abs(normal_cdf(0.0) - 0.5) < 1e-15);
  // Phi(b) + Phi(-b) pairs to exactly 1 by construction.
  for (double b : {0.013, 0.5, 1.25, 3.0})
    CHECK(normal_cdf(b) + normal_cdf(-b) == 1.0);
  CHECK(std::abs(normal_pdf(0.0) - 0.3989422804014327) < 1e-15);
}

TEST_CASE("tensor construction and invariants") {
  Tensor z = Tensor::zeros({2, 3});
  CHECK(z.numel() == 6);
  CHECK(z.shape() == Shape{2, 3});
  CHECK_FALSE(z.requires_grad());

  Tensor f = Tensor::full({2}, 7.5);
  CHECK(f.data() == std::vector<double>{7.5, 7.5});

  CHECK(Tensor::scalar(3.0).value() == 3.0);
  CHECK_THROWS(Tensor::from_vector({1, 2, 3}, {2, 2}, false));
  CHECK_THROWS((void)Tensor::from_vector({1, 2}, {2}, false).value());

  Tensor x = t1({1, 2}, true);
  Tensor d = x.detach();
  CHECK_FALSE(d.requires_grad());
  CHECK(d.data() == x.data());
  CHECK_FALSE(d.same_node(x));
}

TEST_CASE("elementwise forward values") {
  CHECK(add(t1({1, 2}), t1({3, 4})).data() == std::vector<double>{4, 6});
  CHECK(mul(t1({2, 3}), Tensor::scalar(0.0)).data() ==
        std::vector<double>{0, 0});
  CHECK(gmc::sqrt(t1({4, 9})).data() == std::vector<double>{2, 3});
  CHECK(sub(t1({5, 1}), t1({2, 2})).data() == std::vector<double>{3, -1});
  CHECK(div(t1({6, 9}), t1({2, 3})).data() == std::vector<double>{3, 3});
  CHECK(neg(t1({1, -2})).data() == std::vector<double>{-1, 2});
  CHECK(square(t1({3, -4})).data() == std::vector<double>{9, 16});
  CHECK_THROWS(add(t1({1, 2}), t1({1, 2, 3})));
  CHECK_THROWS(div(t1({1}), Tensor::scalar(0.0)));
  CHECK_THROWS(gmc::sqrt(t1({-1})));
  CHECK_THROWS(gmc::erf(t1({std::nan("")})));
}

TEST_CASE("sqrt backward matches closed form") {
  Tensor x = t1({4, 9}, true);
  sum(gmc::sqrt(x)).backward();
  CHECK(x.grad()[0] == doctest::Approx(0.25));
  CHECK(x.grad()[1] == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("row-vector broadcast forward and backward") {
  Tensor m = Tensor::from_vector({1, 2, 3, 4, 5, 6}, {2, 3}, true);
  Tensor b = t1({10, 20, 30}, true);
  Tensor out = add(m, b);
  CHECK(out.data() == std::vector<double>{11, 22, 33, 14, 25, 36});
  sum(out).backward();
  CHECK(m.grad() == std::vector<double>(6, 1.0));
  CHECK(b.grad() == std::vector<double>{2, 2, 2});  // summed over rows

  Tensor s = Tensor::scalar(2.0, true);
  Tensor prod = mul(m, s);
  sum(prod).backward();
  CHECK(s.grad()[0] == doctest::Approx(21.0));  // sum of m

  // Two single-element operands keep the higher-rank shape.
  Tensor one_by_one = Tensor::from_vector({3.0}, {1, 1});
  CHECK((one_by_one * 2.0).shape() == Shape{1, 1});
  CHECK((2.0 * one_by_one).shape() == Shape{1, 1});
  CHECK(mul(Tensor::scalar(2.0), one_by_one).value() == 6.0);
}

TEST_CASE("matmul forward and backward identities") {
  Tensor eye = Tensor::from_vector({1, 0, 0, 1}, {2, 2});
  Tensor a = Tensor::from_vector({1, 2, 3, 4}, {2, 2}, true);
  CHECK(matmul(eye, a).data() == std::vector<double>{1, 2, 3, 4});

  Tensor b = Tensor::from_vector({5, 6, 7, 8}, {2, 2}, true);
  Tensor c = matmul(a, b);
  CHECK(c.data() == std::vector<double>{19, 22, 43, 50});

  sum(c).backward();
  // d sum(AB) / dA = ones . B^T ; rows are [sum b row 0, sum b row 1]
  CHECK(a.grad() == std::vector<double>{11, 15, 11, 15});
  CHECK(b.grad() == std::vector<double>{4, 4, 6, 6});
  CHECK_THROWS(matmul(a, Tensor::from_vector({1, 2, 3}, {3, 1})));
}

TEST_CASE("softmax values, shift invariance, simplex property") {
  Tensor u = softmax(t1({0, 0}), 0);
  CHECK(u.data()[0] == doctest::Approx(0.5).epsilon(1e-14));

  Tensor v = softmax(t1({0.0, std::log(3.0)}), 0);
  CHECK(v.data()[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(v.data()[1] == doctest::Approx(0.75).epsilon(1e-12));

  Rng rng(11);
  Tensor x = Tensor::from_vector(rng.normal_vector(12), {3, 4});
  Tensor y = softmax(x, 1);
  Tensor y_shift = softmax(add(x, Tensor::scalar(17.25)), 1);
  for (std::size_t r = 0; r < 3; ++r) {
    double row = 0.0;
    for (std::size_t cidx = 0; cidx < 4; ++cidx) {
      double p = y.data()[r * 4 + cidx];
      CHECK(p >= 0.0);
      CHECK(std::abs(p - y_shift.data()[r * 4 + cidx]) < 1e-12);
      row += p;
    }
    CHECK(std::abs(row - 1.0) < 1e-12);
  }
  Tensor col = softmax(x, 0);
  for (std::size_t cidx = 0; cidx < 4; ++cidx) {
    double colsum = 0.0;
    for (std::size_t r = 0; r < 3; ++r) colsum += col.data()[r * 4 + cidx];
    CHECK(std::abs(colsum - 1.0) < 1e-12);
  }
}

TEST_CASE("reductions forward and backward") {
  CHECK(mean(t1({2, 4, 6})).value() == doctest::Approx(4.0));

  Tensor x = t1({1, 2, 3, 4}, true);
  mean(x).backward();
  CHECK(x.grad() == std::vector<double>(4, 0.25));

  Tensor m = Tensor::from_vector({1, 2, 3, 4, 5, 6}, {2, 3}, true);
  Tensor cols = sum(m, 0);
  CHECK(cols.data() == std::vector<double>{5, 7, 9});
  Tensor rows = mean(m, 1);
  CHECK(rows.data() == std::vector<double>{2, 5});
  sum(cols).backward();
  CHECK(m.grad() == std::vector<double>(6, 1.0));
  CHECK_THROWS(sum(m, 2));
}

TEST_CASE("permute round trip is bit-exact and reshape tracks gradients") {
  // C x D x N stack -> D x (C*N) and back, the layout used by the
  // channel-wise attention branch.
  const std::size_t C = 3, D = 4, N = 2;
  Rng rng(5);
  Tensor x = Tensor::from_vector(rng.normal_vector(C * D * N), {C, D, N}, true);
  Tensor moved = reshape(permute(x, {1, 0, 2}), {D, C * N});
  CHECK(moved.shape() == Shape{D, C * N});
  Tensor back = permute(reshape(moved, {D, C, N}), {1, 0, 2});
  CHECK(back.data() == x.data());

  sum(mul(back, back)).backward();
  for (std::size_t i = 0; i < x.numel(); ++i)
    CHECK(x.grad()[i] == doctest::Approx(2.0 * x.data()[i]));
  CHECK_THROWS(permute(x, {0, 1}));
  CHECK_THROWS(permute(x, {0, 0, 1}));
}

TEST_CASE("concat and slice_rows") {
  CHECK(concat({t1({1, 2}), t1({3})}, 0).data() ==
        std::vector<double>{1, 2, 3});

  Tensor a = Tensor::from_vector({1, 2, 3, 4}, {2, 2}, true);
  Tensor b = Tensor::from_vector({5, 6}, {2, 1}, true);
  Tensor cat = concat({a, b}, 1);
  CHECK(cat.shape() == Shape{2, 3});
  CHECK(cat.data() == std::vector<double>{1, 2, 5, 3, 4, 6});
  sum(mul(cat, cat)).backward();
  CHECK(a.grad() == std::vector<double>{2, 4, 6, 8});
  CHECK(b.grad() == std::vector<double>{10, 12});

  Tensor rows = slice_rows(cat, 1, 1);
  CHECK(rows.data() == std::vector<double>{3, 4, 6});
  Tensor c = Tensor::from_vector({1, 2, 3, 4, 5, 6}, {3, 2}, true);
  sum(slice_rows(c, 0, 2)).backward();
  CHECK(c.grad() == std::vector<double>{1, 1, 1, 1, 0, 0});
  CHECK_THROWS(slice_rows(c, 2, 2));
  CHECK_THROWS(concat({a, b}, 0));  // column counts differ

}

TEST_CASE("backward basics") {
  Tensor x = Tensor::scalar(3.0, true);
  square(x).backward();
  CHECK(x.grad()[0] == doctest::Approx(6.0));

  // A tensor used twice accumulates both contributions.
  Tensor y = Tensor::scalar(2.0, true);
  add(mul(y, y), y).backward();
  CHECK(y.grad()[0] == doctest::Approx(5.0));

  // Unreachable leaves read as zero.
  Tensor z = Tensor::scalar(1.0, true);
  CHECK(z.grad() == std::vector<double>{0.0});

  CHECK_THROWS(t1({1, 2}, true).backward());
  CHECK_THROWS(Tensor::scalar(1.0, false).backward());
}

TEST_CASE("no-grad graphs are pruned") {
  Tensor a = t1({1, 2});
  Tensor out = mul(a, a);
  CHECK_FALSE(out.requires_grad());
}

TEST_CASE("finite differences agree with analytic gradients") {
  Rng rng(42);

  auto quad = [](const Tensor& x) { return sum(square(x)); };
  CHECK(finite_difference_check(quad, t1(rng.normal_vector(8))) < 1e-6);

  auto constant = [](const Tensor& x) {
    return mul(sum(x), Tensor::scalar(0.0));
  };
  CHECK(finite_difference_check(constant, t1(rng.normal_vector(4))) < 1e-10);

  // Composite touching most ops: erf, tanh, exp, softmax, matmul, layout.
  auto composite = [](const Tensor& x) {
    Tensor m = reshape(x, {3, 4});
    Tensor w = Tensor::from_vector(
        {0.3, -0.2, 0.5, 0.1, -0.4, 0.2, 0.7, -0.1, 0.05, 0.6, -0.3, 0.15},
        {4, 3});
    Tensor h = gmc::tanh(matmul(m, w));
    Tensor a = softmax(h, 1);
    Tensor e = gmc::erf(mul(a, Tensor::scalar(1.5)));
    Tensor g = gmc::exp(mul(mean(e), Tensor::scalar(0.7)));
    return add(g, mean(gmc::sqrt(add(square(m), Tensor::scalar(1.0)))));
  };
  for (int trial = 0; trial < 20; ++trial)
    CHECK(finite_difference_check(composite, t1(rng.normal_vector(12))) <
          1e-6);
}

TEST_CASE("adam first step and invariances") {
  // First step: m_hat = g, v_hat = g^2, update = -lr * g / (|g| + eps).
  Tensor p = Tensor::scalar(0.25, true);
  sum(p).backward();  // grad = 1
  AdamState st;
  adam_step(p, st, 1e-5);
  CHECK(std::abs(p.data()[0] - (0.25 - 1e-5 / (1.0 + st.epsilon))) < 1e-15);
  CHECK(std::abs(p.data()[0] - (0.25 - 1e-5)) < 2e-13);
  CHECK(st.step_count == 1);

  // Zero grad, zero weight decay: parameter unchanged.
  Tensor q = Tensor::scalar(1.5, true);
  AdamState st2;
  adam_step(q, st2, 1e-3);
  CHECK(q.data()[0] == 1.5);

  // Determinism: identical seeds give bit-identical trajectories.
  auto run = [] {
    Rng rng(7);
    Tensor w = t1(rng.normal_vector(6), true);
    AdamState st;
    for (int step = 0; step < 25; ++step) {
      w.zero_grad();
      Tensor target = t1({1, 2, 3, 4, 5, 6});
      mean(square(sub(w, target))).backward();
      adam_step(w, st, cosine_annealing_lr(step, 50, 1e-2), 1e-5);
    }
    return w.data();
  };
  CHECK(run() == run());
}

TEST_CASE("cosine annealing schedule") {
  CHECK(cosine_annealing_lr(0, 50, 1e-3) == doctest::Approx(1e-3));
  CHECK(cosine_annealing_lr(25, 50, 1e-3) == doctest::Approx(5e-4));
  CHECK(cosine_annealing_lr(49, 50, 1e-3) ==
        doctest::Approx(1e-3 * (1 + std::cos(std::numbers::pi * 49.0 / 50.0)) /
                        2));
  CHECK(cosine_annealing_lr(50, 50, 1e-3) == doctest::Approx(1e-3));  // restart
  CHECK_THROWS(cosine_annealing_lr(1, 0, 1e-3));
}

TEST_CASE("rng determinism and distribution sanity") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng s0(9, 0), s1(9, 1);
  bool differ = false;
  for (int i = 0; i < 8; ++i) differ |= (s0.next_u64() != s1.next_u64());
  CHECK(differ);

  Rng r(77);
  for (int i = 0; i < 1000; ++i) {
    double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(13) < 13);
  }

  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
  Rng sh(3);
  sh.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});

  // Box-Muller sample mean/std sanity on 20k draws.
  Rng n(2024);
  double sum = 0.0, sq = 0.0;
  const int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) {
    double x = n.normal();
    sum += x;
    sq += x * x;
  }
  double mean = sum / kDraws;
  double var = sq / kDraws - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}
