#include <doctest.h>

#include <cmath>
#include <vector>

#include "gmc/corr.hpp"
#include "gmc/rng.hpp"

using namespace gmc;

TEST_CASE("pearson worked values") {
  CHECK(pearson({1, 2, 3}, {1, 3, 2}) == doctest::Approx(0.5).epsilon(1e-12));

  std::vector<double> x{0.4, 1.9, -2.2, 8.0};
  std::vector<double> neg;
  for (double v : x) neg.push_back(-v);
  CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("frozen reference cases with ties") {
  // Reference values cross-checked against two independent statistics
  // implementations.
  struct Case {
    std::vector<double> x, y;
    double plcc, srocc;
  };
  const Case cases[] = {
      {{3.2, 1.5, 4.8, 1.5, 2.0, 9.1},
       {10.0, 4.0, 12.0, 5.5, 5.5, 30.0},
       0.98768142045970908,
       0.95588235294117652},
      {{0.1, 0.2, 0.3, 0.4, 0.35, 0.05},
       {2.0, 8.0, 5.0, 7.0, 7.0, 1.0},
       0.78730853008819668,
       0.63774813921769324},
      {{5, 5, 5, 1, 2}, {9, 8, 7, 1, 3}, 0.97815684415905435,
       0.89442719099991586},
  };
  for (const Case& c : cases) {
    CHECK(std::abs(pearson(c.x, c.y) - c.plcc) < 1e-12);
    CHECK(std::abs(spearman(c.x, c.y) - c.srocc) < 1e-12);
  }
}

TEST_CASE("average ranks") {
  CHECK(average_ranks({10, 20, 20, 30}) ==
        std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(average_ranks({-3, 0, 5, 9}) == std::vector<double>{1, 2, 3, 4});
  CHECK(average_ranks({7, 7, 7}) == std::vector<double>{2, 2, 2});
  CHECK(average_ranks({}).empty());
  CHECK(average_ranks({4.5}) == std::vector<double>{1});
  CHECK_THROWS(average_ranks({1.0, std::nan("")}));
}

TEST_CASE("spearman worked values and rank invariance") {
  CHECK(spearman({1, 2, 3}, {3, 1, 2}) == doctest::Approx(-0.5).epsilon(1e-12));

  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x = rng.normal_vector(15);
    std::vector<double> y = rng.normal_vector(15);
    std::vector<double> cubed, neg;
    for (double v : x) cubed.push_back(v * v * v);  // strictly increasing map
    for (double v : x) neg.push_back(-v);
    CHECK(std::abs(spearman(x, cubed) - 1.0) < 1e-12);
    CHECK(std::abs(spearman(x, neg) + 1.0) < 1e-12);
    CHECK(std::abs(spearman(x, y) - spearman(cubed, y)) < 1e-12);
  }
}

TEST_CASE("affine invariance and symmetry") {
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> x = rng.normal_vector(12);
    std::vector<double> y = rng.normal_vector(12);
    const double a = rng.uniform(0.1, 5.0);
    const double c = rng.uniform(-10.0, 10.0);
    std::vector<double> ax_pos, ax_neg;
    for (double v : x) {
      ax_pos.push_back(a * v + c);
      ax_neg.push_back(-a * v + c);
    }
    const double base = pearson(x, y);
    CHECK(std::abs(pearson(ax_pos, y) - base) < 1e-12);
    CHECK(std::abs(pearson(ax_neg, y) + base) < 1e-12);
    CHECK(std::abs(pearson(x, y) - pearson(y, x)) < 1e-15);
    CHECK(std::abs(spearman(x, y) - spearman(y, x)) < 1e-15);
    CHECK(std::abs(base) <= 1.0 + 1e-12);
  }
}

TEST_CASE("error policy") {
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), degenerate_input_error);
  CHECK_THROWS_AS(pearson({1, 2, 3}, {4, 4, 4}), degenerate_input_error);
  CHECK_THROWS_AS(spearman({2, 2, 2}, {1, 2, 3}), degenerate_input_error);
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(pearson({1}, {2}), std::invalid_argument);
  CHECK_THROWS_AS(pearson({1, std::nan("")}, {1, 2}), std::invalid_argument);
  // Near-constant below the 1e-12 std threshold also counts as degenerate.
  CHECK_THROWS_AS(pearson({1.0, 1.0 + 1e-14, 1.0}, {1, 2, 3}),
                  degenerate_input_error);
}
