#include "gmc/corr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gmc {

namespace {

constexpr double kDegenerateStd = 1e-12;

void check_finite_pair(const std::vector<double>& x,
                       const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("correlation: length mismatch");
  if (x.size() < 2)
    throw std::invalid_argument("correlation: need at least two samples");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("correlation: non-finite value");
}

}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  check_finite_pair(x, y);
  const std::size_t n = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (std::sqrt(sxx / double(n)) < kDegenerateStd)
    throw degenerate_input_error("pearson: first argument is constant");
  if (std::sqrt(syy / double(n)) < kDegenerateStd)
    throw degenerate_input_error("pearson: second argument is constant");
  return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

std::vector<double> average_ranks(const std::vector<double>& x) {
  for (double v : x)
    if (!std::isfinite(v))
      throw std::invalid_argument("average_ranks: non-finite value");
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double shared = (double(i) + double(j)) / 2.0 + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  check_finite_pair(x, y);
  return pearson(average_ranks(x), average_ranks(y));
}

}  // namespace gmc
