#include "gmc/rankest.hpp"

#include <cmath>
#include <stdexcept>

#include "gmc/erf.hpp"
#include "gmc/ops.hpp"

namespace gmc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kDegenerateNorm = 1e-12;

void require_scores(const Tensor& p, const char* name) {
  if (p.shape().size() != 1)
    throw std::invalid_argument(std::string(name) + ": scores must be rank-1");
  if (p.numel() < 2)
    throw std::invalid_argument(std::string(name) +
                                ": need at least two scores");
  for (double v : p.data())
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(name) + ": non-finite score");
}

}  // namespace

NormalizedScores normalize_scores(const Tensor& p) {
  require_scores(p, "normalize_scores");
  Tensor dev = sub(p, mean(p));
  double norm_sq = 0.0;
  for (double v : dev.data()) norm_sq += v * v;
  if (std::sqrt(norm_sq) < kDegenerateNorm)
    return {Tensor::zeros(p.shape()), true};
  return {div(dev, gmc::sqrt(sum(square(dev)))), false};
}

PreferenceMatrix preference_matrix(const NormalizedScores& s) {
  const Tensor& sv = s.values;
  if (sv.shape().size() != 1 || sv.numel() < 2)
    throw std::invalid_argument("preference_matrix: invalid scores");
  const std::size_t n = sv.numel();
  const std::vector<double>& x = sv.data();
  std::vector<double> h(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i * n + i] = 0.5;
    for (std::size_t j = i + 1; j < n; ++j) {
      // Phi(b) = 0.5 + t and Phi(-b) = 0.5 - t, so rows pair up exactly.
      const double t = 0.5 * erf_value((x[i] - x[j]) * kInvSqrt2);
      h[i * n + j] = 0.5 + t;
      h[j * n + i] = 0.5 - t;
    }
  }
  Tensor out = Tensor::make_op(
      std::move(h), {n, n}, {sv}, [sv, n](const Tensor& o) {
        const std::vector<double>& gh = o.grad();
        const std::vector<double>& x = sv.data();
        std::vector<double> gs(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) {
            const double w = normal_pdf(x[i] - x[j]);
            const double pull = (gh[i * n + j] - gh[j * n + i]) * w;
            gs[i] += pull;
            gs[j] -= pull;
          }
        sv.accumulate_grad(gs);
      });
  return {out};
}

EstimatedRanks estimate_ranks(const Tensor& p) {
  require_scores(p, "estimate_ranks");
  NormalizedScores ns = normalize_scores(p);
  const std::size_t n = p.numel();
  if (ns.degenerate)
    return {Tensor::full({n}, 0.5), true};

  const Tensor& sv = ns.values;
  const std::vector<double>& x = sv.data();
  // Row means of the preference matrix without materializing it:
  // sigma_i = (1/n) [0.5 + sum_{j<i} (0.5 - t_ji) + sum_{j>i} (0.5 + t_ij)].
  std::vector<double> acc(n, 0.5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double t = 0.5 * erf_value((x[i] - x[j]) * kInvSqrt2);
      acc[i] += 0.5 + t;
      acc[j] += 0.5 - t;
    }
  const double inv_n = 1.0 / double(n);
  for (double& v : acc) v *= inv_n;

  Tensor sigma = Tensor::make_op(
      std::move(acc), {n}, {sv}, [sv, n, inv_n](const Tensor& o) {
        // d sigma_i / d s_i = (1/n) sum_{j != i} pdf(b_ij)
        // d sigma_i / d s_j = -(1/n) pdf(b_ij); pdf is symmetric in (i, j).
        const std::vector<double>& gsig = o.grad();
        const std::vector<double>& x = sv.data();
        std::vector<double> diag(n, 0.0);   // sum_j pdf(b_ij)
        std::vector<double> cross(n, 0.0);  // sum_j gsig_j * pdf(b_ij)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) {
            const double w = normal_pdf(x[i] - x[j]);
            diag[i] += w;
            diag[j] += w;
            cross[i] += gsig[j] * w;
            cross[j] += gsig[i] * w;
          }
        std::vector<double> gs(n);
        for (std::size_t i = 0; i < n; ++i)
          gs[i] = inv_n * (gsig[i] * diag[i] - cross[i]);
        sv.accumulate_grad(gs);
      });
  return {sigma, false};
}

}  // namespace gmc
