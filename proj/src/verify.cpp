#include "gmc/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "gmc/corr.hpp"
#include "gmc/gccloss.hpp"
#include "gmc/grad_check.hpp"
#include "gmc/monet.hpp"
#include "gmc/ops.hpp"
#include "gmc/rankest.hpp"
#include "gmc/rng.hpp"
#include "gmc/scorequeue.hpp"

namespace gmc {

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Tensor random_vector(Rng& rng, std::size_t n, bool requires_grad = false) {
  return Tensor::from_vector(rng.normal_vector(n), Shape{n}, requires_grad);
}

}  // namespace

CheckResult check_reformulation_identity() {
  const auto t0 = clock_type::now();
  CheckResult res;
  res.name = "gcc losses equal their scaled-mse form";

  const double tol = 1e-10;
  double max_residual = 0.0;
  std::size_t instances = 0;
  Rng rng(20260816, 1);
  for (std::size_t n : {2u, 8u, 64u, 256u}) {
    for (int rep = 0; rep < 30; ++rep) {
      Tensor p = random_vector(rng, n);
      Tensor g = random_vector(rng, n);
      max_residual = std::max(max_residual, pgcc_mse_identity_residual(p, g));
      ++instances;
    }
  }
  res.passed = max_residual < tol;
  res.detail = "max residual " + fmt(max_residual) + " (tolerance " +
               fmt(tol) + ", " + std::to_string(instances) + " instances)";
  res.seconds = elapsed(t0);
  return res;
}

CheckResult check_loss_gradients() {
  const auto t0 = clock_type::now();
  CheckResult res;
  res.name = "loss gradients match finite differences";

  const double tol = 1e-6;
  double max_err = 0.0;
  std::size_t inputs = 0;
  Rng rng(20260816, 2);

  auto probe = [&](const std::function<Tensor(const Tensor&)>& f,
                   std::size_t n) {
    Tensor x = random_vector(rng, n, true);
    max_err = std::max(max_err, finite_difference_check(f, x));
    ++inputs;
  };

  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 4 + rng.below(9);  // 4..12
    Tensor g = random_vector(rng, n);
    probe([&](const Tensor& p) { return mse_loss(p, g); }, n);
    probe([&](const Tensor& p) { return pgcc_loss(p, g); }, n);
    probe([&](const Tensor& p) { return sgcc_loss(p, g); }, n);

    ScoreQueue queue(16);
    queue.push_batch(rng.normal_vector(8), rng.normal_vector(8));
    LossConfig cfg;
    probe([&](const Tensor& p) { return gmc_loss(p, g, queue, cfg); }, n);
  }

  res.passed = max_err < tol;
  res.detail = "max relative error " + fmt(max_err) + " (tolerance " +
               fmt(tol) + ", " + std::to_string(inputs) + " inputs)";
  res.seconds = elapsed(t0);
  return res;
}

CheckResult check_rank_estimator_properties() {
  const auto t0 = clock_type::now();
  CheckResult res;
  res.name = "rank estimator order, sum, and symmetry";

  const std::size_t n = 32;
  const double sum_tol = 1e-10, sym_tol = 1e-12;
  double worst_sum = 0.0, worst_neg = 0.0, worst_aff = 0.0;
  std::size_t order_mismatches = 0;
  Rng rng(20260816, 3);

  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> v = rng.normal_vector(n);
    std::sort(v.begin(), v.end());
    // strictly distinct by construction: spread any accidental ties apart
    for (std::size_t i = 1; i < n; ++i)
      if (v[i] <= v[i - 1]) v[i] = std::nextafter(v[i - 1], 1e300);
    rng.shuffle(v);

    Tensor p = Tensor::from_vector(v, Shape{n});
    EstimatedRanks r = estimate_ranks(p);
    std::vector<double> sigma = r.sigma.data();

    std::vector<std::size_t> order_v(n), order_s(n);
    std::iota(order_v.begin(), order_v.end(), 0);
    std::iota(order_s.begin(), order_s.end(), 0);
    std::sort(order_v.begin(), order_v.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::sort(order_s.begin(), order_s.end(),
              [&](std::size_t a, std::size_t b) { return sigma[a] < sigma[b]; });
    if (order_v != order_s) ++order_mismatches;

    double sum = std::accumulate(sigma.begin(), sigma.end(), 0.0);
    worst_sum = std::max(worst_sum, std::abs(sum - n / 2.0));

    std::vector<double> neg_v(n);
    for (std::size_t i = 0; i < n; ++i) neg_v[i] = -v[i];
    std::vector<double> neg_sigma =
        estimate_ranks(Tensor::from_vector(neg_v, Shape{n})).sigma.data();
    for (std::size_t i = 0; i < n; ++i)
      worst_neg = std::max(worst_neg, std::abs(neg_sigma[i] - (1 - sigma[i])));

    const double a = 0.1 + 9.9 * rng.uniform01();
    const double c = rng.uniform(-5.0, 5.0);
    std::vector<double> aff_v(n);
    for (std::size_t i = 0; i < n; ++i) aff_v[i] = a * v[i] + c;
    std::vector<double> aff_sigma =
        estimate_ranks(Tensor::from_vector(aff_v, Shape{n})).sigma.data();
    for (std::size_t i = 0; i < n; ++i)
      worst_aff = std::max(worst_aff, std::abs(aff_sigma[i] - sigma[i]));
  }

  res.passed = order_mismatches == 0 && worst_sum < sum_tol &&
               worst_neg < sym_tol && worst_aff < sym_tol;
  res.detail = "order mismatches " + std::to_string(order_mismatches) +
               ", sum error " + fmt(worst_sum) + " (<1e-10), negation " +
               fmt(worst_neg) + " (<1e-12), affine " + fmt(worst_aff) +
               " (<1e-12), 1000 vectors";
  res.seconds = elapsed(t0);
  return res;
}

CheckResult check_queue_list_model() {
  const auto t0 = clock_type::now();
  CheckResult res;
  res.name = "queue equals truncated list model";

  std::size_t mismatches = 0;
  Rng rng(20260816, 4);
  for (int seq = 0; seq < 10000; ++seq) {
    const std::size_t cap = 1 + rng.below(16);
    ScoreQueue queue(cap);
    std::vector<std::pair<double, double>> model;
    const std::size_t pushes = 1 + rng.below(8);
    for (std::size_t p = 0; p < pushes; ++p) {
      const std::size_t b = rng.below(6);
      std::vector<double> preds = rng.normal_vector(b);
      std::vector<double> gts = rng.normal_vector(b);
      queue.push_batch(preds, gts);
      for (std::size_t i = 0; i < b; ++i) model.push_back({preds[i], gts[i]});
      if (model.size() > cap)
        model.erase(model.begin(),
                    model.begin() + static_cast<long>(model.size() - cap));

      ScoreQueue::Snapshot snap = queue.snapshot();
      bool ok = snap.preds.size() == model.size();
      for (std::size_t i = 0; ok && i < model.size(); ++i)
        ok = snap.preds[i] == model[i].first && snap.gts[i] == model[i].second;
      if (!ok) ++mismatches;
    }
  }

  res.passed = mismatches == 0;
  res.detail = std::to_string(mismatches) +
               " mismatches over 10000 randomized sequences";
  res.seconds = elapsed(t0);
  return res;
}

CheckResult check_mal_diversity() {
  const auto t0 = clock_type::now();
  CheckResult res;
  res.name = "independently seeded mals near-orthogonal";

  MoNetConfig cfg;  // flattened per-MAL weight dim 3888 at defaults
  std::size_t dim = 0;
  Rng dim_rng(0, 10);
  for (const Tensor& t : mal_parameters(make_mal_weights(cfg, dim_rng)))
    dim += t.numel();
  if (dim < 1000) {
    res.passed = false;
    res.detail = "flattened weight dim " + std::to_string(dim) + " < 1000";
    res.seconds = elapsed(t0);
    return res;
  }

  const double cos_bound = 0.1, required = 0.99;
  double worst_rate = 1.0;
  std::ostringstream rates;
  for (std::size_t m : {3u, 4u, 5u}) {
    std::size_t good = 0;
    const std::size_t inits = 1000;
    for (std::size_t init = 0; init < inits; ++init) {
      std::vector<MalWeights> mals;
      mals.reserve(m);
      // one substream per MAL, as the full model builder seeds them
      for (std::size_t i = 0; i < m; ++i) {
        Rng mal_rng(9000 + init, 10 + i);
        mals.push_back(make_mal_weights(cfg, mal_rng));
      }
      bool all_small = true;
      for (std::size_t a = 0; a < m && all_small; ++a)
        for (std::size_t b = a + 1; b < m && all_small; ++b)
          all_small =
              std::abs(mal_weight_cosine_similarity(mals[a], mals[b])) <
              cos_bound;
      if (all_small) ++good;
    }
    const double rate = static_cast<double>(good) / inits;
    worst_rate = std::min(worst_rate, rate);
    rates << " m=" << m << ": " << fmt(100 * rate) << "%";
  }

  res.passed = worst_rate >= required;
  res.detail = "|cos| < 0.1 in" + rates.str() + " of 1000 inits (need >= 99%)";
  res.seconds = elapsed(t0);
  return res;
}

CheckResult check_monet_integrity() {
  const auto t0 = clock_type::now();
  CheckResult res;
  res.name = "monet shapes, softmax rows, end-to-end gradient";

  const double row_tol = 1e-12, grad_tol = 1e-6;
  double worst_row = 0.0;
  std::size_t shape_failures = 0, configs = 0;
  const std::size_t d_in = 6;

  for (std::size_t tokens : {4u, 16u})
    for (std::size_t embed : {4u, 8u})
      for (std::size_t levels : {2u, 4u})
        for (std::size_t mals = 1; mals <= 5; ++mals) {
          MoNetConfig cfg{tokens, embed, levels, mals};
          MoNetWeights w = make_monet_weights(d_in, cfg, 7 + configs);
          Tensor input = Tensor::from_vector(
              Rng(100 + configs, 1).normal_vector(tokens * d_in),
              Shape{tokens, d_in});
          std::vector<Tensor> attn;
          Tensor score = monet_forward(input, cfg, w, &attn);
          if (score.shape() != Shape{1} || !std::isfinite(score.value()))
            ++shape_failures;
          for (const Tensor& a : attn) {
            const Shape& s = a.shape();
            const std::vector<double>& v = a.data();
            for (std::size_t r = 0; r < s[0]; ++r) {
              double sum = 0.0;
              for (std::size_t c = 0; c < s[1]; ++c) sum += v[r * s[1] + c];
              worst_row = std::max(worst_row, std::abs(sum - 1.0));
            }
          }
          ++configs;
        }

  // end-to-end gradient on a small config, through every block
  MoNetConfig small{3, 4, 2, 2};
  MoNetWeights w = make_monet_weights(d_in, small, 42);
  Tensor x0 = Tensor::from_vector(Rng(43, 1).normal_vector(3 * d_in),
                                  Shape{3, d_in}, true);
  const double grad_err = finite_difference_check(
      [&](const Tensor& x) { return monet_forward(x, small, w); }, x0);

  res.passed =
      shape_failures == 0 && worst_row < row_tol && grad_err < grad_tol;
  res.detail = std::to_string(shape_failures) + " shape failures in " +
               std::to_string(configs) + " configs, softmax row error " +
               fmt(worst_row) + " (<1e-12), gradient error " + fmt(grad_err) +
               " (<1e-6)";
  res.seconds = elapsed(t0);
  return res;
}

CheckResult check_worked_values() {
  const auto t0 = clock_type::now();
  CheckResult res;
  res.name = "frozen worked values";

  const std::vector<double> sigma =
      estimate_ranks(Tensor::from_vector({0.0, 1.0}, Shape{2})).sigma.data();
  const double rank_err = std::max(std::abs(sigma[0] - 0.2893248),
                                   std::abs(sigma[1] - 0.7106752));

  const double p = pearson({1, 2, 3}, {1, 3, 2});
  const double pearson_err = std::abs(p - 0.5);

  ScoreQueue empty(4);
  Tensor gmc = gmc_loss(Tensor::from_vector({1, 2, 3}, Shape{3}),
                        Tensor::from_vector({1, 3, 2}, Shape{3}), empty,
                        LossConfig{});
  const double gmc_err = std::abs(gmc.value() - 1.0);

  res.passed =
      rank_err < 1e-6 && pearson_err < 1e-12 && gmc_err < 1e-10;
  res.detail = "two-point ranks off by " + fmt(rank_err) +
               " (<1e-6), pearson off by " + fmt(pearson_err) +
               " (<1e-12), empty-queue gmc off by " + fmt(gmc_err) +
               " (<1e-10)";
  res.seconds = elapsed(t0);
  return res;
}

CheckResult check_rank_gap_info() {
  const auto t0 = clock_type::now();
  CheckResult res;
  res.name = "rank-proxy correlation vs exact spearman (info)";

  double max_gap = 0.0;
  Rng rng(20260816, 6);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 8 + rng.below(57);  // 8..64
    std::vector<double> p = rng.normal_vector(n);
    std::vector<double> g = rng.normal_vector(n);
    std::vector<double> rp =
        estimate_ranks(Tensor::from_vector(p, Shape{n})).sigma.data();
    std::vector<double> rg =
        estimate_ranks(Tensor::from_vector(g, Shape{n})).sigma.data();
    max_gap = std::max(max_gap, std::abs(pearson(rp, rg) - spearman(p, g)));
  }

  res.passed = true;  // informational: quantifies the surrogate's distance
  res.detail = "max |pearson(ranks) - spearman| = " + fmt(max_gap) +
               " over 200 draws (no bound asserted)";
  res.seconds = elapsed(t0);
  return res;
}

std::vector<CheckResult> run_fast_checks() {
  return {check_reformulation_identity(), check_loss_gradients(),
          check_rank_estimator_properties(), check_queue_list_model(),
          check_mal_diversity(), check_monet_integrity(),
          check_worked_values(), check_rank_gap_info()};
}

}  // namespace gmc
