#include "gmc/gccloss.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "gmc/corr.hpp"
#include "gmc/ops.hpp"
#include "gmc/rankest.hpp"

namespace gmc {

namespace {

constexpr double kDegenerateStd = 1e-12;

void warn(LossDiagnostics* diag, const std::string& message) {
  if (diag) {
    diag->warnings.push_back(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

bool is_constant(const Tensor& x) {
  double mean = 0.0;
  for (double v : x.data()) mean += v;
  mean /= double(x.numel());
  double sq = 0.0;
  for (double v : x.data()) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / double(x.numel())) < kDegenerateStd;
}

void require_pair(const Tensor& p, const Tensor& g, const char* name) {
  if (p.shape().size() != 1 || g.shape().size() != 1)
    throw std::invalid_argument(std::string(name) + ": scores must be rank-1");
  if (p.numel() != g.numel())
    throw std::invalid_argument(std::string(name) + ": length mismatch");
}

// Differentiable Pearson correlation via the covariance form; deliberately
// a different route than normalize_scores + dot, so the reformulation
// identity is checked across two genuinely distinct computations.
Tensor pearson_t(const Tensor& x, const Tensor& y) {
  Tensor dx = sub(x, mean(x));
  Tensor dy = sub(y, mean(y));
  Tensor num = dot(dx, dy);
  Tensor den = mul(gmc::sqrt(dot(dx, dx)), gmc::sqrt(dot(dy, dy)));
  return div(num, den);
}

}  // namespace

Tensor mse_loss(const Tensor& p, const Tensor& g) {
  require_pair(p, g, "mse_loss");
  if (p.numel() < 1) throw std::invalid_argument("mse_loss: empty input");
  return mean(square(sub(p, g)));
}

Tensor pgcc_loss(const Tensor& p, const Tensor& g, LossDiagnostics* diag) {
  require_pair(p, g, "pgcc_loss");
  if (p.numel() < 2) throw std::invalid_argument("pgcc_loss: need n >= 2");
  if (is_constant(p) || is_constant(g)) {
    if (diag) diag->pgcc_degenerate = true;
    warn(diag, "pgcc_loss: constant input, contributing 0");
    return Tensor::scalar(0.0);
  }
  return sub(Tensor::scalar(1.0), pearson_t(p, g));
}

Tensor sgcc_loss(const Tensor& p, const Tensor& g, LossDiagnostics* diag) {
  require_pair(p, g, "sgcc_loss");
  if (p.numel() < 2) throw std::invalid_argument("sgcc_loss: need n >= 2");
  EstimatedRanks rp = estimate_ranks(p);
  EstimatedRanks rg = estimate_ranks(g);
  if (rp.degenerate || rg.degenerate) {
    if (diag) diag->sgcc_degenerate = true;
    warn(diag, "sgcc_loss: constant input, contributing 0");
    return Tensor::scalar(0.0);
  }
  return sub(Tensor::scalar(1.0), pearson_t(rp.sigma, rg.sigma));
}

double pgcc_mse_identity_residual(const Tensor& p, const Tensor& g) {
  require_pair(p, g, "identity residual");
  if (is_constant(p) || is_constant(g))
    throw degenerate_input_error("identity residual: constant input");
  const double n = double(p.numel());

  const double pgcc = pgcc_loss(p.detach(), g.detach()).value();
  Tensor sp = normalize_scores(p.detach()).values;
  Tensor sg = normalize_scores(g.detach()).values;
  const double pgcc_via_mse = n / 2.0 * mse_loss(sp, sg).value();

  const double sgcc = sgcc_loss(p.detach(), g.detach()).value();
  Tensor rp = estimate_ranks(p.detach()).sigma;
  Tensor rg = estimate_ranks(g.detach()).sigma;
  Tensor srp = normalize_scores(rp).values;
  Tensor srg = normalize_scores(rg).values;
  const double sgcc_via_mse = n / 2.0 * mse_loss(srp, srg).value();

  return std::max(std::abs(pgcc - pgcc_via_mse),
                  std::abs(sgcc - sgcc_via_mse));
}

Tensor gmc_loss(const Tensor& p_batch, const Tensor& g_batch,
                const ScoreQueue& queue, const LossConfig& cfg,
                LossDiagnostics* diag) {
  require_pair(p_batch, g_batch, "gmc_loss");
  if (p_batch.numel() < 1)
    throw std::invalid_argument("gmc_loss: empty batch");

  Tensor batch_mse = mse_loss(p_batch, g_batch);

  ScoreQueue::Snapshot snap = queue.snapshot();
  const std::size_t combined = snap.preds.size() + p_batch.numel();
  if (combined < 2) {
    if (diag) diag->mse_fallback = true;
    warn(diag, "gmc_loss: fewer than two combined scores, using MSE only");
    return batch_mse;
  }

  Tensor pa = p_batch, ga = g_batch;
  if (!snap.preds.empty()) {
    Shape qs{snap.preds.size()};
    pa = concat({Tensor::from_vector(snap.preds, qs), p_batch}, 0);
    ga = concat({Tensor::from_vector(snap.gts, qs), g_batch}, 0);
  }

  // Terms with a zero coefficient are skipped outright; the SGCC term in
  // particular costs O(n^2) over the combined pool.
  Tensor factor = Tensor::scalar(cfg.gamma);
  if (cfg.alpha != 0.0)
    factor = add(factor, mul(Tensor::scalar(cfg.alpha), pgcc_loss(pa, ga, diag)));
  if (cfg.beta != 0.0)
    factor = add(factor, mul(Tensor::scalar(cfg.beta), sgcc_loss(pa, ga, diag)));
  return mul(factor, batch_mse);
}

}  // namespace gmc
