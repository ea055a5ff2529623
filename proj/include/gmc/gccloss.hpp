#pragma once

#include <string>
#include <vector>

#include "gmc/scorequeue.hpp"
#include "gmc/tensor.hpp"

namespace gmc {

/// Mixing weights of the composite objective:
/// (alpha * PGCC + beta * SGCC + gamma) * MSE.
struct LossConfig {
  double alpha = 0.5;
  double beta = 0.5;
  double gamma = 1.0;
};

/// Records the soft failure modes a loss evaluation hit. Losses downgrade
/// degenerate (constant) inputs to a zero contribution instead of aborting
/// a training step; callers inspect this to know it happened.
struct LossDiagnostics {
  bool pgcc_degenerate = false;
  bool sgcc_degenerate = false;
  bool mse_fallback = false;  // combined sequence too short for GCC terms
  std::vector<std::string> warnings;
};

/// (1/n) * sum (p_i - g_i)^2.
Tensor mse_loss(const Tensor& p, const Tensor& g);

/// 1 - pearson(p, g), in [0, 2]. Degenerate input contributes 0 instead
/// (flagged + warned), so a pathological batch cannot crash a step.
Tensor pgcc_loss(const Tensor& p, const Tensor& g,
                 LossDiagnostics* diag = nullptr);

/// 1 - pearson(estimated ranks of p, estimated ranks of g), in [0, 2].
/// Degenerate policy as pgcc_loss.
Tensor sgcc_loss(const Tensor& p, const Tensor& g,
                 LossDiagnostics* diag = nullptr);

/// Max absolute residual of the MSE reformulation of both GCC losses:
///   |pgcc(p,g) - (n/2) * mse(normalize(p), normalize(g))| and the same
/// with the estimated-rank vectors for the SGCC side. The two routes share
/// no intermediate past the primitive ops, so machine-level agreement is
/// evidence, not tautology. Degenerate input is an error here.
double pgcc_mse_identity_residual(const Tensor& p, const Tensor& g);

/// Composite objective over queue + batch:
///   [alpha * PGCC(Pa, Ga) + beta * SGCC(Pa, Ga) + gamma] * MSE(Pb, Gb)
/// where Pa/Ga prepend the queue snapshot (constants) to the batch.
/// Gradients reach only p_batch. Combined length < 2 falls back to plain
/// MSE with a warning.
Tensor gmc_loss(const Tensor& p_batch, const Tensor& g_batch,
                const ScoreQueue& queue, const LossConfig& cfg,
                LossDiagnostics* diag = nullptr);

}  // namespace gmc
