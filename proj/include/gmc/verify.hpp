#pragma once

#include <string>
#include <vector>

namespace gmc {

/// Outcome of one self-contained verification property. `detail` carries the
/// measured quantities (max residual, error, counts) so callers can print
/// one line per property; `seconds` is the wall time of the check itself.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Each check pins its own tolerances and sample counts; they take no
// configuration on purpose, so every caller verifies the same thing.

/// Dual-route agreement of both GCC losses with their (n/2)*MSE-of-normalized
/// form, across n in {2, 8, 64, 256}. Max residual must stay below 1e-10.
CheckResult check_reformulation_identity();

/// Analytic gradients of MSE, PGCC, SGCC, and GMC (nonempty queue) against
/// central finite differences; max relative error below 1e-6.
CheckResult check_loss_gradients();

/// Rank estimator on 1000 random strictly-distinct vectors (n=32): exact
/// argsort agreement, sum = n/2 within 1e-10, negation symmetry within 1e-12,
/// positive-affine invariance within 1e-12.
CheckResult check_rank_estimator_properties();

/// ScoreQueue contents equal a brute-force list model truncated to the K
/// most recent entries, over 10000 randomized push sequences.
CheckResult check_queue_list_model();

/// Independently seeded MALs (M in {3,4,5}, flattened weight dim >= 1000)
/// are near-orthogonal: all off-diagonal |cos| < 0.1 in >= 99% of 1000
/// random initializations.
CheckResult check_mal_diversity();

/// MoNet-toy integrity: shape contracts across the config sweep, softmax
/// rows sum to 1 within 1e-12, and an end-to-end finite-difference gradient
/// check on the scalar score below 1e-6.
CheckResult check_monet_integrity();

/// Frozen worked values: the two-point rank estimate, the pearson of a
/// minimal discordant triple, and the GMC loss with an empty queue at
/// default mixing weights.
CheckResult check_worked_values();

/// Informational only (always passes): measures the empirical gap between
/// pearson over rank estimates and exact spearman on random data.
CheckResult check_rank_gap_info();

/// The full fast set, in the order above.
std::vector<CheckResult> run_fast_checks();

}  // namespace gmc
