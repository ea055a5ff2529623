#pragma once

#include "gmc/tensor.hpp"

namespace gmc {

/// Scores centered to zero mean and scaled to unit L2 norm. When the input
/// is (numerically) constant the values are all zero and `degenerate` is set;
/// downstream losses decide how to react.
struct NormalizedScores {
  Tensor values;
  bool degenerate = false;
};

/// n x n matrix of pairwise preference probabilities:
/// h[i][j] = Phi(s_i - s_j), the probability that item i outranks item j.
/// Diagonal is exactly 0.5 and h[i][j] + h[j][i] == 1 up to rounding.
struct PreferenceMatrix {
  Tensor h;
};

/// Differentiable rank estimate sigma_i = (1/n) * sum_k h[i][k], one value
/// in (0, 1) per input, strictly increasing in the input order.
struct EstimatedRanks {
  Tensor sigma;
  bool degenerate = false;
};

/// s_i = (p_i - mean(p)) / ||p - mean(p)||_2. Differentiable. Requires a
/// rank-1 tensor of length >= 2.
NormalizedScores normalize_scores(const Tensor& p);

PreferenceMatrix preference_matrix(const NormalizedScores& s);

/// Row means of preference_matrix(normalize_scores(p)), fused into a single
/// O(n^2) time / O(n) memory op. Constant input yields all 0.5 with the
/// degenerate flag set (and no gradient), not an error.
EstimatedRanks estimate_ranks(const Tensor& p);

}  // namespace gmc
