#pragma once

#include <stdexcept>
#include <vector>

namespace gmc {

/// Raised when a correlation is requested on (effectively) constant data:
/// sample standard deviation below 1e-12. Callers that must survive
/// pathological batches (the trainer) catch this and record NaN instead.
class degenerate_input_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pearson linear correlation. Requires equal lengths, n >= 2, and
/// non-constant inputs (else degenerate_input_error).
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// 1-based ranks; ties share the mean of the positions they occupy.
std::vector<double> average_ranks(const std::vector<double>& x);

/// Spearman rank correlation: pearson of the average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gmc
