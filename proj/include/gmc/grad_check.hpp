#pragma once

#include <functional>

#include "gmc/tensor.hpp"

namespace gmc {

/// Compares the analytic gradient of a scalar-valued function against
/// central finite differences. Returns the maximum over coordinates of
/// |analytic - numeric| / max(1, |analytic|). The function is evaluated
/// fresh for every probe, so it must be deterministic.
/// Throws if any evaluation is non-finite.
double finite_difference_check(
    const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
    double eps = 1e-5);

}  // namespace gmc
