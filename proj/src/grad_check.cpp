#include "gmc/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace gmc {

double finite_difference_check(
    const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
    double eps) {
  if (eps <= 0.0) throw std::invalid_argument("grad check: eps must be > 0");

  Tensor probe = Tensor::from_vector(x.data(), x.shape(), true);
  Tensor loss = f(probe);
  if (loss.numel() != 1)
    throw std::invalid_argument("grad check: f must return a scalar");
  if (!std::isfinite(loss.value()))
    throw std::domain_error("grad check: non-finite value at x");
  loss.backward();
  std::vector<double> analytic = probe.grad();

  auto eval = [&f](const std::vector<double>& values, const Shape& shape) {
    double v = f(Tensor::from_vector(values, shape, false)).value();
    if (!std::isfinite(v))
      throw std::domain_error("grad check: non-finite value near x");
    return v;
  };

  double worst = 0.0;
  std::vector<double> shifted = x.data();
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    double orig = shifted[i];
    shifted[i] = orig + eps;
    double hi = eval(shifted, x.shape());
    shifted[i] = orig - eps;
    double lo = eval(shifted, x.shape());
    shifted[i] = orig;
    double numeric = (hi - lo) / (2.0 * eps);
    double err = std::abs(analytic[i] - numeric) /
                 std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace gmc
