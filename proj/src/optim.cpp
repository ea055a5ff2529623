#include "gmc/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gmc {

void adam_step(Tensor& param, AdamState& state, double lr,
               double weight_decay) {
  if (lr <= 0.0) throw std::invalid_argument("adam: lr must be > 0");
  std::size_t n = param.numel();
  if (state.first_moment.empty()) {
    state.first_moment.assign(n, 0.0);
    state.second_moment.assign(n, 0.0);
  }
  if (state.first_moment.size() != n || state.second_moment.size() != n)
    throw std::invalid_argument("adam: state size mismatch");

  const std::vector<double>& g = param.grad();
  std::vector<double>& p = param.data();
  std::vector<double>& m = state.first_moment;
  std::vector<double>& v = state.second_moment;
  ++state.step_count;
  double bc1 = 1.0 - std::pow(state.beta1, double(state.step_count));
  double bc2 = 1.0 - std::pow(state.beta2, double(state.step_count));
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
    v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
    double m_hat = m[i] / bc1;
    double v_hat = v[i] / bc2;
    p[i] -= lr * weight_decay * p[i];
    p[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

Adam::Adam(std::vector<Tensor> params)
    : params_(std::move(params)), states_(params_.size()) {}

void Adam::step(double lr, double weight_decay) {
  for (std::size_t i = 0; i < params_.size(); ++i)
    adam_step(params_[i], states_[i], lr, weight_decay);
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

double cosine_annealing_lr(std::int64_t step, std::int64_t period,
                           double base_lr) {
  if (period <= 0) throw std::invalid_argument("cosine lr: period must be > 0");
  if (step < 0) throw std::invalid_argument("cosine lr: step must be >= 0");
  double phase = double(step % period) / double(period);
  return base_lr * (1.0 + std::cos(std::numbers::pi * phase)) / 2.0;
}

}  // namespace gmc
