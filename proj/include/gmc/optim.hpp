#pragma once

#include <cstdint>
#include <vector>

#include "gmc/tensor.hpp"

namespace gmc {

/// Per-parameter Adam moment buffers. Allocated on first use and required
/// to match the parameter size afterwards.
struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One Adam update with bias correction. Weight decay is decoupled: applied
/// directly to the parameter, not mixed into the moment estimates.
void adam_step(Tensor& param, AdamState& state, double lr,
               double weight_decay = 0.0);

/// Convenience wrapper owning the state for a whole parameter list.
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params);

  void step(double lr, double weight_decay = 0.0);
  void zero_grad();
  const std::vector<Tensor>& params() const { return params_; }

 private:
  std::vector<Tensor> params_;
  std::vector<AdamState> states_;
};

/// Cosine-annealing schedule with restarts every `period` steps:
/// lr = base_lr * (1 + cos(pi * (step mod period) / period)) / 2.
double cosine_annealing_lr(std::int64_t step, std::int64_t period,
                           double base_lr);

}  // namespace gmc
