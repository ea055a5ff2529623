#pragma once

#include <cstddef>
#include <deque>
#include <vector>

namespace gmc {

/// Bounded FIFO of (prediction, ground truth) pairs from recent batches.
/// Predictions are plain doubles: whatever graph produced them is gone, so
/// queue contents can never carry gradients. Not thread-safe; owned by the
/// sequential training loop.
class ScoreQueue {
 public:
  explicit ScoreQueue(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Appends the batch newest-last, then evicts oldest-first down to
  /// capacity. preds and gts must have equal length.
  void push_batch(const std::vector<double>& preds,
                  const std::vector<double>& gts);

  struct Snapshot {
    std::vector<double> preds;
    std::vector<double> gts;
  };

  /// Value copy of the contents, oldest first. Later pushes do not affect
  /// a snapshot already taken.
  Snapshot snapshot() const;

 private:
  std::size_t capacity_;
  std::deque<std::pair<double, double>> entries_;
};

/// K = floor(r * dataset_size), clamped up to 1. Requires 0 < r <= 1 and
/// dataset_size >= 1.
std::size_t capacity_from_ratio(double r, std::size_t dataset_size);

}  // namespace gmc
