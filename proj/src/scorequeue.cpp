#include "gmc/scorequeue.hpp"

#include <cmath>
#include <stdexcept>

namespace gmc {

ScoreQueue::ScoreQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0)
    throw std::invalid_argument("ScoreQueue: capacity must be positive");
}

void ScoreQueue::push_batch(const std::vector<double>& preds,
                            const std::vector<double>& gts) {
  if (preds.size() != gts.size())
    throw std::invalid_argument("ScoreQueue: pred/gt length mismatch");
  for (std::size_t i = 0; i < preds.size(); ++i)
    entries_.emplace_back(preds[i], gts[i]);
  while (entries_.size() > capacity_) entries_.pop_front();
}

ScoreQueue::Snapshot ScoreQueue::snapshot() const {
  Snapshot snap;
  snap.preds.reserve(entries_.size());
  snap.gts.reserve(entries_.size());
  for (const auto& [pred, gt] : entries_) {
    snap.preds.push_back(pred);
    snap.gts.push_back(gt);
  }
  return snap;
}

std::size_t capacity_from_ratio(double r, std::size_t dataset_size) {
  if (!(r > 0.0) || r > 1.0)
    throw std::invalid_argument("queue ratio must be in (0, 1]");
  if (dataset_size < 1)
    throw std::invalid_argument("dataset size must be >= 1");
  const double k = std::floor(r * double(dataset_size));
  return k < 1.0 ? std::size_t{1} : std::size_t(k);
}

}  // namespace gmc
