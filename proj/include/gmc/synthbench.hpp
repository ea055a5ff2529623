#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmc/gccloss.hpp"
#include "gmc/monet.hpp"
#include "gmc/tensor.hpp"

namespace gmc {

// Synthetic rank-regression benchmark: a frozen random teacher network maps
// standard-normal features to MOS values in [0, 100], observed under noise.
struct SyntheticDataset {
  std::size_t n = 0, d = 0;
  std::vector<double> features;  // row-major n x d
  std::vector<double> mos;       // observed scores, clamped to [0, 100]
  std::vector<std::size_t> train_idx, test_idx;  // disjoint 80/20 split
  std::uint64_t seed = 0;
};

SyntheticDataset generate_dataset(std::size_t n, std::size_t d,
                                  double noise_std, std::uint64_t seed);

// Rows of the feature matrix for the given sample indices, as a B x d tensor.
Tensor feature_rows(const SyntheticDataset& data,
                    const std::vector<std::size_t>& idx);

enum class LossKind { mse, gmc, pgcc_only, sgcc_only, no_queue };
enum class ModelKind { mlp, monet, simple };

std::string loss_kind_name(LossKind k);
std::string model_kind_name(ModelKind k);

struct TrainOptions {
  LossKind loss = LossKind::gmc;
  ModelKind model = ModelKind::mlp;
  std::size_t epochs = 60;
  std::size_t batch_size = 11;
  double lr = 1e-3;
  double weight_decay = 0.0;
  std::size_t lr_period = 50;  // cosine annealing restart period, in epochs
  double queue_ratio = 0.6;    // 0 disables the queue entirely
  LossConfig loss_cfg;
  MoNetConfig monet;  // used by the monet and simple models
  std::uint64_t seed = 1;
};

struct TrainReport {
  TrainOptions options;
  std::size_t n_train = 0, n_test = 0;
  std::vector<double> train_srocc, test_srocc;  // one entry per epoch
  std::vector<double> train_plcc, test_plcc;
  std::vector<double> train_loss;  // mean step loss per epoch
  std::vector<double> lr_schedule;
  std::vector<std::size_t> queue_lengths;  // one entry per step
  double final_train_srocc = 0, final_test_srocc = 0;
  double final_train_plcc = 0, final_test_plcc = 0;
  // First 1-based epoch whose test SROCC reaches 0.8; epochs+1 if never.
  std::size_t epochs_to_reach = 0;
  double wall_seconds = 0;
  std::vector<std::string> warnings;
};

TrainReport train(const SyntheticDataset& data, const TrainOptions& opt);

enum class SuiteKind { loss_compare, lr_sweep, queue_sweep, mal_sweep, ablation };

std::string suite_kind_name(SuiteKind k);

struct DatasetConfig {
  std::size_t n = 2500;
  std::size_t d = 16;
  double noise_std = 7.0;
};

struct ArmResult {
  std::string name;
  bool failed = false;
  std::string error;
  std::vector<TrainReport> runs;  // one per seed, in seed order
  double median_final_test_srocc = 0, median_final_test_plcc = 0;
  double spread_final_test_srocc = 0;  // max - min across seeds
  double median_epochs_to_reach = 0;
  std::vector<double> median_test_srocc_curve;  // per-epoch median over seeds
  std::vector<double> median_train_loss_curve;
};

struct SuiteResult {
  SuiteKind kind = SuiteKind::loss_compare;
  DatasetConfig dataset;
  std::vector<std::uint64_t> seeds;
  std::vector<ArmResult> arms;
};

// Runs every arm of the suite for every seed. Each seed regenerates the
// dataset, so arms are paired replications over independent splits. A run
// that throws marks its arm failed; the suite itself keeps going.
SuiteResult run_suite(SuiteKind kind, const DatasetConfig& dataset,
                      const TrainOptions& base,
                      const std::vector<std::uint64_t>& seeds);

}  // namespace gmc
