#include "gmc/synthbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

#include "gmc/corr.hpp"
#include "gmc/ops.hpp"
#include "gmc/optim.hpp"
#include "gmc/rng.hpp"
#include "gmc/scorequeue.hpp"

namespace gmc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kReachThreshold = 0.8;

double clamp01_100(double v) { return std::min(100.0, std::max(0.0, v)); }

}  // namespace

SyntheticDataset generate_dataset(std::size_t n, std::size_t d,
                                  double noise_std, std::uint64_t seed) {
  if (n < 10) throw std::invalid_argument("generate_dataset: n must be >= 10");
  if (d < 1) throw std::invalid_argument("generate_dataset: d must be >= 1");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw std::invalid_argument("generate_dataset: noise_std must be >= 0");

  SyntheticDataset data;
  data.n = n;
  data.d = d;
  data.seed = seed;
  data.features = Rng(seed, 20).normal_vector(n * d);

  // Frozen two-layer teacher: tanh hidden layer of width 8, linear readout.
  Rng teacher(seed, 21);
  const std::size_t h = 8;
  std::vector<double> w1 = teacher.normal_vector(h * d);
  std::vector<double> w2 = teacher.normal_vector(h);
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> latent(n);
  for (std::size_t i = 0; i < n; ++i) {
    double out = 0.0;
    for (std::size_t j = 0; j < h; ++j) {
      double pre = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        pre += w1[j * d + k] * data.features[i * d + k];
      out += w2[j] * std::tanh(pre * in_scale);
    }
    latent[i] = out;
  }

  const auto [lo_it, hi_it] = std::minmax_element(latent.begin(), latent.end());
  const double lo = *lo_it, range = *hi_it - *lo_it;
  Rng noise(seed, 23);
  data.mos.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double scaled = range < 1e-12 ? 50.0 : (latent[i] - lo) / range * 100.0;
    data.mos[i] = clamp01_100(scaled + noise_std * noise.normal());
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng(seed, 24).shuffle(order);
  const std::size_t n_train = n * 4 / 5;
  data.train_idx.assign(order.begin(), order.begin() + n_train);
  data.test_idx.assign(order.begin() + n_train, order.end());
  std::sort(data.train_idx.begin(), data.train_idx.end());
  std::sort(data.test_idx.begin(), data.test_idx.end());
  return data;
}

Tensor feature_rows(const SyntheticDataset& data,
                    const std::vector<std::size_t>& idx) {
  std::vector<double> rows(idx.size() * data.d);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= data.n)
      throw std::invalid_argument("feature_rows: index out of range");
    std::copy_n(data.features.begin() + idx[i] * data.d, data.d,
                rows.begin() + i * data.d);
  }
  return Tensor::from_vector(std::move(rows), Shape{idx.size(), data.d});
}

std::string loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::mse: return "mse";
    case LossKind::gmc: return "gmc";
    case LossKind::pgcc_only: return "pgcc_only";
    case LossKind::sgcc_only: return "sgcc_only";
    case LossKind::no_queue: return "no_queue";
  }
  return "unknown";
}

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::mlp: return "mlp";
    case ModelKind::monet: return "monet";
    case ModelKind::simple: return "simple";
  }
  return "unknown";
}

std::string suite_kind_name(SuiteKind k) {
  switch (k) {
    case SuiteKind::loss_compare: return "loss-compare";
    case SuiteKind::lr_sweep: return "lr-sweep";
    case SuiteKind::queue_sweep: return "queue-sweep";
    case SuiteKind::mal_sweep: return "mal-sweep";
    case SuiteKind::ablation: return "ablation";
  }
  return "unknown";
}

namespace {

struct Model {
  ModelKind kind = ModelKind::mlp;
  MoNetConfig cfg;
  // mlp: d -> 32 -> 16 -> 1 with tanh activations
  Tensor w1, b1, w2, b2, w3, b3;
  MoNetWeights monet;
  SimpleNetWeights simple;
  Tensor pos;  // frozen C x d token offsets feeding the attention models
  std::vector<Tensor> params;
};

Tensor init_dense(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<double> v = rng.normal_vector(rows * cols);
  const double s = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& x : v) x *= s;
  return Tensor::from_vector(std::move(v), Shape{rows, cols}, true);
}

Model make_model(const TrainOptions& opt, std::size_t d) {
  Model m;
  m.kind = opt.model;
  m.cfg = opt.monet;
  if (opt.model == ModelKind::mlp) {
    Rng rng(opt.seed, 3);
    m.w1 = init_dense(d, 32, rng);
    m.b1 = Tensor::zeros({32}, true);
    m.w2 = init_dense(32, 16, rng);
    m.b2 = Tensor::zeros({16}, true);
    m.w3 = init_dense(16, 1, rng);
    m.b3 = Tensor::zeros({1}, true);
    m.params = {m.w1, m.b1, m.w2, m.b2, m.w3, m.b3};
    return m;
  }
  m.pos = Tensor::from_vector(Rng(opt.seed, 500).normal_vector(m.cfg.tokens * d),
                              Shape{m.cfg.tokens, d});
  if (opt.model == ModelKind::monet) {
    m.monet = make_monet_weights(d, m.cfg, opt.seed);
    m.params = monet_parameters(m.monet);
  } else {
    m.simple = make_simple_weights(d, m.cfg, opt.seed);
    m.params = simple_parameters(m.simple);
  }
  return m;
}

Tensor predict(const Model& m, const SyntheticDataset& data,
               const std::vector<std::size_t>& idx) {
  if (m.kind == ModelKind::mlp) {
    Tensor x = feature_rows(data, idx);
    Tensor h1 = tanh(add(matmul(x, m.w1), m.b1));
    Tensor h2 = tanh(add(matmul(h1, m.w2), m.b2));
    return reshape(add(matmul(h2, m.w3), m.b3), {idx.size()});
  }
  std::vector<Tensor> scores;
  scores.reserve(idx.size());
  for (std::size_t i : idx) {
    Tensor row = feature_rows(data, {i});  // 1 x d, broadcast over tokens
    Tensor tokens = add(m.pos, row);
    scores.push_back(m.kind == ModelKind::monet
                         ? monet_forward(tokens, m.cfg, m.monet)
                         : simple_forward(tokens, m.cfg, m.simple));
  }
  return concat(scores, 0);
}

std::vector<double> predict_values(const Model& m, const SyntheticDataset& data,
                                   const std::vector<std::size_t>& idx) {
  // Chunked so evaluation of a large split does not hold one giant graph.
  std::vector<double> out;
  out.reserve(idx.size());
  std::vector<std::size_t> chunk;
  for (std::size_t start = 0; start < idx.size(); start += 256) {
    chunk.assign(idx.begin() + start,
                 idx.begin() + std::min(idx.size(), start + 256));
    Tensor pred = predict(m, data, chunk);
    out.insert(out.end(), pred.data().begin(), pred.data().end());
  }
  return out;
}

bool arm_uses_queue(LossKind k) {
  return k == LossKind::gmc || k == LossKind::pgcc_only ||
         k == LossKind::sgcc_only;
}

Tensor compute_loss(const Tensor& pred, const Tensor& gt,
                    const ScoreQueue& queue, const TrainOptions& opt,
                    LossDiagnostics* diag) {
  LossConfig cfg = opt.loss_cfg;
  switch (opt.loss) {
    case LossKind::mse:
      return mse_loss(pred, gt);
    case LossKind::pgcc_only:
      cfg.beta = 0.0;
      break;
    case LossKind::sgcc_only:
      cfg.alpha = 0.0;
      break;
    case LossKind::gmc:
    case LossKind::no_queue:
      break;
  }
  return gmc_loss(pred, gt, queue, cfg, diag);
}

void note_warning(TrainReport& report, const std::string& msg) {
  for (const std::string& w : report.warnings)
    if (w == msg) return;
  report.warnings.push_back(msg);
}

double metric_or_nan(const std::function<double()>& fn, TrainReport& report,
                     const char* label) {
  try {
    double v = fn();
    return v;
  } catch (const degenerate_input_error&) {
    note_warning(report, std::string(label) + ": degenerate predictions");
    return kNaN;
  } catch (const std::invalid_argument& e) {
    note_warning(report, std::string(label) + ": " + e.what());
    return kNaN;
  }
}

}  // namespace

TrainReport train(const SyntheticDataset& data, const TrainOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (opt.batch_size < 1)
    throw std::invalid_argument("train: batch_size must be >= 1");
  if (opt.queue_ratio < 0.0 || opt.queue_ratio > 1.0)
    throw std::invalid_argument("train: queue_ratio must be in [0, 1]");
  const std::size_t n_train = data.train_idx.size();
  if (opt.batch_size > n_train)
    throw std::invalid_argument("train: batch_size exceeds the train split");

  TrainReport report;
  report.options = opt;
  report.n_train = n_train;
  report.n_test = data.test_idx.size();

  // Models regress raw MOS. Keeping the target scale matters for the GMC
  // dynamics: the correlation factor multiplies the batch MSE, so a large
  // early MSE amplifies the rank-pressure gradient exactly while predictions
  // are still far from the score scale.
  const std::vector<double>& target = data.mos;

  Model model = make_model(opt, data.d);
  Adam optimizer(model.params);

  const bool with_queue = arm_uses_queue(opt.loss) && opt.queue_ratio > 0.0;
  ScoreQueue queue(with_queue ? capacity_from_ratio(opt.queue_ratio, n_train)
                              : 1);

  std::vector<std::size_t> order = data.train_idx;
  Rng order_rng(opt.seed, 2);
  const std::size_t steps = n_train / opt.batch_size;

  LossDiagnostics diag;
  std::vector<std::size_t> batch(opt.batch_size);
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    const double lr = cosine_annealing_lr(epoch, opt.lr_period, opt.lr);
    report.lr_schedule.push_back(lr);
    order_rng.shuffle(order);

    double loss_sum = 0.0;
    for (std::size_t s = 0; s < steps; ++s) {
      batch.assign(order.begin() + s * opt.batch_size,
                   order.begin() + (s + 1) * opt.batch_size);
      Tensor pred = predict(model, data, batch);
      std::vector<double> gt(opt.batch_size);
      for (std::size_t i = 0; i < batch.size(); ++i) gt[i] = target[batch[i]];
      Tensor gt_t = Tensor::from_vector(gt, Shape{opt.batch_size});

      Tensor loss = compute_loss(pred, gt_t, queue, opt, &diag);
      loss_sum += loss.value();
      optimizer.zero_grad();
      loss.backward();
      optimizer.step(lr, opt.weight_decay);

      if (with_queue) queue.push_batch(pred.data(), gt);
      report.queue_lengths.push_back(queue.size());
    }
    report.train_loss.push_back(loss_sum / static_cast<double>(steps));

    std::vector<double> train_pred = predict_values(model, data, data.train_idx);
    std::vector<double> test_pred = predict_values(model, data, data.test_idx);
    std::vector<double> train_gt, test_gt;
    for (std::size_t i : data.train_idx) train_gt.push_back(data.mos[i]);
    for (std::size_t i : data.test_idx) test_gt.push_back(data.mos[i]);

    report.train_srocc.push_back(metric_or_nan(
        [&] { return spearman(train_pred, train_gt); }, report, "train srocc"));
    report.test_srocc.push_back(metric_or_nan(
        [&] { return spearman(test_pred, test_gt); }, report, "test srocc"));
    report.train_plcc.push_back(metric_or_nan(
        [&] { return pearson(train_pred, train_gt); }, report, "train plcc"));
    report.test_plcc.push_back(metric_or_nan(
        [&] { return pearson(test_pred, test_gt); }, report, "test plcc"));
  }

  for (const std::string& w : diag.warnings) note_warning(report, w);
  report.final_train_srocc = report.train_srocc.back();
  report.final_test_srocc = report.test_srocc.back();
  report.final_train_plcc = report.train_plcc.back();
  report.final_test_plcc = report.test_plcc.back();

  report.epochs_to_reach = opt.epochs + 1;
  for (std::size_t e = 0; e < report.test_srocc.size(); ++e)
    if (report.test_srocc[e] >= kReachThreshold) {
      report.epochs_to_reach = e + 1;
      break;
    }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

namespace {

double median_finite(std::vector<double> v) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double spread_finite(std::vector<double> v) {
  std::erase_if(v, [](double x) { return !std::isfinite(x); });
  if (v.empty()) return kNaN;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

struct ArmSpec {
  std::string name;
  std::function<void(TrainOptions&)> adjust;
};

std::string format_lr(double lr) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", lr);
  return buf;
}

std::vector<ArmSpec> suite_arms(SuiteKind kind) {
  std::vector<ArmSpec> arms;
  switch (kind) {
    case SuiteKind::loss_compare:
      arms.push_back({"mse", [](TrainOptions& o) { o.loss = LossKind::mse; }});
      arms.push_back({"gmc", [](TrainOptions& o) { o.loss = LossKind::gmc; }});
      break;
    case SuiteKind::lr_sweep:
      for (double lr : {1e-4, 1e-5, 1e-6})
        for (LossKind loss : {LossKind::mse, LossKind::gmc})
          arms.push_back({loss_kind_name(loss) + "@" + format_lr(lr),
                          [lr, loss](TrainOptions& o) {
                            o.lr = lr;
                            o.loss = loss;
                          }});
      break;
    case SuiteKind::queue_sweep:
      for (double r : {0.2, 0.4, 0.6, 0.8}) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "queue@%.1f", r);
        arms.push_back({buf, [r](TrainOptions& o) {
                          o.loss = LossKind::gmc;
                          o.queue_ratio = r;
                        }});
      }
      break;
    case SuiteKind::mal_sweep:
      for (std::size_t m = 1; m <= 5; ++m)
        arms.push_back({"mal@" + std::to_string(m), [m](TrainOptions& o) {
                          o.model = ModelKind::monet;
                          o.monet.mals = m;
                        }});
      break;
    case SuiteKind::ablation:
      arms.push_back({"full", [](TrainOptions& o) { o.loss = LossKind::gmc; }});
      arms.push_back(
          {"w/o SGCC", [](TrainOptions& o) { o.loss = LossKind::pgcc_only; }});
      arms.push_back(
          {"w/o PGCC", [](TrainOptions& o) { o.loss = LossKind::sgcc_only; }});
      arms.push_back(
          {"w/o GCC", [](TrainOptions& o) { o.loss = LossKind::mse; }});
      arms.push_back(
          {"w/o queue", [](TrainOptions& o) { o.loss = LossKind::no_queue; }});
      // Architecture ablation; reported alongside but model-side. The queue
      // is shrunk to keep this report-only arm cheap.
      arms.push_back({"w/o MAL", [](TrainOptions& o) {
                        o.loss = LossKind::gmc;
                        o.model = ModelKind::simple;
                        o.queue_ratio = std::min(o.queue_ratio, 0.1);
                      }});
      break;
  }
  return arms;
}

}  // namespace

SuiteResult run_suite(SuiteKind kind, const DatasetConfig& dataset,
                      const TrainOptions& base,
                      const std::vector<std::uint64_t>& seeds) {
  if (seeds.size() < 3)
    throw std::invalid_argument("run_suite: need at least 3 seeds");

  SuiteResult result;
  result.kind = kind;
  result.dataset = dataset;
  result.seeds = seeds;

  for (const ArmSpec& spec : suite_arms(kind)) {
    ArmResult arm;
    arm.name = spec.name;
    for (std::uint64_t seed : seeds) {
      try {
        SyntheticDataset data =
            generate_dataset(dataset.n, dataset.d, dataset.noise_std, seed);
        TrainOptions opt = base;
        spec.adjust(opt);
        opt.seed = seed;
        arm.runs.push_back(train(data, opt));
      } catch (const std::exception& e) {
        arm.failed = true;
        arm.error = e.what();
        break;
      }
    }

    std::vector<double> finals, plccs, reaches;
    for (const TrainReport& r : arm.runs) {
      finals.push_back(r.final_test_srocc);
      plccs.push_back(r.final_test_plcc);
      reaches.push_back(static_cast<double>(r.epochs_to_reach));
    }
    arm.median_final_test_srocc = median_finite(finals);
    arm.median_final_test_plcc = median_finite(plccs);
    arm.spread_final_test_srocc = spread_finite(finals);
    arm.median_epochs_to_reach = median_finite(reaches);
    if (!arm.runs.empty()) {
      const std::size_t epochs = arm.runs.front().test_srocc.size();
      for (std::size_t e = 0; e < epochs; ++e) {
        std::vector<double> col, losses;
        for (const TrainReport& r : arm.runs) {
          col.push_back(r.test_srocc[e]);
          losses.push_back(r.train_loss[e]);
        }
        arm.median_test_srocc_curve.push_back(median_finite(col));
        arm.median_train_loss_curve.push_back(median_finite(losses));
      }
    }
    result.arms.push_back(std::move(arm));
  }
  return result;
}

}  // namespace gmc
