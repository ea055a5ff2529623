#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gmc/corr.hpp"
#include "gmc/rankest.hpp"
#include "gmc/report_io.hpp"
#include "gmc/score_file.hpp"
#include "gmc/synthbench.hpp"
#include "gmc/tensor.hpp"
#include "gmc/verify.hpp"

namespace {

// Exit codes: 0 ok, 1 property failure, 2 input error, 3 degenerate data.
constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kInputError = 2;
constexpr int kDegenerateData = 3;

bool is_constant(const std::vector<double>& v) {
  for (double x : v)
    if (x != v.front()) return false;
  return true;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

gmc::ScoreFile load_scores_or_exit(const std::string& path) {
  gmc::ScoreFile file = gmc::load_score_file(path);
  if (file.size() < 2) {
    std::fprintf(stderr, "error: %s: need at least 2 data rows, found %zu\n",
                 path.c_str(), file.size());
    std::exit(kInputError);
  }
  return file;
}

int cmd_metrics(const std::string& path) {
  gmc::ScoreFile file = load_scores_or_exit(path);
  const std::vector<double> preds = file.preds();
  const std::vector<double> gts = file.gts();
  for (const auto& [name, column] :
       {std::pair{"pred", &preds}, std::pair{"gt", &gts}}) {
    if (is_constant(*column)) {
      std::fprintf(stderr, "error: column '%s' is constant\n", name);
      return kDegenerateData;
    }
  }
  nlohmann::json out;
  out["n"] = file.size();
  out["plcc"] = gmc::pearson(preds, gts);
  out["srocc"] = gmc::spearman(preds, gts);
  std::printf("%s\n", out.dump().c_str());
  return kOk;
}

int cmd_estimate_ranks(const std::string& path, const std::string& column) {
  gmc::ScoreFile file = load_scores_or_exit(path);
  const std::vector<double> values =
      column == "gt" ? file.gts() : file.preds();
  const std::size_t n = values.size();
  gmc::EstimatedRanks ranks =
      gmc::estimate_ranks(gmc::Tensor::from_vector(values, gmc::Shape{n}));
  if (ranks.degenerate)
    std::fprintf(stderr,
                 "warning: column '%s' is constant; all ranks are 0.5\n",
                 column.c_str());

  const std::vector<double>& sigma = ranks.sigma.data();
  std::printf("id,sigma\n");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::printf("%s,%.17g\n", file.rows[i].id.c_str(), sigma[i]);
    sum += sigma[i];
  }
  std::fprintf(stderr, "sum(sigma)=%.17g expected n/2=%.17g\n", sum, n / 2.0);
  return kOk;
}

int cmd_check() {
  bool all_passed = true;
  for (const gmc::CheckResult& r : gmc::run_fast_checks()) {
    std::printf("%s  %s: %s  [%.2fs]\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.detail.c_str(), r.seconds);
    all_passed = all_passed && r.passed;
  }
  return all_passed ? kOk : kPropertyFailure;
}

int cmd_train(const std::string& config_path,
              const std::optional<std::string>& loss,
              const std::optional<std::uint64_t>& seed,
              const std::optional<double>& queue_ratio,
              const std::string& out_dir) {
  gmc::ExperimentConfig cfg = gmc::load_experiment_config(config_path);
  if (loss) cfg.train.loss = gmc::parse_loss_kind(*loss);
  if (seed) cfg.train.seed = *seed;
  if (queue_ratio) {
    if (*queue_ratio < 0.0 || *queue_ratio > 1.0)
      throw gmc::config_error("queue_ratio must be in [0, 1]");
    cfg.train.queue_ratio = *queue_ratio;
  }

  gmc::SyntheticDataset data = gmc::generate_dataset(
      cfg.dataset.n, cfg.dataset.d, cfg.dataset.noise_std, cfg.train.seed);
  gmc::TrainReport report = gmc::train(data, cfg.train);

  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_text_file(dir / "train_report.json",
                  gmc::train_report_to_json(report).dump(2) + "\n");
  write_text_file(dir / "train_curves.csv",
                  gmc::train_report_curves_csv(report));

  std::string reach =
      report.epochs_to_reach > report.options.epochs
          ? "never reached 0.8"
          : "reached 0.8 at epoch " + std::to_string(report.epochs_to_reach);
  std::printf(
      "trained %s/%s seed=%llu: final test srocc=%.4f plcc=%.4f %s; "
      "wrote %s\n",
      gmc::loss_kind_name(report.options.loss).c_str(),
      gmc::model_kind_name(report.options.model).c_str(),
      static_cast<unsigned long long>(report.options.seed),
      report.final_test_srocc, report.final_test_plcc, reach.c_str(),
      (dir / "train_report.json").string().c_str());
  return kOk;
}

int cmd_suite(const std::string& kind_name, const std::string& config_path,
              const std::string& out_dir) {
  gmc::SuiteKind kind = gmc::parse_suite_kind(kind_name);
  gmc::ExperimentConfig cfg = gmc::load_experiment_config(config_path);
  if (cfg.seeds.size() < 3)
    throw gmc::config_error("suite runs need at least 3 seeds, config has " +
                            std::to_string(cfg.seeds.size()));

  gmc::SuiteResult result = gmc::run_suite(kind, cfg.dataset, cfg.train,
                                           cfg.seeds);

  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_text_file(dir / "suite_report.json",
                  gmc::suite_result_to_json(result).dump(2) + "\n");
  write_text_file(dir / "suite_curves.csv", gmc::suite_curves_csv(result));

  bool any_ok = false;
  for (const gmc::ArmResult& arm : result.arms) {
    if (arm.failed) {
      std::printf("arm %-12s FAILED: %s\n", arm.name.c_str(),
                  arm.error.c_str());
      continue;
    }
    any_ok = true;
    std::printf(
        "arm %-12s median final test srocc=%.4f plcc=%.4f reach=%.1f "
        "(spread %.4f over %zu seeds)\n",
        arm.name.c_str(), arm.median_final_test_srocc,
        arm.median_final_test_plcc, arm.median_epochs_to_reach,
        arm.spread_final_test_srocc, result.seeds.size());
  }
  std::printf("wrote %s\n", (dir / "suite_report.json").string().c_str());
  return any_ok ? kOk : kPropertyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rank-sensitive regression toolkit: correlation metrics, "
               "differentiable rank estimation, GMC loss experiments"};
  app.require_subcommand(1);

  std::string score_path, column = "pred";
  std::string config_path, out_dir = ".", loss_name, suite_kind;
  std::optional<std::string> loss_opt;
  std::optional<std::uint64_t> seed_opt;
  std::optional<double> ratio_opt;
  std::uint64_t seed_value = 0;
  double ratio_value = 0.0;

  CLI::App* metrics =
      app.add_subcommand("metrics", "print {plcc, srocc, n} for a score CSV");
  metrics->add_option("file", score_path, "CSV with header id,pred,gt")
      ->required();

  CLI::App* ranks = app.add_subcommand(
      "estimate-ranks", "print differentiable rank estimates as CSV");
  ranks->add_option("file", score_path, "CSV with header id,pred,gt")
      ->required();
  ranks->add_option("--column", column, "which column to rank")
      ->check(CLI::IsMember({"pred", "gt"}));

  app.add_subcommand("check",
                     "run the identity, gradient, and invariant checks");

  CLI::App* train = app.add_subcommand("train", "train one model and write "
                                                "report JSON + curves CSV");
  train->add_option("config", config_path, "experiment config JSON")
      ->required();
  CLI::Option* train_loss =
      train->add_option("--loss", loss_name, "override the configured loss");
  CLI::Option* train_seed =
      train->add_option("--seed", seed_value, "override the configured seed");
  CLI::Option* train_ratio = train->add_option(
      "--queue-ratio", ratio_value, "override the configured queue ratio");
  train->add_option("--out", out_dir, "output directory");

  CLI::App* suite = app.add_subcommand(
      "suite", "run an experiment suite and write aggregate JSON + CSV");
  suite->add_option("kind", suite_kind,
                    "loss-compare | lr-sweep | queue-sweep | mal-sweep | "
                    "ablation")
      ->required();
  suite->add_option("config", config_path, "experiment config JSON")
      ->required();
  suite->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  if (*train_loss) loss_opt = loss_name;
  if (*train_seed) seed_opt = seed_value;
  if (*train_ratio) ratio_opt = ratio_value;

  try {
    if (metrics->parsed()) return cmd_metrics(score_path);
    if (ranks->parsed()) return cmd_estimate_ranks(score_path, column);
    if (app.get_subcommand("check")->parsed()) return cmd_check();
    if (train->parsed())
      return cmd_train(config_path, loss_opt, seed_opt, ratio_opt, out_dir);
    if (suite->parsed()) return cmd_suite(suite_kind, config_path, out_dir);
  } catch (const gmc::score_parse_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  } catch (const gmc::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  } catch (const gmc::degenerate_input_error& e) {
    std::fprintf(stderr, "error: degenerate data: %s\n", e.what());
    return kDegenerateData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  }
  return kInputError;
}
