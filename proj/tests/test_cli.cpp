#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmc/report_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out, err;
};

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "gmc_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = scratch_dir() / ("out_" + std::to_string(counter) + ".txt");
  fs::path err = scratch_dir() / ("err_" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string("\"") + GMC_CLI_PATH + "\" " + args + " >" +
                    out.string() + " 2>" + err.string();
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_scores(const std::string& name, const std::string& body) {
  fs::path p = scratch_dir() / name;
  spit(p, body);
  return p;
}

fs::path tiny_config() {
  static fs::path p = [] {
    fs::path path = scratch_dir() / "tiny_config.json";
    spit(path, R"({
      "dataset": {"n": 60, "d": 4, "noise_std": 3.0},
      "train": {"epochs": 2, "batch_size": 10, "queue_ratio": 0.5},
      "seeds": [1, 2, 3]
    })");
    return path;
  }();
  return p;
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

}  // namespace

TEST_CASE("metrics reports exact correlations as json") {
  fs::path perfect = write_scores("perfect.csv", "id,pred,gt\na,1,1\nb,2,2\nc,3,3\n");
  CliResult r = run_cli("metrics " + perfect.string());
  REQUIRE(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["n"] == 3);
  CHECK(doc["plcc"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["srocc"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

  fs::path swapped = write_scores("swapped.csv", "id,pred,gt\na,1,1\nb,2,3\nc,3,2\n");
  r = run_cli("metrics " + swapped.string());
  REQUIRE(r.code == 0);
  doc = json::parse(r.out);
  CHECK(std::abs(doc["plcc"].get<double>() - 0.5) < 1e-12);
  CHECK(std::abs(doc["srocc"].get<double>() - 0.5) < 1e-12);
}

TEST_CASE("metrics exit codes follow the documented table") {
  fs::path bad = write_scores("bad.csv", "id,pred,gt\na,one,2\n");
  CliResult r = run_cli("metrics " + bad.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("line 2") != std::string::npos);

  fs::path constant = write_scores("const.csv", "id,pred,gt\na,7,1\nb,7,2\n");
  r = run_cli("metrics " + constant.string());
  CHECK(r.code == 3);
  CHECK(r.err.find("pred") != std::string::npos);

  fs::path const_gt = write_scores("const_gt.csv", "id,pred,gt\na,1,9\nb,2,9\n");
  r = run_cli("metrics " + const_gt.string());
  CHECK(r.code == 3);
  CHECK(r.err.find("gt") != std::string::npos);

  fs::path empty = write_scores("empty.csv", "");
  CHECK(run_cli("metrics " + empty.string()).code == 2);

  fs::path single = write_scores("single.csv", "id,pred,gt\na,1,2\n");
  CHECK(run_cli("metrics " + single.string()).code == 2);

  CHECK(run_cli("metrics /nonexistent/file.csv").code == 2);
}

TEST_CASE("estimate-ranks prints one sigma row per input row") {
  fs::path two = write_scores("two.csv", "id,pred,gt\nlow,0,9\nhigh,1,8\n");
  CliResult r = run_cli("estimate-ranks " + two.string());
  REQUIRE(r.code == 0);

  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "id,sigma");
  std::vector<std::pair<std::string, double>> rows;
  while (std::getline(in, line)) {
    auto comma = line.find(',');
    rows.push_back({line.substr(0, comma), std::stod(line.substr(comma + 1))});
  }
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].first == "low");
  CHECK(std::abs(rows[0].second - 0.2893248) < 1e-6);
  CHECK(std::abs(rows[1].second - 0.7106752) < 1e-6);
  CHECK(r.err.find("sum(sigma)=1") != std::string::npos);
  CHECK(r.err.find("n/2=1") != std::string::npos);

  // ranking the gt column reverses the order
  r = run_cli("estimate-ranks " + two.string() + " --column gt");
  REQUIRE(r.code == 0);
  std::istringstream in2(r.out);
  std::getline(in2, line);  // header
  std::getline(in2, line);
  CHECK(std::abs(std::stod(line.substr(line.find(',') + 1)) - 0.7106752) <
        1e-6);
}

TEST_CASE("estimate-ranks on a constant column warns and emits 0.5 ranks") {
  fs::path constant =
      write_scores("const_ranks.csv", "id,pred,gt\na,4,1\nb,4,2\nc,4,3\n");
  CliResult r = run_cli("estimate-ranks " + constant.string());
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 4);
  CHECK(r.err.find("constant") != std::string::npos);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line))
    CHECK(line.substr(line.find(',') + 1) == "0.5");
}

TEST_CASE("check command passes on a clean build") {
  CliResult r = run_cli("check");
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("train writes a schema-valid report and identical rerun bytes") {
  fs::path out1 = scratch_dir() / "train1";
  fs::path out2 = scratch_dir() / "train2";
  CliResult r1 =
      run_cli("train " + tiny_config().string() + " --out " + out1.string());
  REQUIRE(r1.code == 0);
  CHECK(r1.out.find("trained gmc/mlp") != std::string::npos);
  CliResult r2 =
      run_cli("train " + tiny_config().string() + " --out " + out2.string());
  REQUIRE(r2.code == 0);

  json a = json::parse(slurp(out1 / "train_report.json"));
  json b = json::parse(slurp(out2 / "train_report.json"));
  a.erase("wall_seconds");
  b.erase("wall_seconds");
  CHECK(a.dump() == b.dump());
  CHECK(slurp(out1 / "train_curves.csv") == slurp(out2 / "train_curves.csv"));

  // one row per epoch plus the header
  CHECK(count_lines(slurp(out1 / "train_curves.csv")) == 2 + 1);

  json schema = json::parse(slurp(fs::path(GMC_SCHEMAS_DIR) / "train_report.schema.json"));
  json reread = json::parse(slurp(out1 / "train_report.json"));
  std::vector<std::string> violations =
      gmc::validate_against_schema(reread, schema);
  for (const std::string& v : violations) FAIL_CHECK(v);
  CHECK(violations.empty());
}

TEST_CASE("train with queue-ratio zero matches the dedicated no-queue loss") {
  fs::path out_q0 = scratch_dir() / "train_q0";
  fs::path out_nq = scratch_dir() / "train_nq";
  REQUIRE(run_cli("train " + tiny_config().string() +
                  " --loss gmc --queue-ratio 0 --out " + out_q0.string())
              .code == 0);
  REQUIRE(run_cli("train " + tiny_config().string() +
                  " --loss no_queue --out " + out_nq.string())
              .code == 0);
  CHECK(slurp(out_q0 / "train_curves.csv") ==
        slurp(out_nq / "train_curves.csv"));
}

TEST_CASE("train rejects bad configs and flags with exit 2") {
  fs::path bad = scratch_dir() / "bad_config.json";
  spit(bad, R"({"train": {"learning_rate": 0.1}})");
  CliResult r = run_cli("train " + bad.string() + " --out " +
                        (scratch_dir() / "never").string());
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown key") != std::string::npos);

  CHECK(run_cli("train /nonexistent/config.json").code == 2);
  CHECK(run_cli("train " + tiny_config().string() + " --loss l2").code == 2);
  CHECK(run_cli("train " + tiny_config().string() + " --queue-ratio 1.5")
            .code == 2);
}

TEST_CASE("suite runs arms and writes a schema-valid aggregate") {
  fs::path out = scratch_dir() / "suite_lc";
  CliResult r = run_cli("suite loss-compare " + tiny_config().string() +
                        " --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("arm mse") != std::string::npos);
  CHECK(r.out.find("arm gmc") != std::string::npos);

  json doc = json::parse(slurp(out / "suite_report.json"));
  REQUIRE(doc["arms"].size() == 2);
  CHECK(doc["arms"][0]["name"] == "mse");
  CHECK(doc["arms"][1]["name"] == "gmc");
  CHECK(doc["kind"] == "loss-compare");

  json schema = json::parse(slurp(fs::path(GMC_SCHEMAS_DIR) / "suite_report.schema.json"));
  std::vector<std::string> violations =
      gmc::validate_against_schema(doc, schema);
  for (const std::string& v : violations) FAIL_CHECK(v);
  CHECK(violations.empty());

  std::string csv = slurp(out / "suite_curves.csv");
  CHECK(csv.substr(0, csv.find('\n')) == "epoch,mse,gmc");
  CHECK(count_lines(csv) == 2 + 1);
}

TEST_CASE("suite rejects unknown kinds and too few seeds") {
  CHECK(run_cli("suite grid " + tiny_config().string()).code == 2);

  fs::path two_seeds = scratch_dir() / "two_seeds.json";
  spit(two_seeds, R"({"dataset": {"n": 60, "d": 4},
                      "train": {"epochs": 1, "batch_size": 10},
                      "seeds": [1, 2]})");
  CliResult r = run_cli("suite loss-compare " + two_seeds.string());
  CHECK(r.code == 2);
  CHECK(r.err.find("3 seeds") != std::string::npos);
}

TEST_CASE("bare invocation and unknown flags are input errors, help is not") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("metrics").code == 2);
  CHECK(run_cli("--bogus").code == 2);
  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("shipped configs all parse") {
  for (const char* name :
       {"train_default.json", "loss_compare.json", "lr_sweep.json",
        "queue_sweep.json", "ablation.json", "mal_sweep.json"}) {
    fs::path p = fs::path(GMC_CONFIGS_DIR) / name;
    INFO(p.string());
    CHECK_NOTHROW(gmc::load_experiment_config(p.string()));
  }
}
