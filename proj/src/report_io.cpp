#include "gmc/report_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gmc {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& scope) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const std::string& k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw config_error("unknown key '" + it.key() + "' in " + scope);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw config_error(std::string("key '") + key + "' has the wrong type");
  }
}

void read_positive(const json& obj, const char* key, std::size_t& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer() || it->get<long long>() <= 0)
    throw config_error(std::string("key '") + key +
                       "' must be a positive integer");
  out = it->get<std::size_t>();
}

void read_finite(const json& obj, const char* key, double& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number() || !std::isfinite(it->get<double>()))
    throw config_error(std::string("key '") + key +
                       "' must be a finite number");
  out = it->get<double>();
}

MoNetConfig parse_monet(const json& obj) {
  require_keys(obj, {"tokens", "embed", "levels", "mals"}, "monet");
  MoNetConfig cfg;
  read_positive(obj, "tokens", cfg.tokens);
  read_positive(obj, "embed", cfg.embed);
  read_positive(obj, "levels", cfg.levels);
  read_positive(obj, "mals", cfg.mals);
  return cfg;
}

TrainOptions parse_train(const json& obj) {
  require_keys(obj,
               {"loss", "model", "epochs", "batch_size", "lr", "weight_decay",
                "lr_period", "queue_ratio", "alpha", "beta", "gamma", "monet",
                "seed"},
               "train");
  TrainOptions opt;
  if (auto it = obj.find("loss"); it != obj.end())
    opt.loss = parse_loss_kind(it->get<std::string>());
  if (auto it = obj.find("model"); it != obj.end())
    opt.model = parse_model_kind(it->get<std::string>());
  read_positive(obj, "epochs", opt.epochs);
  read_positive(obj, "batch_size", opt.batch_size);
  read_finite(obj, "lr", opt.lr);
  read_finite(obj, "weight_decay", opt.weight_decay);
  read_positive(obj, "lr_period", opt.lr_period);
  read_finite(obj, "queue_ratio", opt.queue_ratio);
  read_finite(obj, "alpha", opt.loss_cfg.alpha);
  read_finite(obj, "beta", opt.loss_cfg.beta);
  read_finite(obj, "gamma", opt.loss_cfg.gamma);
  if (auto it = obj.find("monet"); it != obj.end()) {
    if (!it->is_object()) throw config_error("key 'monet' must be an object");
    opt.monet = parse_monet(*it);
  }
  if (auto it = obj.find("seed"); it != obj.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 0)
      throw config_error("key 'seed' must be a non-negative integer");
    opt.seed = it->get<std::uint64_t>();
  }
  return opt;
}

DatasetConfig parse_dataset(const json& obj) {
  require_keys(obj, {"n", "d", "noise_std"}, "dataset");
  DatasetConfig cfg;
  read_positive(obj, "n", cfg.n);
  read_positive(obj, "d", cfg.d);
  read_finite(obj, "noise_std", cfg.noise_std);
  if (cfg.noise_std < 0) throw config_error("noise_std must be >= 0");
  return cfg;
}

json curve(const std::vector<double>& v) { return json(v); }

}  // namespace

LossKind parse_loss_kind(const std::string& name) {
  for (LossKind k : {LossKind::mse, LossKind::gmc, LossKind::pgcc_only,
                     LossKind::sgcc_only, LossKind::no_queue})
    if (loss_kind_name(k) == name) return k;
  throw config_error("unknown loss kind '" + name + "'");
}

ModelKind parse_model_kind(const std::string& name) {
  for (ModelKind k : {ModelKind::mlp, ModelKind::monet, ModelKind::simple})
    if (model_kind_name(k) == name) return k;
  throw config_error("unknown model kind '" + name + "'");
}

SuiteKind parse_suite_kind(const std::string& name) {
  for (SuiteKind k : {SuiteKind::loss_compare, SuiteKind::lr_sweep,
                      SuiteKind::queue_sweep, SuiteKind::mal_sweep,
                      SuiteKind::ablation})
    if (suite_kind_name(k) == name) return k;
  throw config_error("unknown suite kind '" + name + "'");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw config_error("config root must be an object");
  require_keys(root, {"dataset", "train", "seeds"}, "config");

  ExperimentConfig cfg;
  if (auto it = root.find("dataset"); it != root.end()) {
    if (!it->is_object()) throw config_error("'dataset' must be an object");
    cfg.dataset = parse_dataset(*it);
  }
  if (auto it = root.find("train"); it != root.end()) {
    if (!it->is_object()) throw config_error("'train' must be an object");
    cfg.train = parse_train(*it);
  }
  if (auto it = root.find("seeds"); it != root.end()) {
    if (!it->is_array() || it->empty())
      throw config_error("'seeds' must be a non-empty array");
    cfg.seeds.clear();
    for (const json& s : *it) {
      if (!s.is_number_integer() || s.get<long long>() < 0)
        throw config_error("'seeds' entries must be non-negative integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str());
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  const TrainOptions& t = cfg.train;
  return json{
      {"dataset",
       {{"n", cfg.dataset.n},
        {"d", cfg.dataset.d},
        {"noise_std", cfg.dataset.noise_std}}},
      {"train",
       {{"loss", loss_kind_name(t.loss)},
        {"model", model_kind_name(t.model)},
        {"epochs", t.epochs},
        {"batch_size", t.batch_size},
        {"lr", t.lr},
        {"weight_decay", t.weight_decay},
        {"lr_period", t.lr_period},
        {"queue_ratio", t.queue_ratio},
        {"alpha", t.loss_cfg.alpha},
        {"beta", t.loss_cfg.beta},
        {"gamma", t.loss_cfg.gamma},
        {"monet",
         {{"tokens", t.monet.tokens},
          {"embed", t.monet.embed},
          {"levels", t.monet.levels},
          {"mals", t.monet.mals}}},
        {"seed", t.seed}}},
      {"seeds", cfg.seeds}};
}

nlohmann::json train_report_to_json(const TrainReport& r) {
  const TrainOptions& t = r.options;
  return json{
      {"options",
       {{"loss", loss_kind_name(t.loss)},
        {"model", model_kind_name(t.model)},
        {"epochs", t.epochs},
        {"batch_size", t.batch_size},
        {"lr", t.lr},
        {"weight_decay", t.weight_decay},
        {"lr_period", t.lr_period},
        {"queue_ratio", t.queue_ratio},
        {"alpha", t.loss_cfg.alpha},
        {"beta", t.loss_cfg.beta},
        {"gamma", t.loss_cfg.gamma},
        {"monet",
         {{"tokens", t.monet.tokens},
          {"embed", t.monet.embed},
          {"levels", t.monet.levels},
          {"mals", t.monet.mals}}},
        {"seed", t.seed}}},
      {"n_train", r.n_train},
      {"n_test", r.n_test},
      {"curves",
       {{"train_srocc", curve(r.train_srocc)},
        {"test_srocc", curve(r.test_srocc)},
        {"train_plcc", curve(r.train_plcc)},
        {"test_plcc", curve(r.test_plcc)},
        {"train_loss", curve(r.train_loss)},
        {"lr", curve(r.lr_schedule)}}},
      {"queue_lengths", r.queue_lengths},
      {"final",
       {{"train_srocc", r.final_train_srocc},
        {"test_srocc", r.final_test_srocc},
        {"train_plcc", r.final_train_plcc},
        {"test_plcc", r.final_test_plcc}}},
      {"epochs_to_reach", r.epochs_to_reach},
      {"wall_seconds", r.wall_seconds},
      {"warnings", r.warnings}};
}

nlohmann::json suite_result_to_json(const SuiteResult& s) {
  json arms = json::array();
  for (const ArmResult& a : s.arms) {
    json runs = json::array();
    for (const TrainReport& r : a.runs) runs.push_back(train_report_to_json(r));
    arms.push_back(json{{"name", a.name},
                        {"failed", a.failed},
                        {"error", a.error},
                        {"median_final_test_srocc", a.median_final_test_srocc},
                        {"median_final_test_plcc", a.median_final_test_plcc},
                        {"spread_final_test_srocc", a.spread_final_test_srocc},
                        {"median_epochs_to_reach", a.median_epochs_to_reach},
                        {"median_test_srocc_curve", a.median_test_srocc_curve},
                        {"median_train_loss_curve", a.median_train_loss_curve},
                        {"runs", runs}});
  }
  return json{{"kind", suite_kind_name(s.kind)},
              {"dataset",
               {{"n", s.dataset.n},
                {"d", s.dataset.d},
                {"noise_std", s.dataset.noise_std}}},
              {"seeds", s.seeds},
              {"arms", arms}};
}

std::string train_report_curves_csv(const TrainReport& r) {
  std::ostringstream out;
  out << "epoch,train_srocc,test_srocc,train_plcc,test_plcc,train_loss,lr\n";
  out.precision(17);
  for (std::size_t e = 0; e < r.train_srocc.size(); ++e)
    out << (e + 1) << ',' << r.train_srocc[e] << ',' << r.test_srocc[e] << ','
        << r.train_plcc[e] << ',' << r.test_plcc[e] << ',' << r.train_loss[e]
        << ',' << r.lr_schedule[e] << '\n';
  return out.str();
}

std::string suite_curves_csv(const SuiteResult& s) {
  std::ostringstream out;
  out << "epoch";
  std::size_t epochs = 0;
  for (const ArmResult& a : s.arms) {
    out << ',' << a.name;
    epochs = std::max(epochs, a.median_test_srocc_curve.size());
  }
  out << '\n';
  out.precision(17);
  for (std::size_t e = 0; e < epochs; ++e) {
    out << (e + 1);
    for (const ArmResult& a : s.arms) {
      out << ',';
      if (e < a.median_test_srocc_curve.size())
        out << a.median_test_srocc_curve[e];
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string json_type_name(const json& v) {
  if (v.is_object()) return "object";
  if (v.is_array()) return "array";
  if (v.is_string()) return "string";
  if (v.is_boolean()) return "boolean";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_null()) return "null";
  return "unknown";
}

bool type_matches(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  if (t == "null") return v.is_null();
  return false;
}

void validate_node(const json& value, const json& schema,
                   const std::string& path, std::vector<std::string>& out) {
  if (!schema.is_object()) return;

  if (auto it = schema.find("type"); it != schema.end()) {
    if (!type_matches(value, it->get<std::string>())) {
      out.push_back(path + ": expected " + it->get<std::string>() + ", got " +
                    json_type_name(value));
      return;  // structure is wrong; deeper checks would only cascade
    }
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool hit = false;
    for (const json& candidate : *it)
      if (candidate == value) {
        hit = true;
        break;
      }
    if (!hit) out.push_back(path + ": value not in enum");
  }
  if (value.is_object()) {
    const json* props = nullptr;
    if (auto it = schema.find("properties"); it != schema.end()) props = &*it;
    if (auto it = schema.find("required"); it != schema.end())
      for (const json& key : *it)
        if (!value.contains(key.get<std::string>()))
          out.push_back(path + ": missing required key '" +
                        key.get<std::string>() + "'");
    if (auto it = schema.find("additionalProperties");
        it != schema.end() && it->is_boolean() && !it->get<bool>())
      for (auto member = value.begin(); member != value.end(); ++member)
        if (!props || !props->contains(member.key()))
          out.push_back(path + ": unexpected key '" + member.key() + "'");
    if (props)
      for (auto prop = props->begin(); prop != props->end(); ++prop)
        if (value.contains(prop.key()))
          validate_node(value.at(prop.key()), prop.value(),
                        path + "." + prop.key(), out);
  }
  if (value.is_array()) {
    if (auto it = schema.find("items"); it != schema.end())
      for (std::size_t i = 0; i < value.size(); ++i)
        validate_node(value[i], *it, path + "[" + std::to_string(i) + "]",
                      out);
  }
}

}  // namespace

std::vector<std::string> validate_against_schema(const nlohmann::json& value,
                                                 const nlohmann::json& schema) {
  std::vector<std::string> violations;
  validate_node(value, schema, "$", violations);
  return violations;
}

}  // namespace gmc
