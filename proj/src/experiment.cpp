#include "dfl/experiment.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "dfl/dataset_io.hpp"
#include "dfl/enumeration.hpp"
#include "dfl/oracles.hpp"

namespace dfl {

using nlohmann::json;

namespace {

/// Accumulates config problems so they can be reported together.
class Problems {
 public:
  void add(std::string msg) { items_.push_back(std::move(msg)); }

  template <class T>
  void read(const json& block, const std::string& key, T& out, const std::string& where) {
    if (!block.contains(key)) return;
    try {
      out = block.at(key).get<T>();
    } catch (const json::exception&) {
      add(where + "." + key + ": wrong type (" + block.at(key).dump() + ")");
    }
  }

  void reject_unknown(const json& block, const std::set<std::string>& known, const std::string& where) {
    if (!block.is_object()) {
      add(where + ": expected an object");
      return;
    }
    for (const auto& [key, value] : block.items()) {
      if (!known.contains(key)) add(where + ": unknown key '" + key + "'");
    }
  }

  void raise_if_any(const std::string& header) const {
    if (items_.empty()) return;
    std::string msg = header;
    for (const auto& p : items_) msg += "\n  " + p;
    throw ConfigError(msg);
  }

  [[nodiscard]] bool empty() const { return items_.empty(); }

 private:
  std::vector<std::string> items_;
};

const std::set<std::string> kTrainKeys = {"loss",          "lr",          "epochs",      "p_solve",
                                          "seed",          "margin",      "temperature", "mix_alpha",
                                          "pair_scheme",   "pairdiff_norm", "update_granularity",
                                          "batch_size",    "eval_every",  "select_best", "cost_scale",
                                          "record_seconds"};

void read_train_keys(const json& block, TrainConfig& cfg, Problems& problems) {
  const std::string where = "train";
  problems.reject_unknown(block, kTrainKeys, where);
  if (!block.is_object()) return;
  auto read_enum = [&](const std::string& key, auto parse, auto& out) {
    if (!block.contains(key)) return;
    try {
      out = parse(block.at(key).get<std::string>());
    } catch (const std::exception& e) {
      problems.add(where + "." + key + ": " + e.what());
    }
  };
  read_enum("loss", parse_loss_kind, cfg.loss.kind);
  read_enum("pair_scheme", parse_pair_scheme, cfg.loss.pair_scheme);
  read_enum("pairdiff_norm", parse_pairdiff_norm, cfg.loss.pairdiff_norm);
  read_enum("update_granularity", parse_update_granularity, cfg.granularity);
  problems.read(block, "lr", cfg.lr, where);
  problems.read(block, "epochs", cfg.epochs, where);
  problems.read(block, "p_solve", cfg.p_solve, where);
  problems.read(block, "seed", cfg.seed, where);
  problems.read(block, "margin", cfg.loss.margin, where);
  problems.read(block, "temperature", cfg.loss.temperature, where);
  problems.read(block, "mix_alpha", cfg.loss.mix_alpha, where);
  problems.read(block, "batch_size", cfg.batch_size, where);
  problems.read(block, "eval_every", cfg.eval_every, where);
  problems.read(block, "select_best", cfg.select_best, where);
  problems.read(block, "record_seconds", cfg.record_seconds, where);
  if (block.contains("cost_scale")) {
    const json& v = block.at("cost_scale");
    if (v.is_string() && v.get<std::string>() == "auto") {
      cfg.cost_scale.reset();
    } else if (v.is_number()) {
      cfg.cost_scale = v.get<double>();
    } else {
      problems.add("train.cost_scale: expected \"auto\" or a number");
    }
  }
}

json train_to_json(const TrainConfig& t) {
  return {{"loss", std::string(to_string(t.loss.kind))},
          {"lr", t.lr},
          {"epochs", t.epochs},
          {"p_solve", t.p_solve},
          {"seed", t.seed},
          {"margin", t.loss.margin},
          {"temperature", t.loss.temperature},
          {"mix_alpha", t.loss.mix_alpha},
          {"pair_scheme", std::string(to_string(t.loss.pair_scheme))},
          {"pairdiff_norm", std::string(to_string(t.loss.pairdiff_norm))},
          {"update_granularity", std::string(to_string(t.granularity))},
          {"batch_size", t.batch_size},
          {"eval_every", t.eval_every},
          {"select_best", t.select_best},
          {"cost_scale", t.cost_scale ? json(*t.cost_scale) : json("auto")},
          {"record_seconds", t.record_seconds}};
}

SplitSizes read_sizes(const json& block, SplitSizes sizes, Problems& problems, const std::string& where) {
  if (!block.contains("sizes")) return sizes;
  const json& s = block.at("sizes");
  problems.reject_unknown(s, {"train", "val", "test"}, where + ".sizes");
  problems.read(s, "train", sizes.train, where + ".sizes");
  problems.read(s, "val", sizes.val, where + ".sizes");
  problems.read(s, "test", sizes.test, where + ".sizes");
  return sizes;
}

void validate_generator(const std::function<void()>& check, Problems& problems, const std::string& where) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    problems.add(where + ": " + e.what());
  }
}

/// Parses a problem block into a generator call; `problems` collects errors.
std::function<GeneratedData()> problem_loader(const json& block, Problems& problems) {
  const std::string where = "problem";
  if (!block.is_object()) {
    problems.add("problem: expected an object");
    return nullptr;
  }
  if (block.contains("dataset")) {
    problems.reject_unknown(block, {"dataset"}, where);
    std::filesystem::path dir;
    problems.read(block, "dataset", dir, where);
    for (const char* name : {"spec.json", "train.jsonl", "val.jsonl", "test.jsonl"}) {
      if (!std::filesystem::exists(dir / name)) problems.add("problem.dataset: missing " + (dir / name).string());
    }
    return [dir] {
      std::ifstream spec_in(dir / "spec.json");
      ProblemSpec spec = ProblemSpec::from_json(json::parse(spec_in));
      json manifest = json::object();
      if (std::filesystem::exists(dir / "genspec.json")) {
        std::ifstream in(dir / "genspec.json");
        manifest = json::parse(in);
      }
      GeneratedData data{{}, std::move(spec), std::move(manifest)};
      for (Split s : {Split::kTrain, Split::kValidation, Split::kTest}) {
        data.split(s) = read_dataset_file(dir / (std::string(to_string(s)) + ".jsonl"), s, data.spec.id());
      }
      return data;
    };
  }
  std::string family;
  problems.read(block, "family", family, where);
  if (family == "shortest_path") {
    problems.reject_unknown(block,
                            {"family", "feature_dim", "grid", "degree", "noise_halfwidth", "latent", "sizes", "seed"},
                            where);
    ShortestPathGenSpec gen;
    problems.read(block, "feature_dim", gen.feature_dim, where);
    problems.read(block, "grid", gen.grid, where);
    problems.read(block, "degree", gen.degree, where);
    problems.read(block, "noise_halfwidth", gen.noise_halfwidth, where);
    if (block.contains("latent")) {
      RealVector latent;
      problems.read(block, "latent", latent, where);
      gen.latent = latent;
    }
    problems.read(block, "seed", gen.seed, where);
    gen.sizes = read_sizes(block, gen.sizes, problems, where);
    validate_generator([&] { gen.validate(); }, problems, where);
    return [gen] { return gen_shortest_path(gen); };
  }
  if (family == "matching") {
    problems.reject_unknown(block, {"family", "left", "right", "p", "q", "feature_dim", "noise", "sizes", "seed"},
                            where);
    MatchingGenSpec gen;
    problems.read(block, "left", gen.left, where);
    problems.read(block, "right", gen.right, where);
    problems.read(block, "p", gen.p, where);
    problems.read(block, "q", gen.q, where);
    problems.read(block, "feature_dim", gen.feature_dim, where);
    problems.read(block, "noise", gen.noise, where);
    problems.read(block, "seed", gen.seed, where);
    gen.sizes = read_sizes(block, gen.sizes, problems, where);
    validate_generator([&] { gen.validate(); }, problems, where);
    return [gen] { return gen_matching(gen); };
  }
  if (family == "scheduling") {
    problems.reject_unknown(
        block, {"family", "tasks", "machines", "timeslots", "resources", "feature_dim", "noise", "sizes", "seed"},
        where);
    SchedulingGenSpec gen;
    problems.read(block, "tasks", gen.tasks, where);
    problems.read(block, "machines", gen.machines, where);
    problems.read(block, "timeslots", gen.timeslots, where);
    problems.read(block, "resources", gen.resources, where);
    problems.read(block, "feature_dim", gen.feature_dim, where);
    problems.read(block, "noise", gen.noise, where);
    problems.read(block, "seed", gen.seed, where);
    gen.sizes = read_sizes(block, gen.sizes, problems, where);
    validate_generator([&] { gen.validate(); }, problems, where);
    return [gen] { return gen_scheduling(gen); };
  }
  problems.add("problem.family: expected shortest_path, matching or scheduling, or a dataset path");
  return nullptr;
}

/// Splits a sweep key into (block, key); bare keys address the train block.
std::pair<std::string, std::string> sweep_target(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) return {"train", key};
  return {key.substr(0, dot), key.substr(dot + 1)};
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", d);
    return buf;
  }
  return v.dump();
}

void ensure_dir(const std::filesystem::path& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void prepare_eval_splits(GeneratedData& data, const Oracle& oracle) {
  cache_optima(data.split(Split::kValidation), oracle);
  cache_optima(data.split(Split::kTest), oracle);
}

}  // namespace

std::string tool_version() {
#ifdef DFL_VERSION
  return DFL_VERSION;
#else
  return "unknown";
#endif
}

json ExperimentConfig::to_json() const {
  return {{"problem", problem},
          {"model", {{"bias", model.bias}, {"seed", model.seed}}},
          {"train", train_to_json(train)},
          {"sweep", sweep},
          {"trials", trials},
          {"sweep_cap", sweep_cap},
          {"output", output.string()}};
}

TrainConfig apply_train_overrides(TrainConfig base, const json& overrides) {
  Problems problems;
  read_train_keys(overrides, base, problems);
  problems.raise_if_any("invalid train settings:");
  return base;
}

ExperimentConfig parse_config(const json& j) {
  Problems problems;
  ExperimentConfig cfg;
  problems.reject_unknown(j, {"problem", "model", "train", "sweep", "trials", "sweep_cap", "output"}, "config");
  if (!j.is_object()) problems.raise_if_any("invalid config:");

  if (!j.contains("problem")) {
    problems.add("problem: block is required");
  } else {
    cfg.problem = j.at("problem");
    problem_loader(cfg.problem, problems);
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    problems.reject_unknown(m, {"bias", "seed"}, "model");
    problems.read(m, "bias", cfg.model.bias, "model");
    problems.read(m, "seed", cfg.model.seed, "model");
  }
  if (j.contains("train")) read_train_keys(j.at("train"), cfg.train, problems);
  try {
    cfg.train.validate();
  } catch (const std::invalid_argument& e) {
    problems.add(e.what());
  }
  problems.read(j, "trials", cfg.trials, "config");
  if (cfg.trials == 0) problems.add("config.trials: must be at least 1");
  problems.read(j, "sweep_cap", cfg.sweep_cap, "config");
  std::string output = cfg.output.string();
  problems.read(j, "output", output, "config");
  cfg.output = output;

  if (j.contains("sweep")) {
    cfg.sweep = j.at("sweep");
    if (!cfg.sweep.is_object()) {
      problems.add("sweep: expected an object of value lists");
    } else {
      std::size_t combos = 1;
      for (const auto& [key, values] : cfg.sweep.items()) {
        if (!values.is_array() || values.empty()) {
          problems.add("sweep." + key + ": expected a nonempty list");
          continue;
        }
        combos *= values.size();
        const auto [block, field] = sweep_target(key);
        for (const auto& v : values) {
          if (block == "train") {
            TrainConfig probe = cfg.train;
            read_train_keys(json{{field, v}}, probe, problems);
            try {
              probe.validate();
            } catch (const std::invalid_argument& e) {
              problems.add("sweep." + key + " = " + v.dump() + ": " + e.what());
            }
          } else if (block == "problem") {
            if (cfg.problem.is_object()) {
              json probe = cfg.problem;
              probe[field] = v;
              problem_loader(probe, problems);
            }
          } else {
            problems.add("sweep." + key + ": only train and problem keys can be swept");
            break;
          }
        }
      }
      if (combos * cfg.trials > cfg.sweep_cap) {
        problems.add("sweep: " + std::to_string(combos * cfg.trials) + " runs exceed sweep_cap " +
                     std::to_string(cfg.sweep_cap));
      }
    }
  }
  problems.raise_if_any("invalid config:");
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json shortest_path_table_defaults(LossKind loss, int degree) {
  static const std::map<int, std::size_t> column = {{1, 0}, {2, 1}, {4, 2}, {6, 3}, {8, 4}};
  const auto it = column.find(degree);
  if (it == column.end()) throw std::invalid_argument("no tabulated hyperparameters for degree " + std::to_string(degree));
  const std::size_t c = it->second;
  static const std::array<double, 5> pairwise_margin{1.0, 0.1, 0.1, 0.1, 0.1};
  static const std::array<double, 5> listwise_temperature{1.0, 0.1, 0.05, 0.05, 0.05};
  // Learning rates for plain per-instance SGD on unit-scaled costs.
  static const std::map<LossKind, double> sgd_lr = {
      {LossKind::kMse, 0.003},          {LossKind::kPointwise, 0.003}, {LossKind::kPairwise, 0.01},
      {LossKind::kPairwiseDiff, 0.003}, {LossKind::kListwise, 0.003},  {LossKind::kListwiseKl, 0.003},
      {LossKind::kNce, 0.003},          {LossKind::kCombined, 0.003}};
  json out = {{"loss", std::string(to_string(loss))}, {"lr", sgd_lr.at(loss)}};
  if (loss == LossKind::kPairwise) out["margin"] = pairwise_margin[c];
  if (loss == LossKind::kListwise || loss == LossKind::kListwiseKl || loss == LossKind::kCombined) {
    out["temperature"] = listwise_temperature[c];
  }
  return out;
}

GeneratedData load_problem(const json& problem) {
  Problems problems;
  auto loader = problem_loader(problem, problems);
  problems.raise_if_any("invalid problem block:");
  return loader();
}

void write_generated(const GeneratedData& data, const std::filesystem::path& dir, bool force) {
  const std::vector<std::string> names = {"train.jsonl", "val.jsonl", "test.jsonl", "spec.json", "genspec.json"};
  if (!force) {
    std::vector<std::string> existing;
    for (const auto& n : names) {
      if (std::filesystem::exists(dir / n)) existing.push_back((dir / n).string());
    }
    if (!existing.empty()) {
      std::string msg = "refusing to overwrite without --force:";
      for (const auto& e : existing) msg += "\n  " + e;
      throw ConfigError(msg);
    }
  }
  ensure_dir(dir);
  for (Split s : {Split::kTrain, Split::kValidation, Split::kTest}) {
    write_dataset_file(dir / (std::string(to_string(s)) + ".jsonl"), data.split(s));
  }
  write_json_file(dir / "spec.json", data.spec.to_json());
  json manifest = data.manifest;
  manifest["version"] = tool_version();
  write_json_file(dir / "genspec.json", manifest);
}

TrialOutcome run_trial(const GeneratedData& data, const ModelSettings& model, const TrainConfig& train,
                       std::size_t trial) {
  const auto oracle = make_oracle(data.spec);
  Dataset train_split = data.split(Split::kTrain);
  Dataset val_split = data.split(Split::kValidation);
  TrainConfig cfg = train;
  cfg.seed = train.seed + trial;
  const std::uint64_t model_seed = model.seed + trial;
  LinearModel init(train_split.feature_dimension(), train_split.cost_dimension(), model.bias, model_seed);
  TrialOutcome out{dfl::train(std::move(init), train_split, val_split, *oracle, cfg), {}, model_seed, cfg.seed};
  out.test = evaluate(out.result.model, data.split(Split::kTest), *oracle);
  out.result.record.test = out.test;
  return out;
}

std::vector<std::string> provenance_lines(const json& config) {
  return {"version " + tool_version(), "config " + config.dump()};
}

int cmd_train(const ExperimentConfig& config, std::ostream& log) {
  GeneratedData data = load_problem(config.problem);
  prepare_eval_splits(data, *make_oracle(data.spec));
  ensure_dir(config.output);
  const json resolved = config.to_json();
  int code = 0;
  json trials = json::array();
  RealVector test_pct, test_mse, test_regret;
  for (std::size_t t = 0; t < config.trials; ++t) {
    TrialOutcome out = run_trial(data, config.model, config.train, t);
    const std::filesystem::path dir = config.output / ("trial" + std::to_string(t));
    ensure_dir(dir);
    json checkpoint = out.result.model.to_json(out.result.model_epoch);
    checkpoint["version"] = tool_version();
    checkpoint["config"] = resolved;
    write_json_file(dir / "checkpoint.json", checkpoint);
    {
      std::ofstream csv(dir / "run.csv");
      out.result.record.write_csv(csv, provenance_lines(resolved));
    }
    out.result.pool.dump_file(dir / "pool.jsonl");
    json metrics = {{"version", tool_version()},      {"config", resolved},
                    {"trial", t},                     {"model_seed", out.model_seed},
                    {"train_seed", out.train_seed},   {"checkpoint_epoch", out.result.model_epoch},
                    {"test", out.test.to_json()},     {"oracle_calls", out.result.pool.oracle_calls()},
                    {"growth_calls", out.result.pool.growth_calls()},
                    {"mean_epoch_seconds", out.result.record.mean_epoch_seconds()}};
    if (out.result.abort_reason) {
      metrics["aborted"] = *out.result.abort_reason;
      log << "trial " << t << " aborted: " << *out.result.abort_reason << '\n';
      code = 3;
    }
    write_json_file(dir / "metrics.json", metrics);
    log << "trial " << t << ": test pct regret " << out.test.mean_pct_regret << ", mse " << out.test.mse
        << ", best epoch " << out.result.model_epoch << '\n';
    test_pct.push_back(out.test.mean_pct_regret);
    test_mse.push_back(out.test.mse);
    test_regret.push_back(out.test.mean_regret);
    trials.push_back(metrics["test"]);
  }
  json summary = {{"version", tool_version()},
                  {"config", resolved},
                  {"trials", config.trials},
                  {"mean_test_pct_regret", mean_of_defined(test_pct)},
                  {"mean_test_regret", mean_of_defined(test_regret)},
                  {"mean_test_mse", mean_of_defined(test_mse)},
                  {"per_trial", trials}};
  write_json_file(config.output / "summary.json", summary);
  return code;
}

json cmd_evaluate(const json& checkpoint, const GeneratedData& data, Split split) {
  const LinearModel model = LinearModel::from_json(checkpoint);
  const Dataset& ds = data.split(split);
  if (ds.empty()) throw std::invalid_argument("evaluate: split is empty");
  if (ds.feature_dimension() != model.features() || ds.cost_dimension() != model.outputs()) {
    throw std::invalid_argument("checkpoint is " + std::to_string(model.features()) + " x " +
                                std::to_string(model.outputs()) + " but the dataset is " +
                                std::to_string(ds.feature_dimension()) + " x " + std::to_string(ds.cost_dimension()));
  }
  const auto oracle = make_oracle(data.spec);
  json out = {{"version", tool_version()},
              {"split", std::string(to_string(split))},
              {"checkpoint_epoch", checkpoint.value("epoch", 0)},
              {"metrics", evaluate(model, ds, *oracle).to_json()}};
  if (checkpoint.contains("config")) out["config"] = checkpoint.at("config");
  return out;
}

int cmd_sweep(const ExperimentConfig& config, std::size_t jobs, std::ostream& log) {
  // Cross product in key order; the last key varies fastest.
  std::vector<std::pair<std::string, json>> axes;
  for (const auto& [key, values] : config.sweep.items()) axes.emplace_back(key, values);
  std::vector<json> combos{json::object()};
  for (const auto& [key, values] : axes) {
    std::vector<json> next;
    for (const auto& partial : combos) {
      for (const auto& v : values) {
        json c = partial;
        c[key] = v;
        next.push_back(std::move(c));
      }
    }
    combos = std::move(next);
  }
  const std::size_t runs = combos.size() * config.trials;
  if (runs > config.sweep_cap) {
    throw ConfigError("sweep: " + std::to_string(runs) + " runs exceed sweep_cap " + std::to_string(config.sweep_cap));
  }

  // Load each distinct problem once.
  std::map<std::string, std::shared_ptr<GeneratedData>> problems;
  std::vector<std::shared_ptr<GeneratedData>> combo_data;
  std::vector<TrainConfig> combo_train;
  for (const auto& combo : combos) {
    json problem = config.problem;
    json train_overrides = json::object();
    for (const auto& [key, value] : combo.items()) {
      const auto [block, field] = sweep_target(key);
      (block == "problem" ? problem : train_overrides)[field] = value;
    }
    const std::string id = problem.dump();
    if (!problems.contains(id)) {
      auto data = std::make_shared<GeneratedData>(load_problem(problem));
      prepare_eval_splits(*data, *make_oracle(data->spec));
      problems.emplace(id, std::move(data));
    }
    combo_data.push_back(problems.at(id));
    combo_train.push_back(apply_train_overrides(config.train, train_overrides));
  }

  std::vector<std::optional<TrialOutcome>> outcomes(runs);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < runs; r = next++) {
      const std::size_t c = r / config.trials;
      const std::size_t t = r % config.trials;
      outcomes[r] = run_trial(*combo_data[c], config.model, combo_train[c], t);
      std::lock_guard lock(log_mutex);
      log << "run " << r + 1 << "/" << runs << " " << combos[c].dump() << " trial " << t
          << ": test pct regret " << outcomes[r]->test.mean_pct_regret << '\n';
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, runs));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ensure_dir(config.output);
  std::ofstream csv(config.output / "sweep.csv");
  for (const auto& line : provenance_lines(config.to_json())) csv << "# " << line << '\n';
  // Swept keys already among the fixed columns are not repeated.
  const std::set<std::string> fixed = {"loss", "lr", "p_solve"};
  csv << "run,trial";
  for (const auto& [key, values] : axes) {
    if (!fixed.contains(key)) csv << ',' << key;
  }
  csv << ",loss,lr,p_solve,model_seed,train_seed,epochs_run,best_epoch,test_pct_regret,test_regret,test_mse,"
         "best_val_pct_regret,mean_epoch_seconds,oracle_calls,growth_calls,pool_size,aborted\n";
  int code = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const std::size_t c = r / config.trials;
    const TrialOutcome& out = *outcomes[r];
    const TrainConfig& tc = combo_train[c];
    double best_val = std::nan("");
    for (const auto& e : out.result.record.epochs) {
      if (e.val_pct_regret && (std::isnan(best_val) || *e.val_pct_regret < best_val)) best_val = *e.val_pct_regret;
    }
    csv << r << ',' << r % config.trials;
    for (const auto& [key, values] : axes) {
      if (!fixed.contains(key)) csv << ',' << csv_cell(combos[c].at(key));
    }
    csv << ',' << to_string(tc.loss.kind) << ',' << csv_cell(tc.lr) << ',' << csv_cell(tc.p_solve) << ','
        << out.model_seed << ',' << out.train_seed << ',' << out.result.record.epochs.size() << ','
        << out.result.model_epoch << ',' << csv_cell(out.test.mean_pct_regret) << ','
        << csv_cell(out.test.mean_regret) << ',' << csv_cell(out.test.mse) << ',' << csv_cell(best_val) << ','
        << csv_cell(out.result.record.mean_epoch_seconds()) << ',' << out.result.pool.oracle_calls() << ','
        << out.result.pool.growth_calls() << ',' << out.result.pool.size() << ','
        << (out.result.abort_reason ? 1 : 0) << '\n';
    if (out.result.abort_reason) code = 3;
  }
  return code;
}

int cmd_selftest(std::ostream& log) {
  int failures = 0;
  auto check = [&](const std::string& name, double got, double want, double tol = 1e-12) {
    const bool ok = std::abs(got - want) <= tol;
    if (!ok) ++failures;
    log << (ok ? "PASS " : "FAIL ") << name << ": " << got << " (expected " << want << ")\n";
  };

  const RealVector c{2.0, -5.0};
  const RealVector c1{-1.0, 1.0};
  const RealVector c2{5.0, -11.0};
  const ProblemSpec square(2, ObjectiveSense::kMinimize, {}, json::object());
  const EnumerationOracle oracle(square);
  std::vector<RealVector> pool;
  for (const auto& v : enumerate_feasible(square)) pool.push_back(oracle.image(v));

  const BinaryVector opt = oracle.solve(c);
  check("optimum of c is [0,1]", opt == BinaryVector{0, 1} ? 1.0 : 0.0, 1.0);
  check("mse c1", mse(c1, c).value, 45.0);
  check("mse c2", mse(c2, c).value, 45.0);
  check("pointwise c1", pointwise(c1, c, pool).value, 13.5);
  check("pointwise c2", pointwise(c2, c, pool).value, 13.5);
  const OrderedPairs pairs = generate_pairs(pool, c, PairScheme::kBestVersusRest);
  check("best-versus-rest pair count", static_cast<double>(pairs.size()), 3.0);
  check("pairwise c1", pairwise(c1, pool, pairs, 0.0).value, 4.0 / 3.0);
  check("pairwise c2", pairwise(c2, pool, pairs, 0.0).value, 0.0);
  check("pairwise_diff c1", pairwise_diff(c1, c, pool, pairs).value, 126.0 / 3.0);
  check("pairwise_diff c2", pairwise_diff(c2, c, pool, pairs).value, 126.0 / 3.0);
  check("nce c2", nce(c2, c, pool).value, -8.0);
  check("regret c1", regret(c1, c, oracle), 7.0);
  check("regret c2", regret(c2, c, oracle), 0.0);

  std::mt19937_64 rng(20240101);
  std::normal_distribution<double> normal(0.0, 3.0);
  std::bernoulli_distribution coin(0.5);
  double worst_pointwise = 0.0;
  double worst_pairdiff = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + trial % 5;
    RealVector ct(k), ch(k);
    for (std::size_t i = 0; i < k; ++i) {
      ct[i] = normal(rng);
      ch[i] = normal(rng);
    }
    std::vector<RealVector> s(1 + trial % 6, RealVector(k));
    for (auto& v : s) {
      for (double& x : v) x = coin(rng) ? 1.0 : 0.0;
    }
    worst_pointwise = std::max(worst_pointwise,
                               std::abs(pointwise(ch, ct, s).value - pointwise_weighted_form(ch, ct, s)));
    const OrderedPairs op = generate_pairs(s, ct, PairScheme::kAllPairs);
    worst_pairdiff = std::max(worst_pairdiff, std::abs(pairwise_diff(ch, ct, s, op).value -
                                                       pairwise_diff_weighted_form(ch, ct, s, op)));
  }
  check("pointwise weighted-form identity", worst_pointwise, 0.0, 1e-9);
  check("pairwise_diff weighted-form identity", worst_pairdiff, 0.0, 1e-9);
  log << (failures == 0 ? "selftest passed" : "selftest FAILED") << '\n';
  return failures == 0 ? 0 : 1;
}

}  // namespace dfl
