/**
 * @file experiment.hpp
 * @brief JSON experiment configs and the generate/train/evaluate/sweep/selftest commands.
 *
 * A config has the blocks
 *
 *   problem  {"family": "shortest_path" | "matching" | "scheduling", generator keys...}
 *            or {"dataset": "<directory written by generate>"}
 *   model    {"bias", "seed"}
 *   train    TrainConfig keys ("loss", "lr", "epochs", "p_solve", "seed", "margin",
 *            "temperature", "mix_alpha", "pair_scheme", "pairdiff_norm",
 *            "update_granularity", "batch_size", "eval_every", "select_best",
 *            "cost_scale", "record_seconds")
 *   sweep    {"<train key>" | "problem.<key>": [values...]}
 *   trials, sweep_cap, output
 *
 * Trial t runs with model seed model.seed + t and training seed train.seed + t.
 */

#ifndef DFL_EXPERIMENT_HPP
#define DFL_EXPERIMENT_HPP

#include <filesystem>
#include <iosfwd>

#include "dfl/datagen.hpp"
#include "dfl/training.hpp"

namespace dfl {

/// Invalid configuration; the message lists every problem found.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Version string baked in at build time.
std::string tool_version();

struct ModelSettings {
  bool bias = true;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  nlohmann::json problem;  ///< raw problem block, resolved lazily by load_problem()
  ModelSettings model;
  TrainConfig train;
  nlohmann::json sweep = nlohmann::json::object();
  std::size_t trials = 1;
  std::size_t sweep_cap = 256;
  std::filesystem::path output = "out";

  /// Full resolved config, defaults included.
  [[nodiscard]] nlohmann::json to_json() const;
};

/// Parses and validates; throws ConfigError listing every invalid field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Applies train-block keys from `overrides` on top of `base`.
TrainConfig apply_train_overrides(TrainConfig base, const nlohmann::json& overrides);

/// Tabulated shortest-path defaults (loss-specific margin, temperature, lr) for a degree.
nlohmann::json shortest_path_table_defaults(LossKind loss, int degree);

/// Generates or loads the data described by the problem block.
GeneratedData load_problem(const nlohmann::json& problem);

/// Writes train/val/test .jsonl, spec.json and genspec.json. Refuses to
/// overwrite existing files unless force is set; creates the directory.
void write_generated(const GeneratedData& data, const std::filesystem::path& dir, bool force);

struct TrialOutcome {
  TrainResult result;
  Metrics test;
  std::uint64_t model_seed = 0;
  std::uint64_t train_seed = 0;
};

/// One seeded run on already loaded data (splits are copied, so data can be shared).
TrialOutcome run_trial(const GeneratedData& data, const ModelSettings& model, const TrainConfig& train,
                       std::size_t trial);

/// Comment lines embedding the version and a one-line resolved config.
std::vector<std::string> provenance_lines(const nlohmann::json& config);

/**
 * @brief `train`: runs every trial, writing checkpoint, RunRecord CSV and
 * metrics JSON per trial plus summary.json (means over trial means).
 *
 * Returns the process exit code (0, or 3 after a numerical abort).
 */
int cmd_train(const ExperimentConfig& config, std::ostream& log);

/// `evaluate`: metrics of a checkpoint on one split, as JSON.
nlohmann::json cmd_evaluate(const nlohmann::json& checkpoint, const GeneratedData& data, Split split);

/**
 * @brief `sweep`: cross product of the sweep block times trials, one CSV row per run.
 *
 * Throws ConfigError when the run count exceeds sweep_cap. Runs are spread
 * over `jobs` worker threads.
 */
int cmd_sweep(const ExperimentConfig& config, std::size_t jobs, std::ostream& log);

/// `selftest`: worked toy-problem values and identity checks. Returns 0 when all pass.
int cmd_selftest(std::ostream& log);

}  // namespace dfl

#endif  // DFL_EXPERIMENT_HPP
