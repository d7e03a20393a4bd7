/**
 * @file training.hpp
 * @brief Epoch loop with probabilistic pool growth, loss dispatch and validation tracking.
 */

#ifndef DFL_TRAINING_HPP
#define DFL_TRAINING_HPP

#include <iosfwd>
#include <optional>

#include "dfl/core.hpp"
#include "dfl/losses.hpp"
#include "dfl/model.hpp"
#include "dfl/pool.hpp"

namespace dfl {

enum class UpdateGranularity { kPerInstance, kMinibatch, kPerEpoch };

std::string_view to_string(UpdateGranularity granularity);
UpdateGranularity parse_update_granularity(std::string_view text);

struct TrainConfig {
  LossSpec loss;
  double lr = 0.1;
  std::size_t epochs = 10;
  double p_solve = 0.1;
  std::uint64_t seed = 0;
  UpdateGranularity granularity = UpdateGranularity::kPerInstance;
  std::size_t batch_size = 32;     ///< only for kMinibatch
  std::size_t eval_every = 1;      ///< validation cadence in epochs; the last epoch is always evaluated
  bool select_best = true;
  /// Divisor applied to costs inside the loss; nullopt means mean |c| over the training split.
  std::optional<double> cost_scale;
  /// When false the seconds column is written as 0 so records are reproducible byte for byte.
  bool record_seconds = true;

  /// Throws std::invalid_argument listing every problem found.
  void validate() const;
};

/// Split-level metrics. Percentage regret statistics skip instances with a zero optimum.
struct Metrics {
  std::size_t instances = 0;
  std::size_t undefined_pct = 0;
  double mean_pct_regret = 0.0;
  double mean_regret = 0.0;
  double mse = 0.0;  ///< mean squared error per cost entry
  double pct_min = 0.0;
  double pct_q1 = 0.0;
  double pct_median = 0.0;
  double pct_q3 = 0.0;
  double pct_max = 0.0;

  [[nodiscard]] nlohmann::json to_json() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<double> val_pct_regret;  ///< absent on epochs skipped by eval_every
  std::optional<double> val_mse;
  std::size_t pool_size = 0;
  std::size_t oracle_calls = 0;  ///< cumulative, including pool initialization
  double seconds = 0.0;          ///< training time of the epoch, validation excluded
};

struct RunRecord {
  std::vector<EpochRecord> epochs;
  std::optional<Metrics> test;

  /// Writes "# "-prefixed comment lines, the column header and one row per epoch.
  void write_csv(std::ostream& out, const std::vector<std::string>& comments = {}) const;
  [[nodiscard]] double mean_epoch_seconds() const;
};

struct TrainResult {
  LinearModel model;           ///< best checkpoint under select_best, else the final model
  std::size_t model_epoch = 0;
  RunRecord record;
  SolutionPool pool;
  std::optional<std::string> abort_reason;  ///< set when a non-finite loss stopped the run
};

/// Solves and caches v*(c) for every instance lacking it.
void cache_optima(Dataset& dataset, const Oracle& oracle);

/// Deterministic metrics of model predictions over a nonempty split.
Metrics evaluate(const LinearModel& model, const Dataset& split, const Oracle& oracle);

/// Mean |c| over all cost entries of a split.
double mean_abs_cost(const Dataset& dataset);

/**
 * @brief Trains an initialized model.
 *
 * Seeds the pool with the training optima, then for each epoch visits the
 * training instances in a seeded shuffled order: predict, grow the pool with
 * probability p_solve, evaluate the loss and update. Caches optima on both
 * splits. A non-finite loss or gradient ends the run early with abort_reason
 * set and the last good model returned.
 */
TrainResult train(LinearModel model, Dataset& train_split, Dataset& val_split, const Oracle& oracle,
                  const TrainConfig& config);

}  // namespace dfl

#endif  // DFL_TRAINING_HPP
