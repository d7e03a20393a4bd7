#include "dfl/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include "dfl/seeding.hpp"

namespace dfl {

namespace {

double quantile(const RealVector& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string_view to_string(UpdateGranularity granularity) {
  switch (granularity) {
    case UpdateGranularity::kPerInstance: return "per_instance";
    case UpdateGranularity::kMinibatch: return "minibatch";
    case UpdateGranularity::kPerEpoch: return "per_epoch";
  }
  return "per_instance";
}

UpdateGranularity parse_update_granularity(std::string_view text) {
  if (text == "per_instance") return UpdateGranularity::kPerInstance;
  if (text == "minibatch") return UpdateGranularity::kMinibatch;
  if (text == "per_epoch") return UpdateGranularity::kPerEpoch;
  throw std::invalid_argument("unknown update_granularity '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  std::vector<std::string> problems;
  try {
    loss.validate();
  } catch (const std::invalid_argument& e) {
    problems.emplace_back(e.what());
  }
  if (!(lr > 0.0) || !std::isfinite(lr)) problems.emplace_back("lr must be positive");
  if (epochs == 0) problems.emplace_back("epochs must be at least 1");
  if (!(p_solve >= 0.0 && p_solve <= 1.0)) problems.emplace_back("p_solve must lie in [0, 1]");
  if (granularity == UpdateGranularity::kMinibatch && batch_size == 0) {
    problems.emplace_back("batch_size must be at least 1");
  }
  if (eval_every == 0) problems.emplace_back("eval_every must be at least 1");
  if (cost_scale && !(*cost_scale > 0.0 && std::isfinite(*cost_scale))) {
    problems.emplace_back("cost_scale must be positive");
  }
  if (problems.empty()) return;
  std::string msg = "invalid training config:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw std::invalid_argument(msg);
}

nlohmann::json Metrics::to_json() const {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"instances", instances},
          {"undefined_pct_regret", undefined_pct},
          {"mean_pct_regret", num(mean_pct_regret)},
          {"mean_regret", num(mean_regret)},
          {"mse", num(mse)},
          {"pct_regret_quartiles",
           {num(pct_min), num(pct_q1), num(pct_median), num(pct_q3), num(pct_max)}}};
}

void RunRecord::write_csv(std::ostream& out, const std::vector<std::string>& comments) const {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "epoch,train_loss,val_pct_regret,val_mse,pool_size,oracle_calls,seconds\n";
  for (const auto& e : epochs) {
    out << e.epoch << ',' << format_number(e.train_loss) << ','
        << (e.val_pct_regret ? format_number(*e.val_pct_regret) : "") << ','
        << (e.val_mse ? format_number(*e.val_mse) : "") << ',' << e.pool_size << ',' << e.oracle_calls << ','
        << format_number(e.seconds) << '\n';
  }
}

double RunRecord::mean_epoch_seconds() const {
  if (epochs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : epochs) total += e.seconds;
  return total / static_cast<double>(epochs.size());
}

void cache_optima(Dataset& dataset, const Oracle& oracle) {
  for (Instance& inst : dataset.instances) {
    if (!inst.optimal) inst.optimal = oracle.solve(inst.cost);
  }
}

double mean_abs_cost(const Dataset& dataset) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& inst : dataset.instances) {
    for (double c : inst.cost) total += std::abs(c);
    n += inst.cost.size();
  }
  return n == 0 ? 0.0 : total / static_cast<double>(n);
}

Metrics evaluate(const LinearModel& model, const Dataset& split, const Oracle& oracle) {
  if (split.empty()) throw std::invalid_argument("evaluate: split is empty");
  Metrics m;
  m.instances = split.size();
  RealVector pct;
  double regret_sum = 0.0;
  double sq_sum = 0.0;
  std::size_t entries = 0;
  for (const Instance& inst : split.instances) {
    const RealVector c_hat = model.forward(inst.features);
    const BinaryVector* opt = inst.optimal ? &*inst.optimal : nullptr;
    const double r = regret(c_hat, inst.cost, oracle, opt);
    regret_sum += r;
    const BinaryVector v_star = opt ? *opt : oracle.solve(inst.cost);
    const double f_star = objective_value(oracle.image(v_star), inst.cost);
    if (std::abs(f_star) > kTolerance) {
      pct.push_back(r / std::abs(f_star));
    } else {
      ++m.undefined_pct;
    }
    for (std::size_t k = 0; k < c_hat.size(); ++k) {
      const double d = c_hat[k] - inst.cost[k];
      sq_sum += d * d;
    }
    entries += c_hat.size();
  }
  m.mean_regret = regret_sum / static_cast<double>(split.size());
  m.mse = sq_sum / static_cast<double>(entries);
  m.mean_pct_regret = mean_of_defined(pct);
  std::sort(pct.begin(), pct.end());
  m.pct_min = quantile(pct, 0.0);
  m.pct_q1 = quantile(pct, 0.25);
  m.pct_median = quantile(pct, 0.5);
  m.pct_q3 = quantile(pct, 0.75);
  m.pct_max = quantile(pct, 1.0);
  return m;
}

TrainResult train(LinearModel model, Dataset& train_split, Dataset& val_split, const Oracle& oracle,
                  const TrainConfig& config) {
  config.validate();
  train_split.validate();
  val_split.validate();
  if (train_split.feature_dimension() != model.features() || train_split.cost_dimension() != model.outputs() ||
      val_split.feature_dimension() != model.features() || val_split.cost_dimension() != model.outputs()) {
    throw std::invalid_argument("train: dataset and model shapes differ");
  }
  if (model.outputs() != oracle.cost_dimension()) throw std::invalid_argument("train: model and oracle shapes differ");

  double scale = config.cost_scale.value_or(mean_abs_cost(train_split));
  if (!(scale > 0.0)) scale = 1.0;
  model.set_output_scale(scale);
  const double sign = sense_sign(oracle.sense());

  TrainResult result{model, 0, {}, init_pool(train_split, oracle), std::nullopt};
  cache_optima(val_split, oracle);

  const std::size_t n = train_split.size();
  std::vector<RealVector> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    targets[i] = train_split.instances[i].cost;
    for (double& c : targets[i]) c *= sign / scale;
  }

  std::mt19937_64 shuffle_rng(derive_seed(config.seed, "shuffle"));
  std::mt19937_64 pool_rng(derive_seed(config.seed, "pool"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::optional<double> best_regret;
  ModelGradient grad = model.zero_gradient();
  using Clock = std::chrono::steady_clock;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = Clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    grad.clear();
    double loss_sum = 0.0;
    try {
      for (std::size_t i : order) {
        const Instance& inst = train_split.instances[i];
        RealVector z = model.raw_forward(inst.features);
        if (config.p_solve > 0.0) {
          RealVector c_hat = z;
          for (double& c : c_hat) c *= scale;
          maybe_grow(result.pool, oracle, c_hat, config.p_solve, pool_rng);
        }
        for (double& v : z) v *= sign;
        LossResult loss = evaluate_loss(config.loss, z, targets[i], result.pool.solutions());
        if (!std::isfinite(loss.value)) throw NumericalError("non-finite loss at epoch " + std::to_string(epoch));
        loss_sum += loss.value;
        for (double& g : loss.gradient) g *= sign;
        switch (config.granularity) {
          case UpdateGranularity::kPerInstance:
            model.backward_and_step(inst.features, loss.gradient, config.lr);
            break;
          case UpdateGranularity::kMinibatch:
            grad.accumulate(inst.features, loss.gradient);
            if (grad.count == config.batch_size) {
              model.step(grad, config.lr, static_cast<double>(grad.count));
              grad.clear();
            }
            break;
          case UpdateGranularity::kPerEpoch:
            grad.accumulate(inst.features, loss.gradient);
            break;
        }
      }
      if (grad.count > 0) model.step(grad, config.lr, static_cast<double>(grad.count));
    } catch (const NumericalError& e) {
      result.abort_reason = e.what();
      break;
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.pool_size = result.pool.size();
    rec.oracle_calls = result.pool.oracle_calls();
    rec.seconds = config.record_seconds ? seconds : 0.0;
    if (epoch % config.eval_every == 0 || epoch == config.epochs) {
      const Metrics m = evaluate(model, val_split, oracle);
      rec.val_pct_regret = m.mean_pct_regret;
      rec.val_mse = m.mse;
      const bool better = std::isfinite(m.mean_pct_regret) && (!best_regret || m.mean_pct_regret < *best_regret);
      if (!config.select_best || better) {
        if (better) best_regret = m.mean_pct_regret;
        result.model = model;
        result.model_epoch = epoch;
      }
    }
    result.record.epochs.push_back(rec);
  }
  if (!config.select_best || result.model_epoch == 0) {
    result.model = model;
    result.model_epoch = result.record.epochs.size();
  }
  return result;
}

}  // namespace dfl
