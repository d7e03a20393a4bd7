#include "dfl/core.hpp"

#include <cmath>
#include <limits>

namespace dfl {

std::string_view to_string(ObjectiveSense sense) {
  return sense == ObjectiveSense::kMinimize ? "minimize" : "maximize";
}

ObjectiveSense parse_sense(std::string_view text) {
  if (text == "minimize" || text == "min") return ObjectiveSense::kMinimize;
  if (text == "maximize" || text == "max") return ObjectiveSense::kMaximize;
  throw std::invalid_argument("unknown objective sense '" + std::string(text) + "'");
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val" || text == "validation") return Split::kValidation;
  if (text == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + std::string(text) + "'");
}

std::size_t Dataset::feature_dimension() const {
  return instances.empty() ? 0 : instances.front().features.size();
}

std::size_t Dataset::cost_dimension() const {
  return instances.empty() ? 0 : instances.front().cost.size();
}

void Dataset::validate() const {
  if (instances.empty()) throw std::invalid_argument("dataset is empty");
  const std::size_t p = feature_dimension();
  const std::size_t k = cost_dimension();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].features.size() != p || instances[i].cost.size() != k) {
      throw std::invalid_argument("instance " + std::to_string(i) +
                                  " has inconsistent feature or cost length");
    }
  }
}

RealVector Oracle::image(const BinaryVector& decision) const {
  return RealVector(decision.begin(), decision.end());
}

bool tie_preferred(const BinaryVector& a, const BinaryVector& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

double objective_value(ConstRealSpan solution, ConstRealSpan cost) {
  if (solution.size() != cost.size()) {
    throw std::invalid_argument("objective_value: dimension mismatch (" +
                                std::to_string(solution.size()) + " vs " +
                                std::to_string(cost.size()) + ")");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < cost.size(); ++k) total += cost[k] * solution[k];
  return total;
}

double objective_value(const BinaryVector& solution, ConstRealSpan cost) {
  if (solution.size() != cost.size()) {
    throw std::invalid_argument("objective_value: dimension mismatch (" +
                                std::to_string(solution.size()) + " vs " +
                                std::to_string(cost.size()) + ")");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < cost.size(); ++k) {
    if (solution[k] != 0) total += cost[k];
  }
  return total;
}

void require_finite(ConstRealSpan values, std::string_view what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + " contains a non-finite entry");
    }
  }
}

namespace {

struct RegretParts {
  double regret;
  double optimal_value;
};

RegretParts regret_parts(ConstRealSpan c_hat, ConstRealSpan c, const Oracle& oracle,
                         const BinaryVector* true_optimal) {
  if (c_hat.size() != c.size() || c.size() != oracle.cost_dimension()) {
    throw std::invalid_argument("regret: dimension mismatch");
  }
  const BinaryVector predicted = oracle.solve(c_hat);
  const BinaryVector optimal = true_optimal != nullptr ? *true_optimal : oracle.solve(c);
  const double f_pred = objective_value(oracle.image(predicted), c);
  const double f_opt = objective_value(oracle.image(optimal), c);
  return {sense_sign(oracle.sense()) * (f_pred - f_opt), f_opt};
}

}  // namespace

double regret(ConstRealSpan c_hat, ConstRealSpan c, const Oracle& oracle,
              const BinaryVector* true_optimal) {
  return regret_parts(c_hat, c, oracle, true_optimal).regret;
}

double percentage_regret(ConstRealSpan c_hat, ConstRealSpan c, const Oracle& oracle,
                         const BinaryVector* true_optimal) {
  const RegretParts parts = regret_parts(c_hat, c, oracle, true_optimal);
  if (std::abs(parts.optimal_value) <= kTolerance) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return parts.regret / std::abs(parts.optimal_value);
}

double mean_of_defined(ConstRealSpan values) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

}  // namespace dfl
