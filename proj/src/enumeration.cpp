#include "dfl/enumeration.hpp"

namespace dfl {

std::vector<BinaryVector> enumerate_feasible(const ProblemSpec& spec,
                                             std::optional<std::size_t> limit) {
  const std::size_t k = spec.dimension();
  if (!limit && k > kMaxEnumerationDimension) {
    throw std::invalid_argument("enumerate_feasible: dimension " + std::to_string(k) +
                                " too large without a limit");
  }
  if (k >= 64) throw std::invalid_argument("enumerate_feasible: dimension must be below 64");
  std::vector<BinaryVector> points;
  if (limit && *limit == 0) return points;
  const std::uint64_t count = std::uint64_t{1} << k;
  BinaryVector x(k, 0);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (std::size_t i = 0; i < k; ++i) {
      x[i] = static_cast<std::uint8_t>((mask >> (k - 1 - i)) & 1U);
    }
    if (spec.is_feasible(x)) {
      points.push_back(x);
      if (limit && points.size() >= *limit) break;
    }
  }
  return points;
}

EnumerationOracle::EnumerationOracle(ProblemSpec spec)
    : spec_(std::move(spec)), points_(enumerate_feasible(spec_)) {}

BinaryVector EnumerationOracle::solve(ConstRealSpan cost) const {
  require_finite(cost, "cost vector");
  if (points_.empty()) throw InfeasibleError("problem '" + spec_.id() + "' has no feasible solution");
  const double sign = sense_sign(spec_.sense());
  RealVector coef = spec_.objective_coefficients(cost);
  for (double& c : coef) c *= sign;
  // Descending lexicographic scan: earlier points win near-ties.
  const BinaryVector* best = nullptr;
  double best_value = 0.0;
  for (auto it = points_.rbegin(); it != points_.rend(); ++it) {
    const double v = objective_value(*it, coef);
    if (best == nullptr || v < best_value - kTolerance) {
      best = &*it;
      best_value = v;
    }
  }
  return *best;
}

}  // namespace dfl
