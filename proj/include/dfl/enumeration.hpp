/**
 * @file enumeration.hpp
 * @brief Brute-force reference oracle: lists every feasible 0-1 point.
 */

#ifndef DFL_ENUMERATION_HPP
#define DFL_ENUMERATION_HPP

#include <optional>

#include "dfl/core.hpp"
#include "dfl/problem_spec.hpp"

namespace dfl {

inline constexpr std::size_t kMaxEnumerationDimension = 24;

/**
 * @brief Feasible points in ascending lexicographic order (v[0] most significant).
 *
 * Without a limit the dimension must not exceed kMaxEnumerationDimension;
 * with one, the scan stops after `limit` points.
 */
std::vector<BinaryVector> enumerate_feasible(const ProblemSpec& spec,
                                             std::optional<std::size_t> limit = std::nullopt);

/// Solves by scanning every feasible point; same tie rule as BranchAndBound.
class EnumerationOracle final : public Oracle {
 public:
  explicit EnumerationOracle(ProblemSpec spec);

  [[nodiscard]] std::size_t cost_dimension() const override { return spec_.cost_dimension(); }
  [[nodiscard]] std::size_t decision_dimension() const override { return spec_.dimension(); }
  [[nodiscard]] ObjectiveSense sense() const override { return spec_.sense(); }
  [[nodiscard]] BinaryVector solve(ConstRealSpan cost) const override;
  [[nodiscard]] bool is_feasible(const BinaryVector& x) const override { return spec_.is_feasible(x); }
  [[nodiscard]] RealVector image(const BinaryVector& x) const override { return spec_.image(x); }

  [[nodiscard]] const std::vector<BinaryVector>& feasible_points() const { return points_; }

 private:
  ProblemSpec spec_;
  std::vector<BinaryVector> points_;
};

}  // namespace dfl

#endif  // DFL_ENUMERATION_HPP
