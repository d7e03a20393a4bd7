/**
 * @file branch_and_bound.hpp
 * @brief Exact depth-first branch-and-bound for 0-1 linear programs.
 *
 * Variables are branched in index order, value 1 before value 0, so feasible
 * leaves are visited in descending lexicographic order. A leaf replaces the
 * incumbent only if it is better by more than kTolerance, and a subtree is cut
 * once its bound cannot beat the incumbent by more than kTolerance. The result
 * is therefore the tie_preferred() optimum among near-equal objectives.
 *
 * Pruning uses activity-bound propagation on every constraint (min/max
 * achievable left-hand side given the fixings) and an objective bound made of
 * the fixed part plus every favorable free coefficient, tightened on disjoint
 * families of unit-coefficient rows (each "<= r" row contributes at most r
 * favorable terms, each ">= r" / "= r" row forces at least r terms).
 */

#ifndef DFL_BRANCH_AND_BOUND_HPP
#define DFL_BRANCH_AND_BOUND_HPP

#include <cstdint>
#include <memory>

#include "dfl/core.hpp"
#include "dfl/problem_spec.hpp"

namespace dfl {

struct BnbOptions {
  /// Abort with std::runtime_error beyond this many nodes; 0 means no limit.
  std::uint64_t node_limit = 0;
  /// Disable the unit-row bound tightening (plain favorable-coefficient bound).
  bool plain_bound = false;
};

struct BnbResult {
  BinaryVector solution;
  double objective = 0.0;
  std::uint64_t nodes = 0;
};

class BranchAndBound final : public Oracle {
 public:
  explicit BranchAndBound(ProblemSpec spec, BnbOptions options = {});
  ~BranchAndBound() override;
  BranchAndBound(BranchAndBound&&) noexcept;
  BranchAndBound& operator=(BranchAndBound&&) noexcept;

  [[nodiscard]] std::size_t cost_dimension() const override { return spec_.cost_dimension(); }
  [[nodiscard]] std::size_t decision_dimension() const override { return spec_.dimension(); }
  [[nodiscard]] ObjectiveSense sense() const override { return spec_.sense(); }
  [[nodiscard]] BinaryVector solve(ConstRealSpan cost) const override;
  [[nodiscard]] bool is_feasible(const BinaryVector& x) const override { return spec_.is_feasible(x); }
  [[nodiscard]] RealVector image(const BinaryVector& x) const override { return spec_.image(x); }

  /// Solve for explicit objective coefficients (length K) in the problem's sense.
  [[nodiscard]] BnbResult solve_coefficients(ConstRealSpan coefficients) const;

  [[nodiscard]] const ProblemSpec& spec() const { return spec_; }

  /// Sparse row/column form of the problem, built once at construction.
  struct Compiled;

 private:
  ProblemSpec spec_;
  BnbOptions options_;
  std::unique_ptr<Compiled> compiled_;
};

/// Throws InfeasibleError when the problem admits no feasible point.
void validate_feasible(const ProblemSpec& spec);

}  // namespace dfl

#endif  // DFL_BRANCH_AND_BOUND_HPP
