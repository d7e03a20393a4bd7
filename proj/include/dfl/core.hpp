/**
 * @file core.hpp
 * @brief Oracle interface, linear objective and regret metrics.
 */

#ifndef DFL_CORE_HPP
#define DFL_CORE_HPP

#include "dfl/types.hpp"

namespace dfl {

/**
 * @brief Exact solver for a fixed 0-1 feasible set.
 *
 * The learned cost vector c lives in a space of dimension cost_dimension().
 * Decisions are binary vectors of length decision_dimension(). The objective
 * of decision v under c is c^T image(v); for plain 0-1 problems the image is
 * v itself, for problems with a fixed cost transform it is the transform's
 * adjoint applied to v.
 *
 * solve() must be deterministic, thread-safe and break ties towards the
 * decision that is preferred by tie_preferred().
 */
class Oracle {
 public:
  virtual ~Oracle() = default;

  [[nodiscard]] virtual std::size_t cost_dimension() const = 0;
  [[nodiscard]] virtual std::size_t decision_dimension() const = 0;
  [[nodiscard]] virtual ObjectiveSense sense() const = 0;

  /// Throws InfeasibleError if the feasible set is empty.
  [[nodiscard]] virtual BinaryVector solve(ConstRealSpan cost) const = 0;

  [[nodiscard]] virtual bool is_feasible(const BinaryVector& decision) const = 0;

  /// Vector phi(v) such that the objective is c^T phi(v).
  [[nodiscard]] virtual RealVector image(const BinaryVector& decision) const;
};

/// Tie-break order: at the first differing coordinate, the decision with a 1 wins.
bool tie_preferred(const BinaryVector& a, const BinaryVector& b);

/// c^T v. Throws std::invalid_argument on length mismatch.
double objective_value(ConstRealSpan solution, ConstRealSpan cost);
double objective_value(const BinaryVector& solution, ConstRealSpan cost);

/// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(ConstRealSpan values, std::string_view what);

/**
 * @brief Sense-adjusted regret of acting on c_hat when c is realized.
 *
 * For minimization f(v*(c_hat), c) - f(v*(c), c); for maximization the
 * negation. `true_optimal` may carry a cached v*(c) to save a solve.
 */
double regret(ConstRealSpan c_hat, ConstRealSpan c, const Oracle& oracle,
              const BinaryVector* true_optimal = nullptr);

/// Regret divided by |f(v*(c), c)|; NaN when the optimal value is (near) zero.
double percentage_regret(ConstRealSpan c_hat, ConstRealSpan c, const Oracle& oracle,
                         const BinaryVector* true_optimal = nullptr);

/// Mean over the finite entries; NaN when none are finite.
double mean_of_defined(ConstRealSpan values);

}  // namespace dfl

#endif  // DFL_CORE_HPP
