/**
 * @file oracles.hpp
 * @brief Problem builders (diverse bipartite matching, energy-aware scheduling)
 * and the ProblemSpec-to-oracle factory.
 */

#ifndef DFL_ORACLES_HPP
#define DFL_ORACLES_HPP

#include <memory>

#include "dfl/branch_and_bound.hpp"
#include "dfl/enumeration.hpp"
#include "dfl/grid.hpp"

namespace dfl {

/**
 * @brief Maximum-reward bipartite matching with similarity/diversity rates.
 *
 * Binary x_ij at index i * n2 + j. Each side has degree at most one, at least
 * a fraction p of the chosen edges join same-field nodes (same_field == 1)
 * and at least a fraction q join different-field nodes. A zero rate drops its
 * row, so p = q = 0 leaves only the degree constraints.
 */
ProblemSpec build_matching_spec(std::size_t n1, std::size_t n2,
                                const std::vector<std::uint8_t>& same_field, double p, double q);

struct SchedulingTask {
  std::size_t duration = 1;
  std::size_t earliest = 0;  ///< earliest start slot
  std::size_t latest = 0;    ///< latest end slot (exclusive)
  double power = 1.0;
  RealVector usage;  ///< per-resource usage
};

struct SchedulingMachine {
  RealVector capacity;  ///< per-resource capacity
};

struct SchedulingParams {
  std::vector<SchedulingTask> tasks;
  std::vector<SchedulingMachine> machines;
  std::size_t timeslots = 0;

  [[nodiscard]] std::size_t resources() const;
  [[nodiscard]] std::size_t variable(std::size_t task, std::size_t machine, std::size_t slot) const {
    return (task * machines.size() + machine) * timeslots + slot;
  }
};

/**
 * @brief Time-indexed energy-cost-aware scheduling over x_{j,m,t} (task j starts
 * at slot t on machine m).
 *
 * The learned cost vector is the price series (length timeslots). The problem's
 * cost map sends it to the coefficient of x_{j,m,t}, p_j times the sum of
 * prices over slots t..t+d_j-1, so the image of a schedule is its
 * power-weighted occupancy per slot. Throws InfeasibleError when no feasible
 * schedule exists and std::invalid_argument for windows past the horizon.
 */
ProblemSpec build_scheduling_spec(const SchedulingParams& params);

nlohmann::json scheduling_params_to_json(const SchedulingParams& params);
SchedulingParams scheduling_params_from_json(const nlohmann::json& j);

/// Grid specs get the dynamic program; everything else branch-and-bound.
std::unique_ptr<Oracle> make_oracle(const ProblemSpec& spec);

}  // namespace dfl

#endif  // DFL_ORACLES_HPP
