/**
 * @file datagen.hpp
 * @brief Seeded synthetic generators for shortest path, matching and scheduling.
 *
 * Each split is drawn from its own derived seed, so split sizes can change
 * without perturbing the other splits.
 */

#ifndef DFL_DATAGEN_HPP
#define DFL_DATAGEN_HPP

#include <array>
#include <optional>

#include "dfl/grid.hpp"
#include "dfl/oracles.hpp"
#include "dfl/problem_spec.hpp"

namespace dfl {

struct SplitSizes {
  std::size_t train = 1000;
  std::size_t val = 250;
  std::size_t test = 10000;

  [[nodiscard]] std::size_t total() const { return train + val + test; }
};

/// Three splits sharing one problem.
struct GeneratedData {
  std::array<Dataset, 3> splits;  ///< indexed by Split
  ProblemSpec spec;
  nlohmann::json manifest;  ///< every generator parameter, the seed and run metadata

  [[nodiscard]] Dataset& split(Split s) { return splits[static_cast<std::size_t>(s)]; }
  [[nodiscard]] const Dataset& split(Split s) const { return splits[static_cast<std::size_t>(s)]; }
};

struct ShortestPathGenSpec {
  std::size_t feature_dim = 5;
  std::size_t grid = 5;
  int degree = 1;
  double noise_halfwidth = 0.5;  ///< eps ~ U(1 - h, 1 + h); 0 forces eps = 1
  std::optional<RealVector> latent;  ///< K x P row-major; Bernoulli(0.5) entries when absent
  SplitSizes sizes;
  std::uint64_t seed = 0;

  void validate() const;
};

/// c_j = ((B x)_j / sqrt(P) + 3)^deg * eps_j with x ~ N(0, I). x is redrawn while any base is <= 0.
GeneratedData gen_shortest_path(const ShortestPathGenSpec& gen);

struct MatchingGenSpec {
  std::size_t left = 4;
  std::size_t right = 4;
  double p = 0.25;  ///< minimum same-field share of chosen edges
  double q = 0.25;  ///< minimum cross-field share of chosen edges
  std::size_t feature_dim = 5;
  double noise = 0.5;  ///< std of the additive Gaussian reward noise
  SplitSizes sizes{200, 50, 200};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Rewards r = A x / sqrt(P) + 2 + noise with a fixed Gaussian map A; node fields are fair coin flips.
GeneratedData gen_matching(const MatchingGenSpec& gen);

struct SchedulingGenSpec {
  std::size_t tasks = 3;
  std::size_t machines = 2;
  std::size_t timeslots = 12;
  std::size_t resources = 1;
  std::size_t feature_dim = 5;
  double noise = 0.3;  ///< std of the additive Gaussian price noise
  SplitSizes sizes{200, 50, 200};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Draws machine and task parameters (redrawing infeasible ones), then prices
/// max(0.01, mu_t + (A x)_t / sqrt(P) + noise) with A >= 0 and a daily profile mu.
GeneratedData gen_scheduling(const SchedulingGenSpec& gen);

}  // namespace dfl

#endif  // DFL_DATAGEN_HPP
