/**
 * @file pool.hpp
 * @brief The cached set S of feasible solutions shared by every ranking loss.
 */

#ifndef DFL_POOL_HPP
#define DFL_POOL_HPP

#include <filesystem>
#include <iosfwd>
#include <random>
#include <set>

#include "dfl/core.hpp"

namespace dfl {

/**
 * @brief Ordered, deduplicated list of solution images.
 *
 * Members are stored as images phi(v) (see Oracle::image), which are the
 * binary assignments themselves for plain 0-1 problems. Insertion order is
 * preserved; duplicates are rejected.
 */
class SolutionPool {
 public:
  SolutionPool() = default;

  /// Returns true if the solution was new.
  bool insert(RealVector solution);

  [[nodiscard]] bool contains(const RealVector& solution) const { return keys_.contains(solution); }
  [[nodiscard]] const std::vector<RealVector>& solutions() const { return solutions_; }
  [[nodiscard]] std::size_t size() const { return solutions_.size(); }
  [[nodiscard]] bool empty() const { return solutions_.empty(); }

  /// Oracle calls made while seeding the pool with true optima.
  [[nodiscard]] std::size_t init_calls() const { return init_calls_; }
  /// Oracle calls made by successful growth draws.
  [[nodiscard]] std::size_t growth_calls() const { return growth_calls_; }
  [[nodiscard]] std::size_t oracle_calls() const { return init_calls_ + growth_calls_; }

  void record_init_call() { ++init_calls_; }
  void record_growth_call() { ++growth_calls_; }

  /// JSON-lines, one solution array per line.
  void dump(std::ostream& out) const;
  static SolutionPool restore(std::istream& in);
  void dump_file(const std::filesystem::path& path) const;
  static SolutionPool restore_file(const std::filesystem::path& path);

 private:
  std::vector<RealVector> solutions_;
  std::set<RealVector> keys_;
  std::size_t init_calls_ = 0;
  std::size_t growth_calls_ = 0;
};

/**
 * @brief Seeds the pool with v*(c_i) for every training instance.
 *
 * Uses a cached optimum when the instance carries one and caches fresh
 * solves back onto the instances. Throws std::invalid_argument on an empty
 * dataset; oracle errors propagate.
 */
SolutionPool init_pool(Dataset& dataset, const Oracle& oracle);

/**
 * @brief With probability p_solve, solves for c_hat and inserts the result.
 *
 * The draw happens before the solve. Returns whether the oracle was called.
 */
bool maybe_grow(SolutionPool& pool, const Oracle& oracle, ConstRealSpan c_hat, double p_solve,
                std::mt19937_64& rng);

}  // namespace dfl

#endif  // DFL_POOL_HPP
