/**
 * @file grid.hpp
 * @brief Monotone shortest path on an n x n grid, southwest to northeast.
 *
 * Node (row, col) has id row * n + col, rows counted from the south. Edges
 * are indexed by source node id, east edge before north edge, giving
 * K = 2 n (n - 1) edges.
 */

#ifndef DFL_GRID_HPP
#define DFL_GRID_HPP

#include "dfl/core.hpp"
#include "dfl/problem_spec.hpp"

namespace dfl {

struct GridSpec {
  std::size_t side = 5;

  [[nodiscard]] std::size_t nodes() const { return side * side; }
  [[nodiscard]] std::size_t edges() const { return 2 * side * (side - 1); }
  void validate() const;
};

struct GridEdge {
  std::size_t from;
  std::size_t to;
};

std::vector<GridEdge> grid_edges(const GridSpec& grid);

/// Flow formulation A x = b with b = +1 at the source and -1 at the sink.
ProblemSpec grid_problem_spec(const GridSpec& grid);

/**
 * @brief Dynamic program over the grid DAG.
 *
 * At every node the east edge is taken unless the north continuation is
 * cheaper by more than kTolerance, which is the tie_preferred() path.
 */
BinaryVector solve_grid_shortest_path(const GridSpec& grid, ConstRealSpan cost);

class GridShortestPathOracle final : public Oracle {
 public:
  explicit GridShortestPathOracle(GridSpec grid);

  [[nodiscard]] std::size_t cost_dimension() const override { return grid_.edges(); }
  [[nodiscard]] std::size_t decision_dimension() const override { return grid_.edges(); }
  [[nodiscard]] ObjectiveSense sense() const override { return ObjectiveSense::kMinimize; }
  [[nodiscard]] BinaryVector solve(ConstRealSpan cost) const override {
    return solve_grid_shortest_path(grid_, cost);
  }
  [[nodiscard]] bool is_feasible(const BinaryVector& x) const override { return spec_.is_feasible(x); }

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] const ProblemSpec& spec() const { return spec_; }

 private:
  GridSpec grid_;
  ProblemSpec spec_;
};

}  // namespace dfl

#endif  // DFL_GRID_HPP
