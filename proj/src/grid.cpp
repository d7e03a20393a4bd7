#include "dfl/grid.hpp"

#include <limits>

namespace dfl {

void GridSpec::validate() const {
  if (side < 2) throw std::invalid_argument("grid side must be at least 2");
}

std::vector<GridEdge> grid_edges(const GridSpec& grid) {
  grid.validate();
  const std::size_t n = grid.side;
  std::vector<GridEdge> edges;
  edges.reserve(grid.edges());
  for (std::size_t u = 0; u < grid.nodes(); ++u) {
    const std::size_t row = u / n;
    const std::size_t col = u % n;
    if (col + 1 < n) edges.push_back({u, u + 1});
    if (row + 1 < n) edges.push_back({u, u + n});
  }
  return edges;
}

ProblemSpec grid_problem_spec(const GridSpec& grid) {
  const auto edges = grid_edges(grid);
  const std::size_t k = edges.size();
  std::vector<LinearConstraint> constraints;
  constraints.reserve(grid.nodes());
  for (std::size_t node = 0; node < grid.nodes(); ++node) {
    LinearConstraint con{RealVector(k, 0.0), Comparator::kEqual, 0.0};
    for (std::size_t e = 0; e < k; ++e) {
      if (edges[e].from == node) con.coeffs[e] = 1.0;
      if (edges[e].to == node) con.coeffs[e] = -1.0;
    }
    if (node == 0) con.rhs = 1.0;
    if (node + 1 == grid.nodes()) con.rhs = -1.0;
    constraints.push_back(std::move(con));
  }
  nlohmann::json meta = {{"family", "grid_shortest_path"},
                         {"grid", grid.side},
                         {"id", "grid-" + std::to_string(grid.side)}};
  return ProblemSpec(k, ObjectiveSense::kMinimize, std::move(constraints), std::move(meta));
}

BinaryVector solve_grid_shortest_path(const GridSpec& grid, ConstRealSpan cost) {
  grid.validate();
  if (cost.size() != grid.edges()) {
    throw std::invalid_argument("grid shortest path: cost length " + std::to_string(cost.size()) +
                                ", expected " + std::to_string(grid.edges()));
  }
  require_finite(cost, "cost vector");
  const std::size_t n = grid.side;
  const std::size_t nodes = grid.nodes();

  // Edge ids of each node's outgoing east/north edges, matching grid_edges().
  std::vector<std::size_t> east(nodes, SIZE_MAX), north(nodes, SIZE_MAX);
  std::size_t e = 0;
  for (std::size_t u = 0; u < nodes; ++u) {
    if (u % n + 1 < n) east[u] = e++;
    if (u / n + 1 < n) north[u] = e++;
  }

  RealVector to_sink(nodes, std::numeric_limits<double>::infinity());
  to_sink[nodes - 1] = 0.0;
  for (std::size_t step = 1; step < nodes; ++step) {
    const std::size_t u = nodes - 1 - step;
    double best = std::numeric_limits<double>::infinity();
    if (east[u] != SIZE_MAX) best = std::min(best, cost[east[u]] + to_sink[u + 1]);
    if (north[u] != SIZE_MAX) best = std::min(best, cost[north[u]] + to_sink[u + n]);
    to_sink[u] = best;
  }

  BinaryVector x(grid.edges(), 0);
  std::size_t u = 0;
  while (u != nodes - 1) {
    const bool has_east = east[u] != SIZE_MAX;
    const bool has_north = north[u] != SIZE_MAX;
    bool go_east = has_east;
    if (has_east && has_north) {
      const double via_east = cost[east[u]] + to_sink[u + 1];
      const double via_north = cost[north[u]] + to_sink[u + n];
      go_east = !(via_north < via_east - kTolerance);
    }
    if (go_east) {
      x[east[u]] = 1;
      u += 1;
    } else {
      x[north[u]] = 1;
      u += n;
    }
  }
  return x;
}

GridShortestPathOracle::GridShortestPathOracle(GridSpec grid)
    : grid_(grid), spec_(grid_problem_spec(grid)) {}

}  // namespace dfl
