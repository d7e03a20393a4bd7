// Shared fixtures and brute-force references for the unit and acceptance tests.
#ifndef DFL_TESTS_SUPPORT_HPP
#define DFL_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "dfl/enumeration.hpp"
#include "dfl/losses.hpp"
#include "dfl/problem_spec.hpp"

namespace testing {

using dfl::BinaryVector;
using dfl::RealVector;

/// The unconstrained two-variable toy problem with c = [2, -5].
inline dfl::ProblemSpec toy_spec() { return dfl::ProblemSpec(2, dfl::ObjectiveSense::kMinimize, {}); }
inline const RealVector kToyCost{2.0, -5.0};
inline const RealVector kToyHat1{-1.0, 1.0};
inline const RealVector kToyHat2{5.0, -11.0};

/// All four points of {0,1}^2 in lexicographic order.
inline std::vector<RealVector> toy_pool() { return {{0, 0}, {0, 1}, {1, 0}, {1, 1}}; }

inline RealVector random_vector(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  RealVector v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

inline std::vector<RealVector> random_binary_pool(std::size_t size, std::size_t k, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<RealVector> pool(size, RealVector(k));
  for (auto& v : pool) {
    for (double& x : v) x = coin(rng) ? 1.0 : 0.0;
  }
  return pool;
}

inline double dot(const RealVector& a, const RealVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Central finite-difference gradient of f at x.
inline RealVector numeric_gradient(const std::function<double(const RealVector&)>& f, RealVector x,
                                   double h = 1e-6) {
  RealVector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double up = f(x);
    x[i] = orig - h;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - b_i| / max(1, |b_i|)
inline double relative_error(const RealVector& a, const RealVector& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  }
  return worst;
}

/// Random 0-1 program with a few <= rows; always feasible because every row admits x = 0.
inline dfl::ProblemSpec random_le_spec(std::size_t k, std::size_t rows, std::mt19937_64& rng,
                                       dfl::ObjectiveSense sense = dfl::ObjectiveSense::kMinimize) {
  std::uniform_int_distribution<int> coef(-2, 4);
  std::uniform_int_distribution<int> rhs(0, 6);
  std::vector<dfl::LinearConstraint> cons;
  for (std::size_t r = 0; r < rows; ++r) {
    dfl::LinearConstraint c{RealVector(k), dfl::Comparator::kLessEqual, static_cast<double>(rhs(rng))};
    for (double& a : c.coeffs) a = coef(rng);
    cons.push_back(std::move(c));
  }
  return dfl::ProblemSpec(k, sense, std::move(cons));
}

/// Brute-force optimum: the best value over all feasible points, ties within
/// the tolerance going to the tie-preferred assignment.
inline BinaryVector brute_force_optimum(const dfl::ProblemSpec& spec, const RealVector& cost) {
  const RealVector coef = spec.objective_coefficients(cost);
  const double sign = dfl::sense_sign(spec.sense());
  const auto points = dfl::enumerate_feasible(spec);
  RealVector values;
  for (const auto& x : points) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) v += x[i] * coef[i];
    values.push_back(sign * v);
  }
  const double low = *std::min_element(values.begin(), values.end());
  std::optional<BinaryVector> best;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (values[i] > low + dfl::kTolerance) continue;
    if (!best || dfl::tie_preferred(points[i], *best)) best = points[i];
  }
  return *best;
}

}  // namespace testing

#endif  // DFL_TESTS_SUPPORT_HPP
