/**
 * @file types.hpp
 * @brief Shared domain types for decision-focused learning over 0-1 problems.
 */

#ifndef DFL_TYPES_HPP
#define DFL_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dfl {

/// Real parameter vector (costs, prices, rewards) and solution images.
using RealVector = std::vector<double>;

/// 0-1 decision vector.
using BinaryVector = std::vector<std::uint8_t>;

using ConstRealSpan = std::span<const double>;

/// Absolute tolerance used for objective and constraint comparisons.
inline constexpr double kTolerance = 1e-9;

enum class ObjectiveSense { kMinimize, kMaximize };

/// +1 for minimization, -1 for maximization.
constexpr double sense_sign(ObjectiveSense sense) {
  return sense == ObjectiveSense::kMinimize ? 1.0 : -1.0;
}

std::string_view to_string(ObjectiveSense sense);
ObjectiveSense parse_sense(std::string_view text);

enum class Split { kTrain, kValidation, kTest };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

/// One observation (x_i, c_i), optionally with its optimal decision cached.
struct Instance {
  RealVector features;
  RealVector cost;
  std::optional<BinaryVector> optimal;
};

struct Dataset {
  std::vector<Instance> instances;
  Split split = Split::kTrain;
  std::string problem_id;

  [[nodiscard]] std::size_t size() const { return instances.size(); }
  [[nodiscard]] bool empty() const { return instances.empty(); }
  [[nodiscard]] std::size_t feature_dimension() const;
  [[nodiscard]] std::size_t cost_dimension() const;

  /// Throws std::invalid_argument unless nonempty with uniform P and K.
  void validate() const;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite loss, gradient or parameter encountered during training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid-state errors (empty pool and the like).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dfl

#endif  // DFL_TYPES_HPP
