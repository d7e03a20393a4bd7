/**
 * @file model.hpp
 * @brief Linear cost predictor c_hat = s * (W^T x + b) trained by plain SGD.
 *
 * The output scale s is a fixed, non-trained constant (1 by default). Training
 * works on the raw output z = W^T x + b, so every gradient passed to this class
 * is taken with respect to z.
 */

#ifndef DFL_MODEL_HPP
#define DFL_MODEL_HPP

#include <cstdint>

#include "dfl/types.hpp"
#include "json.hpp"

namespace dfl {

/// Accumulated parameter gradient for accumulate-then-step updates.
struct ModelGradient {
  RealVector weights;  ///< P x K, row-major
  RealVector bias;     ///< K (empty without bias)
  std::size_t count = 0;

  /// Adds x (outer) dz and dz.
  void accumulate(ConstRealSpan x, ConstRealSpan dz);
  void clear();
};

class LinearModel {
 public:
  /// Weights iid uniform in [-1/sqrt(P), 1/sqrt(P)], bias zero.
  LinearModel(std::size_t features, std::size_t outputs, bool bias, std::uint64_t seed);

  [[nodiscard]] std::size_t features() const { return features_; }
  [[nodiscard]] std::size_t outputs() const { return outputs_; }
  [[nodiscard]] bool has_bias() const { return has_bias_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] double output_scale() const { return output_scale_; }
  void set_output_scale(double scale);

  /// Row-major P x K; W(p, k) = weights()[p * K + k].
  [[nodiscard]] const RealVector& weights() const { return weights_; }
  [[nodiscard]] const RealVector& bias() const { return bias_; }
  void set_parameters(RealVector weights, RealVector bias);

  /// z = W^T x + b.
  [[nodiscard]] RealVector raw_forward(ConstRealSpan x) const;
  /// c_hat = s * z.
  [[nodiscard]] RealVector forward(ConstRealSpan x) const;

  [[nodiscard]] ModelGradient zero_gradient() const;

  /**
   * @brief Single SGD step with dL/dW = x dz^T and dL/db = dz.
   *
   * Throws NumericalError (model untouched) if dz or the updated parameters
   * are not finite, std::invalid_argument if lr <= 0.
   */
  void backward_and_step(ConstRealSpan x, ConstRealSpan dz, double lr);

  /// Steps by lr * gradient / divisor.
  void step(const ModelGradient& gradient, double lr, double divisor = 1.0);

  [[nodiscard]] nlohmann::json to_json(std::size_t epoch = 0) const;
  static LinearModel from_json(const nlohmann::json& j);

 private:
  void check_input(ConstRealSpan x) const;

  std::size_t features_;
  std::size_t outputs_;
  bool has_bias_;
  std::uint64_t seed_;
  double output_scale_ = 1.0;
  RealVector weights_;
  RealVector bias_;
};

}  // namespace dfl

#endif  // DFL_MODEL_HPP
