#include "dfl/model.hpp"

#include <cmath>
#include <random>

namespace dfl {

namespace {

bool all_finite(const RealVector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

void ModelGradient::accumulate(ConstRealSpan x, ConstRealSpan dz) {
  const std::size_t k = dz.size();
  if (weights.size() != x.size() * k) throw std::invalid_argument("gradient shape mismatch");
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (x[p] == 0.0) continue;
    double* row = weights.data() + p * k;
    for (std::size_t j = 0; j < k; ++j) row[j] += x[p] * dz[j];
  }
  if (!bias.empty()) {
    for (std::size_t j = 0; j < k; ++j) bias[j] += dz[j];
  }
  ++count;
}

void ModelGradient::clear() {
  std::fill(weights.begin(), weights.end(), 0.0);
  std::fill(bias.begin(), bias.end(), 0.0);
  count = 0;
}

LinearModel::LinearModel(std::size_t features, std::size_t outputs, bool bias, std::uint64_t seed)
    : features_(features), outputs_(outputs), has_bias_(bias), seed_(seed) {
  if (features == 0 || outputs == 0) throw std::invalid_argument("LinearModel: empty shape");
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(features));
  std::uniform_real_distribution<double> init(-bound, bound);
  weights_.resize(features * outputs);
  for (double& w : weights_) w = init(rng);
  if (has_bias_) bias_.assign(outputs, 0.0);
}

void LinearModel::set_output_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("output scale must be positive");
  output_scale_ = scale;
}

void LinearModel::set_parameters(RealVector weights, RealVector bias) {
  if (weights.size() != features_ * outputs_) throw std::invalid_argument("weights shape mismatch");
  if (bias.size() != (has_bias_ ? outputs_ : 0)) throw std::invalid_argument("bias shape mismatch");
  if (!all_finite(weights) || !all_finite(bias)) throw NumericalError("non-finite model parameters");
  weights_ = std::move(weights);
  bias_ = std::move(bias);
}

void LinearModel::check_input(ConstRealSpan x) const {
  if (x.size() != features_) {
    throw std::invalid_argument("feature vector has length " + std::to_string(x.size()) + ", expected " +
                                std::to_string(features_));
  }
}

RealVector LinearModel::raw_forward(ConstRealSpan x) const {
  check_input(x);
  RealVector z = has_bias_ ? bias_ : RealVector(outputs_, 0.0);
  for (std::size_t p = 0; p < features_; ++p) {
    const double xp = x[p];
    const double* row = weights_.data() + p * outputs_;
    for (std::size_t k = 0; k < outputs_; ++k) z[k] += xp * row[k];
  }
  return z;
}

RealVector LinearModel::forward(ConstRealSpan x) const {
  RealVector z = raw_forward(x);
  if (output_scale_ != 1.0) {
    for (double& v : z) v *= output_scale_;
  }
  return z;
}

ModelGradient LinearModel::zero_gradient() const {
  return {RealVector(features_ * outputs_, 0.0), RealVector(has_bias_ ? outputs_ : 0, 0.0), 0};
}

void LinearModel::backward_and_step(ConstRealSpan x, ConstRealSpan dz, double lr) {
  check_input(x);
  if (dz.size() != outputs_) throw std::invalid_argument("gradient length mismatch");
  ModelGradient g = zero_gradient();
  g.accumulate(x, dz);
  step(g, lr);
}

void LinearModel::step(const ModelGradient& gradient, double lr, double divisor) {
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (gradient.weights.size() != weights_.size() || gradient.bias.size() != bias_.size()) {
    throw std::invalid_argument("gradient shape mismatch");
  }
  if (!all_finite(gradient.weights) || !all_finite(gradient.bias)) {
    throw NumericalError("non-finite gradient");
  }
  const double rate = lr / divisor;
  RealVector w = weights_;
  RealVector b = bias_;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= rate * gradient.weights[i];
  for (std::size_t i = 0; i < b.size(); ++i) b[i] -= rate * gradient.bias[i];
  if (!all_finite(w) || !all_finite(b)) throw NumericalError("parameters diverged to non-finite values");
  weights_ = std::move(w);
  bias_ = std::move(b);
}

nlohmann::json LinearModel::to_json(std::size_t epoch) const {
  return {{"features", features_}, {"outputs", outputs_}, {"weights", weights_},
          {"bias", has_bias_ ? nlohmann::json(bias_) : nlohmann::json(nullptr)},
          {"seed", seed_},         {"epoch", epoch},      {"output_scale", output_scale_}};
}

LinearModel LinearModel::from_json(const nlohmann::json& j) {
  const bool bias = j.contains("bias") && !j.at("bias").is_null();
  LinearModel model(j.at("features").get<std::size_t>(), j.at("outputs").get<std::size_t>(), bias,
                    j.value("seed", std::uint64_t{0}));
  model.set_parameters(j.at("weights").get<RealVector>(), bias ? j.at("bias").get<RealVector>() : RealVector{});
  model.set_output_scale(j.value("output_scale", 1.0));
  return model;
}

}  // namespace dfl
