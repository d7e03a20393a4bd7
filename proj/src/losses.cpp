#include "dfl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dfl {

namespace {

double dot(const RealVector& v, ConstRealSpan c) {
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += v[k] * c[k];
  return s;
}

void check_dims(ConstRealSpan c_hat, ConstRealSpan c) {
  if (c_hat.size() != c.size()) throw std::invalid_argument("loss: c_hat and c lengths differ");
}

void check_pool(PoolView pool, std::size_t k) {
  if (pool.empty()) throw StateError("loss: solution pool is empty");
  for (const auto& v : pool) {
    if (v.size() != k) throw std::invalid_argument("loss: pool member length mismatch");
  }
}

void check_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("temperature must be positive");
  }
}

/// log p(v | c) for every pool member, via log-sum-exp.
/// exp of the shifted logits divided by their sum.
RealVector softmax_probs(ConstRealSpan c, PoolView pool, double temperature) {
  RealVector probs = pool_scores(pool, c);
  for (double& z : probs) z = -z / temperature;
  const double peak = *std::max_element(probs.begin(), probs.end());
  double total = 0.0;
  for (double& z : probs) total += (z = std::exp(z - peak));
  for (double& z : probs) z /= total;
  return probs;
}

RealVector log_softmax(ConstRealSpan c, PoolView pool, double temperature) {
  RealVector logits = pool_scores(pool, c);
  for (double& z : logits) z = -z / temperature;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - peak);
  const double log_norm = peak + std::log(total);
  for (double& z : logits) z -= log_norm;
  return logits;
}

/// sum_v w_v v
RealVector weighted_sum(PoolView pool, ConstRealSpan weights, std::size_t k) {
  RealVector out(k, 0.0);
  for (std::size_t s = 0; s < pool.size(); ++s) {
    if (weights[s] == 0.0) continue;
    for (std::size_t i = 0; i < k; ++i) out[i] += weights[s] * pool[s][i];
  }
  return out;
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kMse: return "mse";
    case LossKind::kPointwise: return "pointwise";
    case LossKind::kPairwise: return "pairwise";
    case LossKind::kPairwiseDiff: return "pairwise_diff";
    case LossKind::kListwise: return "listwise";
    case LossKind::kListwiseKl: return "listwise_kl";
    case LossKind::kNce: return "nce";
    case LossKind::kCombined: return "combined";
  }
  return "mse";
}

LossKind parse_loss_kind(std::string_view text) {
  for (auto kind : {LossKind::kMse, LossKind::kPointwise, LossKind::kPairwise, LossKind::kPairwiseDiff,
                    LossKind::kListwise, LossKind::kListwiseKl, LossKind::kNce, LossKind::kCombined}) {
    if (text == to_string(kind)) return kind;
  }
  if (text == "twostage" || text == "two_stage") return LossKind::kMse;
  throw std::invalid_argument("unknown loss kind '" + std::string(text) + "'");
}

std::string_view to_string(PairScheme scheme) {
  return scheme == PairScheme::kBestVersusRest ? "best_versus_rest" : "all_pairs";
}

PairScheme parse_pair_scheme(std::string_view text) {
  if (text == "best_versus_rest") return PairScheme::kBestVersusRest;
  if (text == "all_pairs") return PairScheme::kAllPairs;
  throw std::invalid_argument("unknown pair scheme '" + std::string(text) + "'");
}

std::string_view to_string(PairDiffNorm norm) { return norm == PairDiffNorm::kPairs ? "pairs" : "pool"; }

PairDiffNorm parse_pairdiff_norm(std::string_view text) {
  if (text == "pairs") return PairDiffNorm::kPairs;
  if (text == "pool") return PairDiffNorm::kPool;
  throw std::invalid_argument("unknown pairdiff_norm '" + std::string(text) + "'");
}

void LossSpec::validate() const {
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw std::invalid_argument("margin must be >= 0");
  check_temperature(temperature);
  if (!(mix_alpha >= 0.0 && mix_alpha <= 1.0)) throw std::invalid_argument("mix_alpha must lie in [0, 1]");
}

RealVector pool_scores(PoolView pool, ConstRealSpan cost) {
  RealVector scores(pool.size());
  for (std::size_t s = 0; s < pool.size(); ++s) scores[s] = dot(pool[s], cost);
  return scores;
}

std::size_t pool_best(PoolView pool, ConstRealSpan cost) {
  check_pool(pool, cost.size());
  const RealVector scores = pool_scores(pool, cost);
  const double low = *std::min_element(scores.begin(), scores.end());
  std::size_t best = pool.size();
  for (std::size_t s = 0; s < pool.size(); ++s) {
    if (scores[s] > low + kTolerance) continue;
    if (best == pool.size() || pool[best] < pool[s]) best = s;
  }
  return best;
}

LossResult mse(ConstRealSpan c_hat, ConstRealSpan c) {
  check_dims(c_hat, c);
  LossResult out{0.0, RealVector(c.size())};
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double err = c[k] - c_hat[k];
    out.value += err * err;
    out.gradient[k] = -2.0 * err;
  }
  return out;
}

LossResult pointwise(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool) {
  check_dims(c_hat, c);
  check_pool(pool, c.size());
  const double inv = 1.0 / static_cast<double>(pool.size());
  RealVector weights(pool.size());
  double value = 0.0;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    const double gap = dot(pool[s], c) - dot(pool[s], c_hat);
    value += gap * gap;
    weights[s] = -2.0 * inv * gap;
  }
  return {value * inv, weighted_sum(pool, weights, c.size())};
}

double pointwise_weighted_form(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool) {
  check_dims(c_hat, c);
  check_pool(pool, c.size());
  const std::size_t k = c.size();
  const double inv = 1.0 / static_cast<double>(pool.size());
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double ei = c_hat[i] - c[i];
    for (std::size_t j = 0; j < k; ++j) {
      double gamma = 0.0;
      for (const auto& v : pool) gamma += v[i] * v[j];
      total += ei * (c_hat[j] - c[j]) * gamma * inv;
    }
  }
  return total;
}

OrderedPairs generate_pairs(PoolView pool, ConstRealSpan c, PairScheme scheme) {
  OrderedPairs pairs;
  if (pool.size() < 2) return pairs;
  check_pool(pool, c.size());
  const RealVector scores = pool_scores(pool, c);
  if (scheme == PairScheme::kBestVersusRest) {
    const std::size_t best = pool_best(pool, c);
    for (std::size_t q = 0; q < pool.size(); ++q) {
      if (scores[q] > scores[best] + kTolerance) pairs.push_back({best, q});
    }
    return pairs;
  }
  for (std::size_t p = 0; p < pool.size(); ++p) {
    for (std::size_t q = 0; q < pool.size(); ++q) {
      if (scores[p] < scores[q] - kTolerance) pairs.push_back({p, q});
    }
  }
  return pairs;
}

LossResult pairwise(ConstRealSpan c_hat, PoolView pool, const OrderedPairs& pairs, double margin) {
  const std::size_t k = c_hat.size();
  LossResult out{0.0, RealVector(k, 0.0)};
  if (pairs.empty()) return out;
  check_pool(pool, k);
  const RealVector scores = pool_scores(pool, c_hat);
  const double inv = 1.0 / static_cast<double>(pairs.size());
  for (const auto& [p, q] : pairs) {
    const double arg = margin + scores[p] - scores[q];
    if (arg <= 0.0) continue;
    out.value += arg;
    for (std::size_t i = 0; i < k; ++i) out.gradient[i] += pool[p][i] - pool[q][i];
  }
  out.value *= inv;
  for (double& g : out.gradient) g *= inv;
  return out;
}

LossResult nce(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool) {
  check_dims(c_hat, c);
  check_pool(pool, c.size());
  const std::size_t k = c.size();
  const std::size_t best = pool_best(pool, c);
  const RealVector scores = pool_scores(pool, c_hat);
  const double inv = 1.0 / static_cast<double>(pool.size());
  LossResult out{0.0, RealVector(k, 0.0)};
  for (std::size_t s = 0; s < pool.size(); ++s) {
    out.value += scores[best] - scores[s];
    for (std::size_t i = 0; i < k; ++i) out.gradient[i] += pool[best][i] - pool[s][i];
  }
  out.value *= inv;
  for (double& g : out.gradient) g *= inv;
  return out;
}

namespace {

double pairdiff_normalizer(PoolView pool, const OrderedPairs& pairs, PairDiffNorm norm) {
  return norm == PairDiffNorm::kPairs ? static_cast<double>(pairs.size())
                                      : static_cast<double>(pool.size());
}

}  // namespace

LossResult pairwise_diff(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool,
                         const OrderedPairs& pairs, PairDiffNorm norm) {
  check_dims(c_hat, c);
  const std::size_t k = c.size();
  LossResult out{0.0, RealVector(k, 0.0)};
  if (pairs.empty()) return out;
  check_pool(pool, k);
  const RealVector pred = pool_scores(pool, c_hat);
  const RealVector truth = pool_scores(pool, c);
  const double inv = 1.0 / pairdiff_normalizer(pool, pairs, norm);
  for (const auto& [p, q] : pairs) {
    const double residual = (pred[p] - pred[q]) - (truth[p] - truth[q]);
    out.value += residual * residual;
    for (std::size_t i = 0; i < k; ++i) out.gradient[i] += 2.0 * residual * (pool[p][i] - pool[q][i]);
  }
  out.value *= inv;
  for (double& g : out.gradient) g *= inv;
  return out;
}

double pairwise_diff_weighted_form(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool,
                                   const OrderedPairs& pairs, PairDiffNorm norm) {
  check_dims(c_hat, c);
  if (pairs.empty()) return 0.0;
  check_pool(pool, c.size());
  const std::size_t k = c.size();
  const double inv = 1.0 / pairdiff_normalizer(pool, pairs, norm);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double ei = c_hat[i] - c[i];
    for (std::size_t j = 0; j < k; ++j) {
      double gamma = 0.0;
      for (const auto& [p, q] : pairs) gamma += (pool[p][i] - pool[q][i]) * (pool[p][j] - pool[q][j]);
      total += ei * (c_hat[j] - c[j]) * gamma * inv;
    }
  }
  return total;
}

RealVector softmax_distribution(ConstRealSpan c, PoolView pool, double temperature) {
  check_temperature(temperature);
  check_pool(pool, c.size());
  return softmax_probs(c, pool, temperature);
}

namespace {

struct ListwiseParts {
  RealVector log_p_true;
  RealVector log_p_pred;
  RealVector gradient;
};

ListwiseParts listwise_parts(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool, double temperature) {
  check_dims(c_hat, c);
  check_temperature(temperature);
  check_pool(pool, c.size());
  const std::size_t k = c.size();
  ListwiseParts parts{log_softmax(c, pool, temperature), log_softmax(c_hat, pool, temperature), {}};
  const RealVector p_true = softmax_probs(c, pool, temperature);
  const RealVector p_pred = softmax_probs(c_hat, pool, temperature);
  const RealVector mean_true = weighted_sum(pool, p_true, k);
  const RealVector mean_pred = weighted_sum(pool, p_pred, k);
  const double scale = 1.0 / (static_cast<double>(pool.size()) * temperature);
  parts.gradient.resize(k);
  for (std::size_t i = 0; i < k; ++i) parts.gradient[i] = scale * (mean_true[i] - mean_pred[i]);
  return parts;
}

}  // namespace

LossResult listwise(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool, double temperature) {
  ListwiseParts parts = listwise_parts(c_hat, c, pool, temperature);
  double value = 0.0;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    value -= std::exp(parts.log_p_true[s]) * parts.log_p_pred[s];
  }
  return {value / static_cast<double>(pool.size()), std::move(parts.gradient)};
}

LossResult listwise_kl(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool, double temperature) {
  ListwiseParts parts = listwise_parts(c_hat, c, pool, temperature);
  double value = 0.0;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    const double p = std::exp(parts.log_p_true[s]);
    if (p > 0.0) value += p * (parts.log_p_true[s] - parts.log_p_pred[s]);
  }
  return {value / static_cast<double>(pool.size()), std::move(parts.gradient)};
}

LossResult combined(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool, double temperature,
                    double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("mix_alpha must lie in [0, 1]");
  const LossResult rank = listwise(c_hat, c, pool, temperature);
  const LossResult reg = mse(c_hat, c);
  LossResult out{alpha * rank.value + (1.0 - alpha) * reg.value, RealVector(c.size())};
  for (std::size_t i = 0; i < c.size(); ++i) {
    out.gradient[i] = alpha * rank.gradient[i] + (1.0 - alpha) * reg.gradient[i];
  }
  return out;
}

LossResult evaluate_loss(const LossSpec& spec, ConstRealSpan c_hat, ConstRealSpan c, PoolView pool) {
  switch (spec.kind) {
    case LossKind::kMse: return mse(c_hat, c);
    case LossKind::kPointwise: return pointwise(c_hat, c, pool);
    case LossKind::kPairwise:
      return pairwise(c_hat, pool, generate_pairs(pool, c, spec.pair_scheme), spec.margin);
    case LossKind::kPairwiseDiff:
      return pairwise_diff(c_hat, c, pool, generate_pairs(pool, c, spec.pair_scheme), spec.pairdiff_norm);
    case LossKind::kListwise: return listwise(c_hat, c, pool, spec.temperature);
    case LossKind::kListwiseKl: return listwise_kl(c_hat, c, pool, spec.temperature);
    case LossKind::kNce: return nce(c_hat, c, pool);
    case LossKind::kCombined: return combined(c_hat, c, pool, spec.temperature, spec.mix_alpha);
  }
  throw std::invalid_argument("unknown loss kind");
}

}  // namespace dfl
