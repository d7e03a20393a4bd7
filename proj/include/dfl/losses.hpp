/**
 * @file losses.hpp
 * @brief Ranking surrogate losses over a solution pool, with analytic gradients.
 *
 * Every loss is written for minimization: a solution v scores f(v, c) = c^T v
 * and lower is better. Maximization problems are handled by the caller
 * negating both cost vectors (and the returned gradient). Pool members are
 * arbitrary nonnegative vectors; binary assignments are the common case.
 */

#ifndef DFL_LOSSES_HPP
#define DFL_LOSSES_HPP

#include <span>
#include <string>

#include "dfl/types.hpp"

namespace dfl {

using PoolView = std::span<const RealVector>;

struct LossResult {
  double value = 0.0;
  RealVector gradient;  ///< dL / dc_hat
};

enum class LossKind { kMse, kPointwise, kPairwise, kPairwiseDiff, kListwise, kListwiseKl, kNce, kCombined };
enum class PairScheme { kBestVersusRest, kAllPairs };
/// Normalizer of the pairwise-difference loss: number of pairs or pool size.
enum class PairDiffNorm { kPairs, kPool };

std::string_view to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view text);
std::string_view to_string(PairScheme scheme);
PairScheme parse_pair_scheme(std::string_view text);
std::string_view to_string(PairDiffNorm norm);
PairDiffNorm parse_pairdiff_norm(std::string_view text);

struct LossSpec {
  LossKind kind = LossKind::kListwise;
  double margin = 0.0;        ///< hinge margin of the pairwise loss
  double temperature = 1.0;   ///< softmax temperature of the listwise losses
  double mix_alpha = 0.5;     ///< weight of the listwise term in the combined loss
  PairScheme pair_scheme = PairScheme::kBestVersusRest;
  PairDiffNorm pairdiff_norm = PairDiffNorm::kPairs;

  /// Throws std::invalid_argument on out-of-range hyperparameters.
  void validate() const;
  /// True for losses that read the pool.
  [[nodiscard]] bool uses_pool() const { return kind != LossKind::kMse; }
};

/// Pair (better, worse) of pool indices with f(v_better, c) < f(v_worse, c).
struct OrderedPair {
  std::size_t better;
  std::size_t worse;
};
using OrderedPairs = std::vector<OrderedPair>;

/// f(v, c) for every pool member.
RealVector pool_scores(PoolView pool, ConstRealSpan cost);

/**
 * @brief Index of the pool's best member under c.
 *
 * Near-ties (within kTolerance) go to the lexicographically greatest vector,
 * so the choice does not depend on pool order.
 */
std::size_t pool_best(PoolView pool, ConstRealSpan cost);

/// sum_k (c_k - c_hat_k)^2.
LossResult mse(ConstRealSpan c_hat, ConstRealSpan c);

/// (1/|S|) sum_v (f(v, c_hat) - f(v, c))^2. Throws StateError on an empty pool.
LossResult pointwise(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool);

/// sum_i e_i^2 g_i + sum_{i != j} e_i e_j g_ij with pool co-occurrence weights.
double pointwise_weighted_form(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool);

/**
 * @brief Strictly ordered pairs under c.
 *
 * Best-versus-rest pairs pool_best() with every member scoring worse by more
 * than kTolerance; all-pairs lists every such ordered pair.
 */
OrderedPairs generate_pairs(PoolView pool, ConstRealSpan c, PairScheme scheme);

/// Mean hinge max(0, margin + f(v_p, c_hat) - f(v_q, c_hat)); zero on no pairs.
LossResult pairwise(ConstRealSpan c_hat, PoolView pool, const OrderedPairs& pairs, double margin);

/// (1/|S|) sum_v (f(v*, c_hat) - f(v, c_hat)) with v* = pool_best(pool, c).
LossResult nce(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool);

/**
 * @brief Squared error between predicted and true objective gaps over pairs.
 *
 * Normalized by the number of pairs, or by |S| under PairDiffNorm::kPool.
 */
LossResult pairwise_diff(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool,
                         const OrderedPairs& pairs, PairDiffNorm norm = PairDiffNorm::kPairs);

/// Weighted-MSE form of pairwise_diff() with weights from pair differences.
double pairwise_diff_weighted_form(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool,
                                   const OrderedPairs& pairs,
                                   PairDiffNorm norm = PairDiffNorm::kPairs);

/// p(v | c) proportional to exp(-f(v, c) / temperature), normalized over the pool.
RealVector softmax_distribution(ConstRealSpan c, PoolView pool, double temperature);

/// -(1/|S|) sum_v p(v | c) log p(v | c_hat).
LossResult listwise(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool, double temperature);

/// (1/|S|) sum_v p(v | c) (log p(v | c) - log p(v | c_hat)).
LossResult listwise_kl(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool, double temperature);

/// alpha * listwise + (1 - alpha) * mse.
LossResult combined(ConstRealSpan c_hat, ConstRealSpan c, PoolView pool, double temperature,
                    double alpha);

/// Dispatches on spec.kind.
LossResult evaluate_loss(const LossSpec& spec, ConstRealSpan c_hat, ConstRealSpan c, PoolView pool);

}  // namespace dfl

#endif  // DFL_LOSSES_HPP
