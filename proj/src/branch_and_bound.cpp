#include "dfl/branch_and_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dfl {

namespace {

constexpr std::int8_t kFree = -1;

struct Row {
  std::vector<std::uint32_t> vars;
  std::vector<double> coeffs;
  Comparator cmp;
  double rhs;
  bool unit;  // every nonzero coefficient is 1 and rhs is a nonnegative integer
};

std::vector<std::uint32_t> pick_disjoint_unit_rows(const std::vector<Row>& rows, std::size_t k,
                                                   bool reverse) {
  std::vector<std::uint8_t> used(k, 0);
  std::vector<std::uint32_t> picked;
  const std::size_t n = rows.size();
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t r = reverse ? n - 1 - step : step;
    const Row& row = rows[r];
    if (!row.unit || row.vars.empty()) continue;
    bool clash = false;
    for (auto v : row.vars) clash = clash || used[v] != 0;
    if (clash) continue;
    for (auto v : row.vars) used[v] = 1;
    picked.push_back(static_cast<std::uint32_t>(r));
  }
  return picked;
}

}  // namespace

struct BranchAndBound::Compiled {
  std::size_t k = 0;
  std::vector<Row> rows;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> columns;
  std::vector<std::vector<std::uint32_t>> families;
  // family_row[f][j] = row of family f covering variable j, or -1.
  std::vector<std::vector<std::int32_t>> family_row;

  explicit Compiled(const ProblemSpec& spec) : k(spec.dimension()), columns(spec.dimension()) {
    for (const auto& con : spec.constraints()) {
      Row row{{}, {}, con.cmp, con.rhs, true};
      for (std::size_t j = 0; j < k; ++j) {
        if (con.coeffs[j] == 0.0) continue;
        row.vars.push_back(static_cast<std::uint32_t>(j));
        row.coeffs.push_back(con.coeffs[j]);
        row.unit = row.unit && con.coeffs[j] == 1.0;
      }
      row.unit = row.unit && con.rhs >= 0.0 && std::floor(con.rhs) == con.rhs;
      const auto r = static_cast<std::uint32_t>(rows.size());
      for (std::size_t i = 0; i < row.vars.size(); ++i) {
        columns[row.vars[i]].emplace_back(r, row.coeffs[i]);
      }
      rows.push_back(std::move(row));
    }
    auto forward = pick_disjoint_unit_rows(rows, k, false);
    auto backward = pick_disjoint_unit_rows(rows, k, true);
    if (!forward.empty()) families.push_back(std::move(forward));
    if (!backward.empty() && (families.empty() || backward != families.front())) {
      families.push_back(std::move(backward));
    }
    for (const auto& fam : families) {
      std::vector<std::int32_t> map(k, -1);
      for (auto r : fam) {
        for (auto v : rows[r].vars) map[v] = static_cast<std::int32_t>(r);
      }
      family_row.push_back(std::move(map));
    }
  }
};

namespace {

/// Mutable search state for one solve call.
class Search {
 public:
  Search(const BranchAndBound::Compiled& model, RealVector coef, const BnbOptions& options)
      : m_(model),
        coef_(std::move(coef)),
        options_(options),
        value_(model.k, kFree),
        min_lhs_(model.rows.size(), 0.0),
        max_lhs_(model.rows.size(), 0.0),
        queued_(model.rows.size(), 0) {
    for (std::size_t r = 0; r < m_.rows.size(); ++r) {
      for (double a : m_.rows[r].coeffs) {
        min_lhs_[r] += std::min(0.0, a);
        max_lhs_[r] += std::max(0.0, a);
      }
    }
  }

  void run() {
    for (std::size_t r = 0; r < m_.rows.size(); ++r) enqueue(r);
    if (!propagate()) return;
    dfs();
  }

  [[nodiscard]] bool has_incumbent() const { return has_incumbent_; }
  [[nodiscard]] const BinaryVector& incumbent() const { return incumbent_; }
  [[nodiscard]] double incumbent_value() const { return incumbent_value_; }
  [[nodiscard]] std::uint64_t nodes() const { return nodes_; }

 private:
  void enqueue(std::size_t r) {
    if (queued_[r] == 0) {
      queued_[r] = 1;
      queue_.push_back(static_cast<std::uint32_t>(r));
    }
  }

  void fix(std::uint32_t j, std::int8_t v) {
    value_[j] = v;
    trail_.push_back(j);
    for (const auto& [r, a] : m_.columns[j]) {
      min_lhs_[r] += a * v - std::min(0.0, a);
      max_lhs_[r] += a * v - std::max(0.0, a);
      enqueue(r);
    }
  }

  bool propagate() {
    bool ok = true;
    while (!queue_.empty()) {
      const std::uint32_t r = queue_.back();
      queue_.pop_back();
      queued_[r] = 0;
      if (ok) ok = propagate_row(r);
    }
    return ok;
  }

  bool propagate_row(std::uint32_t r) {
    const Row& row = m_.rows[r];
    const bool upper = row.cmp != Comparator::kGreaterEqual;
    const bool lower = row.cmp != Comparator::kLessEqual;
    if (upper && min_lhs_[r] > row.rhs + kTolerance) return false;
    if (lower && max_lhs_[r] < row.rhs - kTolerance) return false;
    for (std::size_t i = 0; i < row.vars.size(); ++i) {
      const std::uint32_t j = row.vars[i];
      if (value_[j] != kFree) continue;
      const double a = row.coeffs[i];
      if (upper) {
        const double slack = row.rhs - min_lhs_[r];
        if (std::abs(a) > slack + kTolerance) {
          fix(j, a > 0.0 ? 0 : 1);
          continue;
        }
      }
      if (lower) {
        const double surplus = max_lhs_[r] - row.rhs;
        if (std::abs(a) > surplus + kTolerance) fix(j, a > 0.0 ? 1 : 0);
      }
    }
    return true;
  }

  /// Sum of the `count` smallest entries of `values` (count <= size).
  static double smallest_sum(std::vector<double>& values, std::size_t count) {
    if (count == 0) return 0.0;
    std::partial_sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(count),
                      values.end());
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += values[i];
    return s;
  }

  double family_bound(std::size_t f) {
    const auto& rows_of = m_.family_row[f];
    double total = 0.0;
    for (std::size_t j = 0; j < m_.k; ++j) {
      if (value_[j] == 1) {
        total += coef_[j];
      } else if (value_[j] == kFree && rows_of[j] < 0) {
        total += std::min(0.0, coef_[j]);
      }
    }
    for (auto r : m_.families[f]) {
      const Row& row = m_.rows[r];
      scratch_.clear();
      double ones = 0.0;
      for (auto j : row.vars) {
        if (value_[j] == 1) ones += 1.0;
        if (value_[j] == kFree) scratch_.push_back(coef_[j]);
      }
      const double remaining = row.rhs - ones;
      const std::size_t free_count = scratch_.size();
      switch (row.cmp) {
        case Comparator::kLessEqual: {
          // At most `remaining` free ones; only negative terms help.
          for (double& c : scratch_) c = std::min(0.0, c);
          const auto cap = static_cast<std::size_t>(std::max(0.0, remaining));
          total += smallest_sum(scratch_, std::min(cap, free_count));
          break;
        }
        case Comparator::kGreaterEqual: {
          const auto need = static_cast<std::size_t>(std::max(0.0, remaining));
          if (need > free_count) return std::numeric_limits<double>::infinity();
          for (double c : scratch_) total += std::min(0.0, c);
          for (double& c : scratch_) c = std::max(0.0, c);
          total += smallest_sum(scratch_, need);
          break;
        }
        case Comparator::kEqual: {
          if (remaining < 0.0) return std::numeric_limits<double>::infinity();
          const auto exact = static_cast<std::size_t>(remaining);
          if (exact > free_count) return std::numeric_limits<double>::infinity();
          total += smallest_sum(scratch_, exact);
          break;
        }
      }
    }
    return total;
  }

  double bound() {
    if (options_.plain_bound || m_.families.empty()) {
      double total = 0.0;
      for (std::size_t j = 0; j < m_.k; ++j) {
        if (value_[j] == 1) total += coef_[j];
        else if (value_[j] == kFree) total += std::min(0.0, coef_[j]);
      }
      return total;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < m_.families.size(); ++f) best = std::max(best, family_bound(f));
    return best;
  }

  void dfs() {
    ++nodes_;
    if (options_.node_limit != 0 && nodes_ > options_.node_limit) {
      throw std::runtime_error("branch-and-bound node limit exceeded");
    }
    if (has_incumbent_ && bound() >= incumbent_value_ - kTolerance) return;

    std::size_t branch_var = m_.k;
    for (std::size_t j = 0; j < m_.k; ++j) {
      if (value_[j] == kFree) {
        branch_var = j;
        break;
      }
    }
    if (branch_var == m_.k) {
      BinaryVector x(value_.begin(), value_.end());
      const double v = objective_value(x, coef_);
      if (!has_incumbent_ || v < incumbent_value_ - kTolerance) {
        has_incumbent_ = true;
        incumbent_value_ = v;
        incumbent_ = std::move(x);
      }
      return;
    }

    const std::size_t mark = trail_.size();
    const RealVector saved_min = min_lhs_;
    const RealVector saved_max = max_lhs_;
    for (std::int8_t v : {std::int8_t{1}, std::int8_t{0}}) {
      fix(static_cast<std::uint32_t>(branch_var), v);
      if (propagate()) dfs();
      while (trail_.size() > mark) {
        value_[trail_.back()] = kFree;
        trail_.pop_back();
      }
      min_lhs_ = saved_min;
      max_lhs_ = saved_max;
    }
  }

  const BranchAndBound::Compiled& m_;
  RealVector coef_;
  const BnbOptions& options_;
  std::vector<std::int8_t> value_;
  RealVector min_lhs_;
  RealVector max_lhs_;
  std::vector<std::uint8_t> queued_;
  std::vector<std::uint32_t> queue_;
  std::vector<std::uint32_t> trail_;
  std::vector<double> scratch_;
  bool has_incumbent_ = false;
  double incumbent_value_ = 0.0;
  BinaryVector incumbent_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

BranchAndBound::BranchAndBound(ProblemSpec spec, BnbOptions options)
    : spec_(std::move(spec)), options_(options), compiled_(std::make_unique<Compiled>(spec_)) {}

BranchAndBound::~BranchAndBound() = default;
BranchAndBound::BranchAndBound(BranchAndBound&&) noexcept = default;
BranchAndBound& BranchAndBound::operator=(BranchAndBound&&) noexcept = default;

BnbResult BranchAndBound::solve_coefficients(ConstRealSpan coefficients) const {
  if (coefficients.size() != spec_.dimension()) {
    throw std::invalid_argument("branch-and-bound: coefficient length mismatch");
  }
  require_finite(coefficients, "objective coefficients");
  const double sign = sense_sign(spec_.sense());
  RealVector coef(coefficients.begin(), coefficients.end());
  for (double& c : coef) c *= sign;

  Search search(*compiled_, std::move(coef), options_);
  search.run();
  if (!search.has_incumbent()) {
    throw InfeasibleError("problem '" + spec_.id() + "' has no feasible solution");
  }
  return {search.incumbent(), sign * search.incumbent_value(), search.nodes()};
}

BinaryVector BranchAndBound::solve(ConstRealSpan cost) const {
  require_finite(cost, "cost vector");
  return solve_coefficients(spec_.objective_coefficients(cost)).solution;
}

void validate_feasible(const ProblemSpec& spec) {
  const BranchAndBound solver(spec);
  const RealVector zeros(spec.dimension(), 0.0);
  (void)solver.solve_coefficients(zeros);
}

}  // namespace dfl
