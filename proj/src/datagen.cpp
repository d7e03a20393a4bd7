#include "dfl/datagen.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "dfl/seeding.hpp"

namespace dfl {

namespace {

constexpr std::array<Split, 3> kSplits{Split::kTrain, Split::kValidation, Split::kTest};

void check_sizes(const SplitSizes& sizes) {
  if (sizes.train == 0 || sizes.val == 0 || sizes.test == 0) {
    throw std::invalid_argument("split sizes must be positive");
  }
}

std::size_t size_of(const SplitSizes& sizes, Split s) {
  switch (s) {
    case Split::kTrain: return sizes.train;
    case Split::kValidation: return sizes.val;
    case Split::kTest: return sizes.test;
  }
  return 0;
}

nlohmann::json sizes_json(const SplitSizes& sizes) {
  return {{"train", sizes.train}, {"val", sizes.val}, {"test", sizes.test}};
}

std::mt19937_64 split_rng(std::uint64_t seed, Split s) {
  return std::mt19937_64(derive_seed(seed, std::string("split:") + std::string(to_string(s))));
}

RealVector gaussian_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector x(n);
  for (double& v : x) v = normal(rng);
  return x;
}

/// (A x)_k / sqrt(P) for row-major K x P matrix A.
RealVector project(const RealVector& a, const RealVector& x, std::size_t k) {
  const std::size_t p = x.size();
  const double inv = 1.0 / std::sqrt(static_cast<double>(p));
  RealVector out(k, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < p; ++c) s += a[r * p + c] * x[c];
    out[r] = s * inv;
  }
  return out;
}

GeneratedData assemble(ProblemSpec spec, nlohmann::json manifest) {
  GeneratedData data{{}, std::move(spec), std::move(manifest)};
  for (Split s : kSplits) {
    data.split(s).split = s;
    data.split(s).problem_id = data.spec.id();
  }
  return data;
}

}  // namespace

void ShortestPathGenSpec::validate() const {
  if (feature_dim == 0) throw std::invalid_argument("feature_dim must be positive");
  if (degree < 1) throw std::invalid_argument("degree must be a positive integer");
  if (!(noise_halfwidth >= 0.0 && noise_halfwidth < 1.0)) {
    throw std::invalid_argument("noise half-width must lie in [0, 1)");
  }
  GridSpec{grid}.validate();
  const std::size_t k = GridSpec{grid}.edges();
  if (latent && latent->size() != k * feature_dim) {
    throw std::invalid_argument("latent matrix must be K x P = " + std::to_string(k) + " x " +
                                std::to_string(feature_dim));
  }
  check_sizes(sizes);
}

GeneratedData gen_shortest_path(const ShortestPathGenSpec& gen) {
  gen.validate();
  const GridSpec grid{gen.grid};
  const std::size_t k = grid.edges();
  const std::size_t p = gen.feature_dim;

  RealVector latent;
  if (gen.latent) {
    latent = *gen.latent;
  } else {
    std::mt19937_64 rng(derive_seed(gen.seed, "latent"));
    std::bernoulli_distribution coin(0.5);
    latent.resize(k * p);
    for (double& b : latent) b = coin(rng) ? 1.0 : 0.0;
  }

  nlohmann::json manifest = {{"family", "shortest_path"},
                             {"feature_dim", p},
                             {"grid", gen.grid},
                             {"degree", gen.degree},
                             {"noise_halfwidth", gen.noise_halfwidth},
                             {"latent", latent},
                             {"latent_law", gen.latent ? "explicit" : "bernoulli(0.5)"},
                             {"sizes", sizes_json(gen.sizes)},
                             {"seed", gen.seed}};
  GeneratedData data = assemble(grid_problem_spec(grid), manifest);

  std::size_t resamples = 0;
  for (Split s : kSplits) {
    std::mt19937_64 rng = split_rng(gen.seed, s);
    std::uniform_real_distribution<double> noise(1.0 - gen.noise_halfwidth, 1.0 + gen.noise_halfwidth);
    auto& out = data.split(s).instances;
    out.reserve(size_of(gen.sizes, s));
    while (out.size() < size_of(gen.sizes, s)) {
      RealVector x = gaussian_vector(p, rng);
      RealVector base = project(latent, x, k);
      bool positive = true;
      for (double& b : base) {
        b += 3.0;
        positive = positive && b > 0.0;
      }
      if (!positive) {
        ++resamples;
        continue;
      }
      RealVector cost(k);
      for (std::size_t j = 0; j < k; ++j) {
        const double eps = gen.noise_halfwidth == 0.0 ? 1.0 : noise(rng);
        cost[j] = std::pow(base[j], gen.degree) * eps;
      }
      out.push_back({std::move(x), std::move(cost), std::nullopt});
    }
  }
  data.manifest["resampled_features"] = resamples;
  return data;
}

void MatchingGenSpec::validate() const {
  if (left == 0 || right == 0) throw std::invalid_argument("matching sides must be nonempty");
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("matching rates p and q must lie in [0, 1]");
  }
  if (feature_dim == 0) throw std::invalid_argument("feature_dim must be positive");
  if (!(noise >= 0.0)) throw std::invalid_argument("noise must be nonnegative");
  check_sizes(sizes);
}

GeneratedData gen_matching(const MatchingGenSpec& gen) {
  gen.validate();
  const std::size_t k = gen.left * gen.right;
  const std::size_t p = gen.feature_dim;

  std::mt19937_64 rng(derive_seed(gen.seed, "structure"));
  std::bernoulli_distribution coin(0.5);
  std::vector<int> left_field(gen.left), right_field(gen.right);
  for (int& f : left_field) f = coin(rng) ? 1 : 0;
  for (int& f : right_field) f = coin(rng) ? 1 : 0;
  std::vector<std::uint8_t> same(k);
  for (std::size_t i = 0; i < gen.left; ++i) {
    for (std::size_t j = 0; j < gen.right; ++j) same[i * gen.right + j] = left_field[i] == right_field[j];
  }
  const RealVector reward_map = gaussian_vector(k * p, rng);

  nlohmann::json manifest = {{"family", "matching"},
                             {"left", gen.left},
                             {"right", gen.right},
                             {"p", gen.p},
                             {"q", gen.q},
                             {"feature_dim", p},
                             {"noise", gen.noise},
                             {"same_field", same},
                             {"reward_map", reward_map},
                             {"sizes", sizes_json(gen.sizes)},
                             {"seed", gen.seed}};
  GeneratedData data = assemble(build_matching_spec(gen.left, gen.right, same, gen.p, gen.q), manifest);

  for (Split s : kSplits) {
    std::mt19937_64 srng = split_rng(gen.seed, s);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto& out = data.split(s).instances;
    for (std::size_t i = 0; i < size_of(gen.sizes, s); ++i) {
      RealVector x = gaussian_vector(p, srng);
      RealVector reward = project(reward_map, x, k);
      for (double& r : reward) r += 2.0 + gen.noise * noise(srng);
      out.push_back({std::move(x), std::move(reward), std::nullopt});
    }
  }
  return data;
}

void SchedulingGenSpec::validate() const {
  if (tasks == 0 || machines == 0 || timeslots == 0 || resources == 0) {
    throw std::invalid_argument("scheduling needs tasks, machines, timeslots and resources");
  }
  if (timeslots < 4) throw std::invalid_argument("scheduling needs at least 4 timeslots");
  if (feature_dim == 0) throw std::invalid_argument("feature_dim must be positive");
  if (!(noise >= 0.0)) throw std::invalid_argument("noise must be nonnegative");
  check_sizes(sizes);
}

GeneratedData gen_scheduling(const SchedulingGenSpec& gen) {
  gen.validate();
  const std::size_t horizon = gen.timeslots;
  const std::size_t p = gen.feature_dim;
  std::mt19937_64 rng(derive_seed(gen.seed, "structure"));

  const std::size_t max_duration = std::max<std::size_t>(1, std::min<std::size_t>(3, horizon / 4));
  std::uniform_int_distribution<std::size_t> duration_draw(1, max_duration);
  std::uniform_real_distribution<double> power_draw(1.0, 3.0);
  std::uniform_real_distribution<double> usage_draw(0.3, 1.0);
  std::uniform_real_distribution<double> capacity_draw(1.0, 2.0);

  std::optional<ProblemSpec> spec;
  SchedulingParams params;
  std::size_t redraws = 0;
  while (!spec) {
    params = SchedulingParams{{}, {}, horizon};
    for (std::size_t m = 0; m < gen.machines; ++m) {
      RealVector cap(gen.resources);
      for (double& c : cap) c = capacity_draw(rng);
      params.machines.push_back({std::move(cap)});
    }
    for (std::size_t j = 0; j < gen.tasks; ++j) {
      SchedulingTask task;
      task.duration = duration_draw(rng);
      const std::size_t min_window = std::min(horizon, task.duration + horizon / 2);
      task.earliest = std::uniform_int_distribution<std::size_t>(0, horizon - min_window)(rng);
      task.latest = std::uniform_int_distribution<std::size_t>(task.earliest + min_window, horizon)(rng);
      task.power = power_draw(rng);
      task.usage.resize(gen.resources);
      for (double& u : task.usage) u = usage_draw(rng);
      params.tasks.push_back(std::move(task));
    }
    try {
      spec = build_scheduling_spec(params);
    } catch (const InfeasibleError&) {
      ++redraws;
    }
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RealVector price_map(horizon * p);
  for (double& a : price_map) a = unit(rng);
  RealVector profile(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    profile[t] = 2.0 + std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(horizon));
  }

  nlohmann::json manifest = {{"family", "scheduling"},
                             {"tasks", gen.tasks},
                             {"machines", gen.machines},
                             {"timeslots", horizon},
                             {"resources", gen.resources},
                             {"feature_dim", p},
                             {"noise", gen.noise},
                             {"params", scheduling_params_to_json(params)},
                             {"price_map", price_map},
                             {"profile", profile},
                             {"structure_redraws", redraws},
                             {"sizes", sizes_json(gen.sizes)},
                             {"seed", gen.seed}};
  GeneratedData data = assemble(std::move(*spec), manifest);

  for (Split s : kSplits) {
    std::mt19937_64 srng = split_rng(gen.seed, s);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto& out = data.split(s).instances;
    for (std::size_t i = 0; i < size_of(gen.sizes, s); ++i) {
      RealVector x = gaussian_vector(p, srng);
      RealVector price = project(price_map, x, horizon);
      for (std::size_t t = 0; t < horizon; ++t) {
        price[t] = std::max(0.01, price[t] + profile[t] + gen.noise * noise(srng));
      }
      out.push_back({std::move(x), std::move(price), std::nullopt});
    }
  }
  return data;
}

}  // namespace dfl
