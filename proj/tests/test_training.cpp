#include <sstream>

#include "doctest.h"
#include "dfl/datagen.hpp"
#include "dfl/grid.hpp"
#include "dfl/training.hpp"
#include "support.hpp"

using namespace dfl;

namespace {

Dataset toy_dataset(Split split) {
  Dataset ds;
  ds.split = split;
  ds.instances.push_back({{1.0}, testing::kToyCost, std::nullopt});
  return ds;
}

GeneratedData small_paths(std::uint64_t seed, int degree = 2) {
  ShortestPathGenSpec gen;
  gen.grid = 3;
  gen.degree = degree;
  gen.sizes = {40, 20, 20};
  gen.seed = seed;
  return gen_shortest_path(gen);
}

TrainConfig quick(LossKind kind, double p_solve, std::size_t epochs = 3) {
  TrainConfig cfg;
  cfg.loss.kind = kind;
  cfg.lr = 0.01;
  cfg.epochs = epochs;
  cfg.p_solve = p_solve;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("mse without growth makes no oracle calls after init") {
  GeneratedData data = small_paths(1);
  const auto oracle = make_oracle(data.spec);
  const TrainResult r = train(LinearModel(5, 12, true, 1), data.split(Split::kTrain), data.split(Split::kValidation),
                              *oracle, quick(LossKind::kMse, 0.0));
  CHECK(r.pool.growth_calls() == 0);
  for (const auto& e : r.record.epochs) CHECK(e.oracle_calls == r.pool.init_calls());
}

TEST_CASE("full growth solves once per training instance per epoch") {
  GeneratedData data = small_paths(2);
  const auto oracle = make_oracle(data.spec);
  const TrainResult r = train(LinearModel(5, 12, true, 1), data.split(Split::kTrain), data.split(Split::kValidation),
                              *oracle, quick(LossKind::kListwise, 1.0, 4));
  CHECK(r.pool.growth_calls() == 4 * 40);
  for (std::size_t e = 1; e < r.record.epochs.size(); ++e) {
    CHECK(r.record.epochs[e].oracle_calls - r.record.epochs[e - 1].oracle_calls == 40);
  }
}

TEST_CASE("ranking losses solve the toy problem") {
  const EnumerationOracle oracle(testing::toy_spec());
  for (LossKind kind : {LossKind::kListwise, LossKind::kPairwise, LossKind::kPairwiseDiff, LossKind::kPointwise,
                        LossKind::kNce}) {
    CAPTURE(to_string(kind));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Dataset tr = toy_dataset(Split::kTrain), va = toy_dataset(Split::kValidation);
      TrainConfig cfg = quick(kind, 0.5, 50);
      cfg.lr = 0.1;
      cfg.seed = seed;
      cfg.select_best = false;
      const TrainResult r = train(LinearModel(1, 2, true, seed + 100), tr, va, oracle, cfg);
      REQUIRE(r.record.epochs.size() == 50);
      CHECK(*r.record.epochs.back().val_pct_regret == 0.0);
    }
  }
}

TEST_CASE("perfect model has zero regret and zero mse") {
  Dataset ds;
  std::mt19937_64 rng(61);
  for (int i = 0; i < 30; ++i) {
    RealVector c = testing::random_vector(4, rng);
    for (double& v : c) v = std::abs(v) + 0.1;
    ds.instances.push_back({c, c, std::nullopt});
  }
  LinearModel m(4, 4, true, 0);
  m.set_parameters({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1}, RealVector(4, 0.0));
  const Metrics met = evaluate(m, ds, EnumerationOracle(ProblemSpec(4, ObjectiveSense::kMaximize, {})));
  CHECK(met.mean_regret == 0.0);
  CHECK(met.mean_pct_regret == 0.0);
  CHECK(met.mse == 0.0);
  CHECK(met.instances == 30);
}

TEST_CASE("constant prediction regret on the 3x3 grid") {
  GeneratedData data = small_paths(3, 4);
  const Dataset& test = data.split(Split::kTest);
  LinearModel m(5, 12, true, 0);
  m.set_parameters(RealVector(60, 0.0), RealVector(12, 1.0));
  const EnumerationOracle brute(data.spec);
  const auto feasible = enumerate_feasible(data.spec);
  // Under uniform costs every path has length 4; the tie rule picks the greatest.
  const BinaryVector uniform_choice = *std::max_element(feasible.begin(), feasible.end());
  double total = 0.0;
  for (const auto& inst : test.instances) {
    const BinaryVector best = brute.solve(inst.cost);
    total += objective_value(uniform_choice, inst.cost) - objective_value(best, inst.cost);
  }
  const Metrics met = evaluate(m, test, *make_oracle(data.spec));
  CHECK(met.mean_regret == doctest::Approx(total / test.size()).epsilon(1e-12));
}

TEST_CASE("record invariants and determinism") {
  for (LossKind kind : {LossKind::kPairwise, LossKind::kListwise}) {
    for (UpdateGranularity g :
         {UpdateGranularity::kPerInstance, UpdateGranularity::kMinibatch, UpdateGranularity::kPerEpoch}) {
      const auto run = [&] {
        GeneratedData data = small_paths(4);
        const auto oracle = make_oracle(data.spec);
        TrainConfig cfg = quick(kind, 0.3, 5);
        cfg.granularity = g;
        cfg.batch_size = 7;
        cfg.record_seconds = false;
        return train(LinearModel(5, 12, true, 2), data.split(Split::kTrain), data.split(Split::kValidation), *oracle,
                     cfg);
      };
      const TrainResult a = run(), b = run();
      REQUIRE(a.record.epochs.size() == 5);
      for (std::size_t e = 1; e < 5; ++e) {
        CHECK(a.record.epochs[e].pool_size >= a.record.epochs[e - 1].pool_size);
        CHECK(a.record.epochs[e].oracle_calls >= a.record.epochs[e - 1].oracle_calls);
      }
      std::ostringstream ca, cb;
      a.record.write_csv(ca);
      b.record.write_csv(cb);
      CHECK(ca.str() == cb.str());
      CHECK(a.model.weights() == b.model.weights());
    }
  }
}

TEST_CASE("select_best returns the lowest validation epoch") {
  GeneratedData data = small_paths(5);
  const auto oracle = make_oracle(data.spec);
  TrainConfig cfg = quick(LossKind::kListwise, 0.2, 8);
  const TrainResult r = train(LinearModel(5, 12, true, 3), data.split(Split::kTrain), data.split(Split::kValidation),
                              *oracle, cfg);
  double lowest = 1e300;
  std::size_t at = 0;
  for (const auto& e : r.record.epochs) {
    if (e.val_pct_regret && *e.val_pct_regret < lowest) {
      lowest = *e.val_pct_regret;
      at = e.epoch;
    }
  }
  CHECK(r.model_epoch == at);
  CHECK(evaluate(r.model, data.split(Split::kValidation), *oracle).mean_pct_regret == doctest::Approx(lowest));
}

TEST_CASE("eval cadence skips validation columns") {
  GeneratedData data = small_paths(6);
  const auto oracle = make_oracle(data.spec);
  TrainConfig cfg = quick(LossKind::kMse, 0.0, 5);
  cfg.eval_every = 2;
  const TrainResult r = train(LinearModel(5, 12, true, 3), data.split(Split::kTrain), data.split(Split::kValidation),
                              *oracle, cfg);
  CHECK_FALSE(r.record.epochs[0].val_pct_regret.has_value());
  CHECK(r.record.epochs[1].val_pct_regret.has_value());
  CHECK(r.record.epochs[4].val_pct_regret.has_value());
}

TEST_CASE("diverging run aborts with the last good model") {
  GeneratedData data = small_paths(7, 8);
  const auto oracle = make_oracle(data.spec);
  TrainConfig cfg = quick(LossKind::kMse, 0.0, 50);
  cfg.lr = 1e6;
  cfg.cost_scale = 1.0;
  const TrainResult r = train(LinearModel(5, 12, true, 3), data.split(Split::kTrain), data.split(Split::kValidation),
                              *oracle, cfg);
  REQUIRE(r.abort_reason.has_value());
  CHECK(r.record.epochs.size() < 50);
  for (double w : r.model.weights()) CHECK(std::isfinite(w));
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.epochs = 0;
  cfg.p_solve = 2.0;
  try {
    cfg.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("lr") != std::string::npos);
    CHECK(msg.find("epochs") != std::string::npos);
    CHECK(msg.find("p_solve") != std::string::npos);
  }
}

TEST_CASE("metrics quartiles and undefined regret") {
  // Predicting [0, 1] under maximization always picks [1, 1]; the truth picks
  // [0, 1] whenever the first reward is negative, for a regret of -c_0.
  Dataset ds;
  for (double v : {0.0, 1.0, 2.0, 3.0, 4.0}) ds.instances.push_back({{1.0}, {-v, 1.0}, std::nullopt});
  ds.instances.push_back({{1.0}, {0.0, 0.0}, std::nullopt});
  LinearModel m(1, 2, true, 0);
  m.set_parameters({0.0, 0.0}, {0.0, 1.0});
  const Metrics met = evaluate(m, ds, EnumerationOracle(ProblemSpec(2, ObjectiveSense::kMaximize, {})));
  CHECK(met.instances == 6);
  CHECK(met.undefined_pct == 1);
  CHECK(met.mean_regret == doctest::Approx(10.0 / 6.0));
  CHECK(met.mean_pct_regret == doctest::Approx(2.0));
  CHECK(met.pct_min == 0.0);
  CHECK(met.pct_q1 == doctest::Approx(1.0));
  CHECK(met.pct_median == doctest::Approx(2.0));
  CHECK(met.pct_q3 == doctest::Approx(3.0));
  CHECK(met.pct_max == doctest::Approx(4.0));
  CHECK(met.mse == doctest::Approx((1 + 4 + 9 + 16 + 1) / 12.0));
}
