#include "dfl/pool.hpp"

#include <cassert>
#include <fstream>

#include "json.hpp"

namespace dfl {

bool SolutionPool::insert(RealVector solution) {
  if (keys_.contains(solution)) return false;
  keys_.insert(solution);
  solutions_.push_back(std::move(solution));
  return true;
}

void SolutionPool::dump(std::ostream& out) const {
  for (const auto& s : solutions_) out << nlohmann::json(s).dump() << '\n';
}

SolutionPool SolutionPool::restore(std::istream& in) {
  SolutionPool pool;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    pool.insert(nlohmann::json::parse(line).get<RealVector>());
  }
  return pool;
}

void SolutionPool::dump_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  dump(out);
}

SolutionPool SolutionPool::restore_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return restore(in);
}

SolutionPool init_pool(Dataset& dataset, const Oracle& oracle) {
  if (dataset.empty()) throw std::invalid_argument("init_pool: training split is empty");
  SolutionPool pool;
  for (Instance& instance : dataset.instances) {
    if (!instance.optimal) {
      instance.optimal = oracle.solve(instance.cost);
      pool.record_init_call();
    }
    pool.insert(oracle.image(*instance.optimal));
  }
  return pool;
}

bool maybe_grow(SolutionPool& pool, const Oracle& oracle, ConstRealSpan c_hat, double p_solve,
                std::mt19937_64& rng) {
  if (!(p_solve >= 0.0 && p_solve <= 1.0)) throw std::invalid_argument("p_solve must lie in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!(unit(rng) < p_solve)) return false;
  const BinaryVector decision = oracle.solve(c_hat);
  assert(oracle.is_feasible(decision));
  pool.record_growth_call();
  pool.insert(oracle.image(decision));
  return true;
}

}  // namespace dfl
