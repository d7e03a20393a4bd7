#include "dfl/oracles.hpp"

namespace dfl {

using nlohmann::json;

ProblemSpec build_matching_spec(std::size_t n1, std::size_t n2,
                                const std::vector<std::uint8_t>& same_field, double p, double q) {
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("matching: empty node set");
  if (same_field.size() != n1 * n2) throw std::invalid_argument("matching: field matrix must be n1 x n2");
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("matching: rates must lie in [0, 1]");
  }
  const std::size_t k = n1 * n2;
  std::vector<LinearConstraint> constraints;
  for (std::size_t i = 0; i < n1; ++i) {
    LinearConstraint row{RealVector(k, 0.0), Comparator::kLessEqual, 1.0};
    for (std::size_t j = 0; j < n2; ++j) row.coeffs[i * n2 + j] = 1.0;
    constraints.push_back(std::move(row));
  }
  for (std::size_t j = 0; j < n2; ++j) {
    LinearConstraint col{RealVector(k, 0.0), Comparator::kLessEqual, 1.0};
    for (std::size_t i = 0; i < n1; ++i) col.coeffs[i * n2 + j] = 1.0;
    constraints.push_back(std::move(col));
  }
  if (p > 0.0) {
    LinearConstraint similar{RealVector(k, 0.0), Comparator::kGreaterEqual, 0.0};
    for (std::size_t e = 0; e < k; ++e) {
      if (same_field[e] > 1) throw std::invalid_argument("matching: field matrix must be 0/1");
      similar.coeffs[e] = static_cast<double>(same_field[e]) - p;
    }
    constraints.push_back(std::move(similar));
  }
  if (q > 0.0) {
    LinearConstraint diverse{RealVector(k, 0.0), Comparator::kGreaterEqual, 0.0};
    for (std::size_t e = 0; e < k; ++e) diverse.coeffs[e] = (1.0 - same_field[e]) - q;
    constraints.push_back(std::move(diverse));
  }
  json meta = {{"family", "matching"}, {"n1", n1}, {"n2", n2}, {"p", p}, {"q", q},
               {"same_field", same_field},
               {"id", "matching-" + std::to_string(n1) + "x" + std::to_string(n2)}};
  return ProblemSpec(k, ObjectiveSense::kMaximize, std::move(constraints), std::move(meta));
}

std::size_t SchedulingParams::resources() const {
  if (machines.empty()) return 0;
  return machines.front().capacity.size();
}

ProblemSpec build_scheduling_spec(const SchedulingParams& params) {
  const std::size_t n_tasks = params.tasks.size();
  const std::size_t n_machines = params.machines.size();
  const std::size_t horizon = params.timeslots;
  const std::size_t n_res = params.resources();
  if (n_tasks == 0 || n_machines == 0 || horizon == 0) {
    throw std::invalid_argument("scheduling: need at least one task, machine and timeslot");
  }
  for (const auto& m : params.machines) {
    if (m.capacity.size() != n_res) throw std::invalid_argument("scheduling: ragged capacities");
  }
  for (std::size_t j = 0; j < n_tasks; ++j) {
    const auto& task = params.tasks[j];
    if (task.usage.size() != n_res) throw std::invalid_argument("scheduling: ragged usages");
    if (task.duration == 0) throw std::invalid_argument("scheduling: zero duration");
    if (task.latest > horizon) {
      throw std::invalid_argument("scheduling: task " + std::to_string(j) +
                                  " ends after the horizon");
    }
    if (task.earliest + task.duration > task.latest) {
      throw InfeasibleError("scheduling: task " + std::to_string(j) + " has no feasible start");
    }
  }

  const std::size_t k = n_tasks * n_machines * horizon;
  std::vector<LinearConstraint> constraints;

  for (std::size_t j = 0; j < n_tasks; ++j) {
    LinearConstraint once{RealVector(k, 0.0), Comparator::kEqual, 1.0};
    for (std::size_t m = 0; m < n_machines; ++m) {
      for (std::size_t t = 0; t < horizon; ++t) once.coeffs[params.variable(j, m, t)] = 1.0;
    }
    constraints.push_back(std::move(once));
  }
  for (std::size_t j = 0; j < n_tasks; ++j) {
    const auto& task = params.tasks[j];
    LinearConstraint window{RealVector(k, 0.0), Comparator::kLessEqual, 0.0};
    bool any = false;
    for (std::size_t m = 0; m < n_machines; ++m) {
      for (std::size_t t = 0; t < horizon; ++t) {
        if (t < task.earliest || t + task.duration > task.latest) {
          window.coeffs[params.variable(j, m, t)] = 1.0;
          any = true;
        }
      }
    }
    if (any) constraints.push_back(std::move(window));
  }
  for (std::size_t m = 0; m < n_machines; ++m) {
    for (std::size_t r = 0; r < n_res; ++r) {
      for (std::size_t t = 0; t < horizon; ++t) {
        LinearConstraint cap{RealVector(k, 0.0), Comparator::kLessEqual, params.machines[m].capacity[r]};
        bool any = false;
        for (std::size_t j = 0; j < n_tasks; ++j) {
          const auto& task = params.tasks[j];
          if (task.usage[r] == 0.0) continue;
          // Starts t' with t - d_j < t' <= t keep task j running during slot t.
          const std::size_t first = t + 1 >= task.duration ? t + 1 - task.duration : 0;
          for (std::size_t start = first; start <= t; ++start) {
            cap.coeffs[params.variable(j, m, start)] = task.usage[r];
            any = true;
          }
        }
        if (any) constraints.push_back(std::move(cap));
      }
    }
  }

  CostMap map{k, horizon, RealVector(k * horizon, 0.0)};
  for (std::size_t j = 0; j < n_tasks; ++j) {
    const auto& task = params.tasks[j];
    for (std::size_t m = 0; m < n_machines; ++m) {
      for (std::size_t t = 0; t < horizon; ++t) {
        const std::size_t row = params.variable(j, m, t);
        for (std::size_t s = t; s < std::min(horizon, t + task.duration); ++s) {
          map.entries[row * horizon + s] = task.power;
        }
      }
    }
  }

  json meta = {{"family", "scheduling"},
               {"params", scheduling_params_to_json(params)},
               {"id", "scheduling-" + std::to_string(n_tasks) + "x" + std::to_string(n_machines) +
                          "x" + std::to_string(horizon)}};
  ProblemSpec spec(k, ObjectiveSense::kMinimize, std::move(constraints), std::move(meta), std::move(map));
  validate_feasible(spec);
  return spec;
}

json scheduling_params_to_json(const SchedulingParams& params) {
  json tasks = json::array();
  for (const auto& t : params.tasks) {
    tasks.push_back({{"duration", t.duration}, {"earliest", t.earliest}, {"latest", t.latest},
                     {"power", t.power}, {"usage", t.usage}});
  }
  json machines = json::array();
  for (const auto& m : params.machines) machines.push_back({{"capacity", m.capacity}});
  return {{"tasks", tasks}, {"machines", machines}, {"timeslots", params.timeslots}};
}

SchedulingParams scheduling_params_from_json(const json& j) {
  SchedulingParams params;
  params.timeslots = j.at("timeslots").get<std::size_t>();
  for (const auto& t : j.at("tasks")) {
    params.tasks.push_back({t.at("duration").get<std::size_t>(), t.at("earliest").get<std::size_t>(),
                            t.at("latest").get<std::size_t>(), t.at("power").get<double>(),
                            t.at("usage").get<RealVector>()});
  }
  for (const auto& m : j.at("machines")) {
    params.machines.push_back({m.at("capacity").get<RealVector>()});
  }
  return params;
}

std::unique_ptr<Oracle> make_oracle(const ProblemSpec& spec) {
  const auto& meta = spec.meta();
  if (meta.value("family", std::string{}) == "grid_shortest_path" && meta.contains("grid")) {
    GridSpec grid{meta.at("grid").get<std::size_t>()};
    if (grid.edges() == spec.dimension()) return std::make_unique<GridShortestPathOracle>(grid);
  }
  return std::make_unique<BranchAndBound>(spec);
}

}  // namespace dfl
