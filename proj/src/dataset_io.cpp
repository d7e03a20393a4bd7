#include "dfl/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace dfl {

using nlohmann::json;

std::string instance_to_json_line(const Instance& instance) {
  json j;
  j["features"] = instance.features;
  j["cost"] = instance.cost;
  if (instance.optimal) {
    std::vector<int> bits(instance.optimal->begin(), instance.optimal->end());
    j["optimal"] = bits;
  }
  return j.dump();
}

Instance instance_from_json_line(const std::string& line) {
  const json j = json::parse(line);
  Instance instance;
  instance.features = j.at("features").get<RealVector>();
  instance.cost = j.at("cost").get<RealVector>();
  if (j.contains("optimal")) {
    BinaryVector bits;
    for (const auto& b : j.at("optimal")) {
      const int v = b.get<int>();
      if (v != 0 && v != 1) throw std::invalid_argument("optimal entries must be 0 or 1");
      bits.push_back(static_cast<std::uint8_t>(v));
    }
    instance.optimal = std::move(bits);
  }
  return instance;
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  for (const Instance& instance : dataset.instances) out << instance_to_json_line(instance) << '\n';
}

Dataset read_dataset(std::istream& in, Split split, std::string problem_id) {
  Dataset dataset;
  dataset.split = split;
  dataset.problem_id = std::move(problem_id);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      dataset.instances.push_back(instance_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return dataset;
}

void write_dataset_file(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_dataset(out, dataset);
}

Dataset read_dataset_file(const std::filesystem::path& path, Split split, std::string problem_id) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_dataset(in, split, std::move(problem_id));
}

}  // namespace dfl
