/**
 * @file dataset_io.hpp
 * @brief JSON-lines serialization of datasets.
 *
 * One instance per line: {"features": [...], "cost": [...], "optimal": [0,1,...]}.
 * "optimal" is omitted when no solution is cached. Doubles are written in
 * shortest round-trip form, so write/read reproduces every bit.
 */

#ifndef DFL_DATASET_IO_HPP
#define DFL_DATASET_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dfl/types.hpp"

namespace dfl {

std::string instance_to_json_line(const Instance& instance);
Instance instance_from_json_line(const std::string& line);

void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in, Split split, std::string problem_id = {});

void write_dataset_file(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset_file(const std::filesystem::path& path, Split split,
                          std::string problem_id = {});

}  // namespace dfl

#endif  // DFL_DATASET_IO_HPP
