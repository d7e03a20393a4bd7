// dfl: data generation, training, evaluation and sweeps for ranking-loss
// decision-focused learning.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dfl/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalAbort = 3;

dfl::Split split_from(const std::string& name) { return dfl::parse_split(name); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-focused learning with ranking losses"};
  app.set_version_flag("--version", dfl::tool_version());
  app.require_subcommand(1);

  std::string config_path;
  bool force = false;
  std::size_t jobs = 1;
  std::string checkpoint_path;
  std::string dataset_dir;
  std::string split_name = "test";
  std::string out_path;

  auto* generate = app.add_subcommand("generate", "write a synthetic dataset and its manifest");
  generate->add_option("config", config_path, "experiment config (JSON)")->required();
  generate->add_flag("--force", force, "overwrite existing dataset files");

  auto* train = app.add_subcommand("train", "train a model; writes checkpoints and run records");
  train->add_option("config", config_path, "experiment config (JSON)")->required();

  auto* evaluate = app.add_subcommand("evaluate", "metrics of a checkpoint on one split");
  evaluate->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
  auto* eval_config = evaluate->add_option("--config", config_path, "config whose problem block names the data");
  evaluate->add_option("--dataset", dataset_dir, "dataset directory written by generate")->excludes(eval_config);
  evaluate->add_option("--split", split_name, "train, val or test")->check(CLI::IsMember({"train", "val", "test"}));
  evaluate->add_option("--out", out_path, "write metrics JSON here instead of stdout");

  auto* sweep = app.add_subcommand("sweep", "cross product of swept settings times trials");
  sweep->add_option("config", config_path, "experiment config (JSON)")->required();
  sweep->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  auto* selftest = app.add_subcommand("selftest", "worked toy-problem values and identity checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*selftest) return dfl::cmd_selftest(std::cout);

    if (*evaluate) {
      nlohmann::json problem;
      if (!dataset_dir.empty()) {
        problem = {{"dataset", dataset_dir}};
      } else if (!config_path.empty()) {
        problem = dfl::load_config_file(config_path).problem;
      } else {
        throw dfl::ConfigError("evaluate needs --config or --dataset");
      }
      std::ifstream in(checkpoint_path);
      if (!in) throw dfl::ConfigError("cannot open checkpoint " + checkpoint_path);
      const nlohmann::json checkpoint = nlohmann::json::parse(in);
      const nlohmann::json metrics =
          dfl::cmd_evaluate(checkpoint, dfl::load_problem(problem), split_from(split_name));
      if (out_path.empty()) {
        std::cout << metrics.dump(2) << '\n';
      } else {
        std::ofstream out(out_path);
        out << metrics.dump(2) << '\n';
      }
      return 0;
    }

    const dfl::ExperimentConfig config = dfl::load_config_file(config_path);
    if (*generate) {
      dfl::write_generated(dfl::load_problem(config.problem), config.output, force);
      std::cout << "wrote dataset to " << config.output.string() << '\n';
      return 0;
    }
    if (*train) return dfl::cmd_train(config, std::cout);
    if (*sweep) return dfl::cmd_sweep(config, jobs, std::cout);
  } catch (const dfl::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const dfl::NumericalError& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
