// kms <experiment> --config PATH [--out PATH] [--dump] [--seed INT]
//
// Exit status: 0 when every configured tolerance is met (or none is set),
// 1 on a tolerance failure or a numerical error, 2 on usage or config errors.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kms/config.hpp"
#include "kms/experiment.hpp"

namespace {

constexpr int kExitTolerance = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KMS matrix experiments"};
  std::string experiment, config_path, out_path;
  bool dump = false;
  std::int64_t seed = -1;
  app.add_option("experiment", experiment, "lsd | svd | cluster | det-ratio | kac | kac-jump | widom | es-vs-ms")
      ->required()
      ->check(CLI::IsMember(kms::experiment_names()));
  app.add_option("--config", config_path, "TOML experiment config")->required();
  app.add_option("--out", out_path, "output path (overrides output.path)");
  app.add_flag("--dump", dump, "write every realization in matrix dump format");
  app.add_option("--seed", seed, "seed for random perturbations (overrides config)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  kms::ExperimentConfig cfg;
  try {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "kms: cannot read config '" << config_path << "'\n";
      return kExitUsage;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    // the positional experiment fills in a missing `experiment` key
    if (text.find("experiment") == std::string::npos) text = "experiment = \"" + experiment + "\"\n" + text;
    cfg = kms::parse_config(text);
  } catch (const kms::ParseError& e) {
    std::cerr << "kms: " << config_path << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const kms::Error& e) {
    std::cerr << "kms: " << config_path << ": " << e.what() << '\n';
    return kExitUsage;
  }
  if (cfg.experiment != experiment) {
    std::cerr << "kms: config describes experiment '" << cfg.experiment << "', not '" << experiment << "'\n";
    return kExitUsage;
  }

  kms::RunOptions opt;
  if (!out_path.empty()) opt.out_path = out_path;
  opt.dump = dump;
  if (seed >= 0) opt.seed = static_cast<std::uint64_t>(seed);
  opt.fallback = &std::cout;

  try {
    const auto result = kms::run_experiment(cfg, opt);
    if (!result.summary.empty()) (result.files.empty() ? std::cerr : std::cout) << result.summary << '\n';
    if (result.passed && !*result.passed) return kExitTolerance;
  } catch (const kms::ConfigError& e) {
    std::cerr << "kms: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "kms: " << e.what() << '\n';
    return kExitTolerance;
  }
  return 0;
}
