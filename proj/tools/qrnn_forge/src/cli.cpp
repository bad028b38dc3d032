#include <CLI11.hpp>

#include <ostream>

#include "qrnn/data.hpp"
#include "qrnn_forge/commands.hpp"

namespace qrnn::cli {

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (item.empty() || item.front() == '-') throw std::invalid_argument("negative");
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ConfigError("--seeds: '" + item + "' is not a non-negative integer");
    seeds.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return seeds;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum recurrent neural network experiments", "qrnn-forge"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  bool exact = false;
  std::uint64_t shots = 0;
  std::vector<std::string> overrides;
  app.add_option("command", command, "train | ablate-preprocessing | compare-encoding | depth-scan")
      ->required()
      ->check(CLI::IsMember({"train", "ablate-preprocessing", "compare-encoding", "depth-scan"}));
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--out", out_dir, "output directory (default: runs/<command>)");
  app.add_option("--seeds", seeds, "comma-separated seeds, replaces config seeds");
  auto* exact_flag = app.add_flag("--exact", exact, "exact probabilities");
  auto* shots_opt = app.add_option("--shots", shots, "shot sampling with N shots")->check(CLI::PositiveNumber);
  exact_flag->excludes(shots_opt);
  app.add_option("--set", overrides, "override a config field: key.path=value");

  std::vector<const char*> argv;
  argv.push_back("qrnn-forge");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qrnn-forge: " << e.what() << "\n";
    return 2;
  }

  try {
    if (exact) overrides.push_back("training.exact=true");
    if (shots > 0) {
      overrides.push_back("training.exact=false");
      overrides.push_back("training.shots=" + std::to_string(shots));
    }
    ExperimentConfig cfg = load_config(config_path, overrides);
    if (!seeds.empty()) cfg.seeds = parse_seeds(seeds);
    const OutputDir dir(out_dir.empty() ? std::filesystem::path("runs") / command : std::filesystem::path(out_dir));
    if (command == "train") {
      run_train(cfg, dir, err);
    } else if (command == "ablate-preprocessing") {
      run_ablate_preprocessing(cfg, dir, err);
    } else if (command == "compare-encoding") {
      run_compare_encoding(cfg, dir, err);
    } else {
      run_depth_scan(cfg, dir, err);
    }
    out << "wrote " << dir.root().string() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "qrnn-forge: config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "qrnn-forge: data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "qrnn-forge: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qrnn::cli
