#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qrnn_forge/config.hpp"

namespace qrnn::cli {

/// Files of one run. Only plain file names are accepted, so nothing can be
/// written outside the directory.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);
  const std::filesystem::path& root() const { return root_; }
  void write(std::string_view name, std::string_view content) const;

 private:
  std::filesystem::path root_;
};

void run_train(const ExperimentConfig& config, const OutputDir& out, std::ostream& log);
void run_ablate_preprocessing(const ExperimentConfig& config, const OutputDir& out, std::ostream& log);
void run_compare_encoding(const ExperimentConfig& config, const OutputDir& out, std::ostream& log);
void run_depth_scan(const ExperimentConfig& config, const OutputDir& out, std::ostream& log);

/// Parses `qrnn-forge <command> --config <file> [--out <dir>] [--seeds a,b,c]
/// [--exact|--shots N] [--set key=value ...]` and runs it. Returns the process
/// exit code: 0 on success, 2 for configuration errors, 1 for runtime errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qrnn::cli
