#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wishmix/io.hpp"

namespace wishmix {

// CLI subcommand bodies. They throw ConfigError / DataError / NumericError;
// the executable maps those to exit codes 2 / 3 / 4.

void cmd_simulate(const std::filesystem::path& config_path,
                  const std::filesystem::path& out_path);

struct PipelineOptions {
  std::string channels;              // e.g. "40-46" or "1,3,5-7", 1-based
  std::optional<long> crop_length;   // default: shortest series
};

void cmd_pipeline(const std::filesystem::path& series_dir,
                  const PipelineOptions& options,
                  const std::filesystem::path& out_path);

struct FitOptions {
  std::optional<std::string> model_override;       // "mfm" | "dpm"
  std::optional<std::uint64_t> seed_override;
  std::optional<std::filesystem::path> rerun_from;  // result file to replay
};

void cmd_fit(const std::optional<std::filesystem::path>& dataset_path,
             const std::optional<std::filesystem::path>& config_path,
             const FitOptions& options,
             const std::filesystem::path& out_result,
             const std::filesystem::path& out_trace);

struct BaselinesOptions {
  std::optional<int> k;                                 // fixed k
  std::optional<std::filesystem::path> k_from_result;   // Dahl estimate
  bool run_hc = true;
  bool run_pam = true;
  std::string ward_variant = "d2";  // "d2" | "d"
};

void cmd_baselines(const std::filesystem::path& dataset_path,
                   const BaselinesOptions& options,
                   const std::filesystem::path& out_prefix);

struct EvaluateOptions {
  std::optional<std::filesystem::path> truth_dataset;  // bundle with labels
  std::optional<std::filesystem::path> truth_labels;   // labels file
  std::vector<std::filesystem::path> estimates;        // labels or result files
  std::optional<int> k0;
  std::optional<std::filesystem::path> covariate;      // binary labels file
  std::optional<std::vector<long long>> contingency;   // a b c d
};

void cmd_evaluate(const EvaluateOptions& options,
                  const std::filesystem::path& out_path);

struct ReportOptions {
  std::vector<std::filesystem::path> results;
  std::optional<int> k0;
  int threads = 0;  // 0 = default_thread_count()
};

void cmd_report(const ReportOptions& options,
                const std::filesystem::path& out_path);

}  // namespace wishmix
