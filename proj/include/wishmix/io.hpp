#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wishmix/postprocess.hpp"
#include "wishmix/sampler.hpp"
#include "wishmix/spd.hpp"

namespace wishmix {

using ordered_json = nlohmann::ordered_json;

// Self-describing container for a matrix-valued dataset; matrices are stored
// full (row by row) for human inspectability.
struct DatasetBundle {
  int dim = 0;
  std::vector<SpdMatrix> matrices;
  std::optional<std::vector<int>> labels;
  std::optional<std::vector<std::string>> subject_ids;
  ordered_json provenance;  // free-form generator echo

  int n() const { return static_cast<int>(matrices.size()); }
};

void save_dataset(const DatasetBundle& bundle,
                  const std::filesystem::path& path);
DatasetBundle load_dataset(const std::filesystem::path& path);

// Plain-text trace container: a nu column and one integer label row per
// retained draw. Deterministic bytes given identical draws.
void save_trace(const McmcTrace& trace, const std::filesystem::path& path);
McmcTrace load_trace(const std::filesystem::path& path);

void save_labels(const std::vector<int>& labels, const std::string& method,
                 const std::filesystem::path& path);
std::vector<int> load_labels(const std::filesystem::path& path);

// Fit settings with every default materialized; serializing and reparsing
// reproduces the same sampler configuration bit for bit.
struct FitSettings {
  std::string model = "mfm";  // "mfm" | "dpm"
  long iterations = 10000;
  long burn_in = 4000;
  long thin = 1;
  double proposal_sd = 1.0;
  std::uint64_t seed = 0;
  double gamma = 1.0;
  double lambda = 1.0;
  double alpha = 1.0;
  std::optional<double> kappa0;             // default p + 2
  std::optional<double> nu_lo;              // default p + 2
  double nu_hi = 50.0;
  std::optional<Eigen::MatrixXd> psi0;      // explicit matrix
  std::optional<double> psi0_scale;         // scaled identity; default identity
  std::string init = "singletons";          // "singletons" | "k_clusters" | "given"
  int init_k = 1;
  std::vector<int> init_labels;
  std::optional<double> nu_init;
  bool fix_nu = false;
  std::string sweep = "fixed";              // "fixed" | "random"
  bool audit_vn = false;                    // embed the log V table in results
};

FitSettings parse_fit_settings(const ordered_json& j);
ordered_json fit_settings_to_json(const FitSettings& s, int dim);
SamplerConfig to_sampler_config(const FitSettings& s, int dim);

struct NuSummary {
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double ess_value = 0.0;
  double acceptance_rate = 0.0;
};

struct RunResult {
  ordered_json config;  // resolved settings + dataset path + model
  PartitionEstimate partition;
  NuSummary nu;
  double seconds = 0.0;
  double seconds_per_iteration = 0.0;
  std::string trace_path;
  std::vector<double> log_vn;  // audit copy of the prior table, optional
};

void save_result(const RunResult& result, const std::filesystem::path& path);
RunResult load_result(const std::filesystem::path& path);

// Default worker count: WISHMIX_THREADS, else hardware concurrency.
int default_thread_count();

}  // namespace wishmix
