#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "wishmix/commands.hpp"
#include "wishmix/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian mixture clustering of SPD matrices"};
  app.require_subcommand(1);

  // simulate
  std::string sim_config, sim_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset bundle");
  simulate->add_option("--config", sim_config, "simulate config JSON")->required();
  simulate->add_option("--out", sim_out, "output dataset bundle")->required();

  // pipeline
  std::string pipe_dir, pipe_channels, pipe_out;
  long pipe_length = 0;
  auto* pipeline = app.add_subcommand(
      "pipeline", "Build correlation matrices from per-subject time series");
  pipeline->add_option("--series-dir", pipe_dir, "directory of numeric tables")->required();
  pipeline->add_option("--channels", pipe_channels, "1-based channels, e.g. 40-46")->required();
  pipeline->add_option("--length", pipe_length, "crop to the first N rows (default: shortest series)");
  pipeline->add_option("--out", pipe_out, "output dataset bundle")->required();

  // fit
  std::string fit_dataset, fit_config, fit_model, fit_rerun, fit_result, fit_trace;
  std::uint64_t fit_seed = 0;
  bool fit_seed_set = false;
  auto* fit = app.add_subcommand("fit", "Run the collapsed sampler on a dataset");
  fit->add_option("--dataset", fit_dataset, "dataset bundle");
  fit->add_option("--config", fit_config, "fit config JSON");
  fit->add_option("--model", fit_model, "mfm or dpm (overrides config)");
  fit->add_option("--seed", fit_seed, "seed override")->each([&](const std::string&) {
    fit_seed_set = true;
  });
  fit->add_option("--rerun-from", fit_rerun, "re-execute the config embedded in a result file");
  fit->add_option("--out-result", fit_result, "output result JSON")->required();
  fit->add_option("--out-trace", fit_trace, "output trace file")->required();

  // baselines
  std::string base_dataset, base_prefix, base_ward = "d2", base_kresult;
  int base_k = 0;
  bool base_no_hc = false, base_no_pam = false;
  auto* baselines = app.add_subcommand(
      "baselines", "Ward and PAM clustering on the Riemannian distance matrix");
  baselines->add_option("--dataset", base_dataset)->required();
  baselines->add_option("--k", base_k, "number of clusters");
  baselines->add_option("--k-from-result", base_kresult, "take k from a fit result");
  baselines->add_option("--ward-variant", base_ward, "d2 (default) or d");
  baselines->add_flag("--no-hc", base_no_hc);
  baselines->add_flag("--no-pam", base_no_pam);
  baselines->add_option("--out-prefix", base_prefix)->required();

  // evaluate
  std::string eval_truth_ds, eval_truth_labels, eval_covariate, eval_out;
  std::vector<std::string> eval_estimates;
  std::vector<long long> eval_contingency;
  int eval_k0 = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Clustering metrics against a reference");
  evaluate->add_option("--truth-dataset", eval_truth_ds, "bundle with true labels");
  evaluate->add_option("--truth-labels", eval_truth_labels, "labels file");
  evaluate->add_option("--estimates", eval_estimates, "labels or result files")->expected(-1);
  evaluate->add_option("--k0", eval_k0, "true number of clusters");
  evaluate->add_option("--covariate", eval_covariate, "binary covariate labels file");
  evaluate->add_option("--contingency", eval_contingency, "a b c d cells for a 2x2 test")->expected(4);
  evaluate->add_option("--out", eval_out)->required();

  // report
  std::vector<std::string> report_results;
  std::string report_out;
  int report_k0 = 0, report_threads = 0;
  auto* report = app.add_subcommand("report", "Aggregate fit results across replicates");
  report->add_option("--results", report_results)->required()->expected(-1);
  report->add_option("--k0", report_k0, "true number of clusters");
  report->add_option("--threads", report_threads, "worker threads (default WISHMIX_THREADS)");
  report->add_option("--out", report_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      wishmix::cmd_simulate(sim_config, sim_out);
    } else if (pipeline->parsed()) {
      wishmix::PipelineOptions options;
      options.channels = pipe_channels;
      if (pipe_length > 0) options.crop_length = pipe_length;
      wishmix::cmd_pipeline(pipe_dir, options, pipe_out);
    } else if (fit->parsed()) {
      wishmix::FitOptions options;
      if (!fit_model.empty()) options.model_override = fit_model;
      if (fit_seed_set) options.seed_override = fit_seed;
      if (!fit_rerun.empty()) options.rerun_from = fit_rerun;
      std::optional<std::filesystem::path> dataset, config;
      if (!fit_dataset.empty()) dataset = fit_dataset;
      if (!fit_config.empty()) config = fit_config;
      wishmix::cmd_fit(dataset, config, options, fit_result, fit_trace);
    } else if (baselines->parsed()) {
      wishmix::BaselinesOptions options;
      if (base_k > 0) options.k = base_k;
      if (!base_kresult.empty()) options.k_from_result = base_kresult;
      options.run_hc = !base_no_hc;
      options.run_pam = !base_no_pam;
      options.ward_variant = base_ward;
      wishmix::cmd_baselines(base_dataset, options, base_prefix);
    } else if (evaluate->parsed()) {
      wishmix::EvaluateOptions options;
      if (!eval_truth_ds.empty()) options.truth_dataset = eval_truth_ds;
      if (!eval_truth_labels.empty()) options.truth_labels = eval_truth_labels;
      for (const auto& e : eval_estimates) options.estimates.emplace_back(e);
      if (eval_k0 > 0) options.k0 = eval_k0;
      if (!eval_covariate.empty()) options.covariate = eval_covariate;
      if (!eval_contingency.empty()) options.contingency = eval_contingency;
      wishmix::cmd_evaluate(options, eval_out);
    } else if (report->parsed()) {
      wishmix::ReportOptions options;
      for (const auto& r : report_results) options.results.emplace_back(r);
      if (report_k0 > 0) options.k0 = report_k0;
      options.threads = report_threads;
      wishmix::cmd_report(options, report_out);
    }
  } catch (const wishmix::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const wishmix::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const wishmix::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
