#include "wishmix/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "wishmix/baselines.hpp"
#include "wishmix/errors.hpp"
#include "wishmix/mfm_prior.hpp"
#include "wishmix/simulation.hpp"

namespace wishmix {

namespace {

ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

Eigen::MatrixXd json_matrix(const ordered_json& j) {
  const int rows = static_cast<int>(j.size());
  if (rows == 0) throw ConfigError("matrix must be nonempty");
  const int cols = static_cast<int>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != cols)
      throw ConfigError("matrix rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c)
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

std::vector<SpdMatrix> load_scale_list(const ordered_json& spec,
                                       const std::filesystem::path& base) {
  ordered_json scales;
  if (spec.is_string()) {
    std::filesystem::path p = spec.get<std::string>();
    if (p.is_relative()) p = base / p;
    scales = read_json(p).at("matrices");
  } else if (spec.is_array()) {
    scales = spec;
  } else {
    throw ConfigError("\"scales\" must be a file path or an array of matrices");
  }
  std::vector<SpdMatrix> out;
  for (const auto& m : scales) out.emplace_back(json_matrix(m));
  if (out.empty()) throw ConfigError("no scale matrices supplied");
  return out;
}

}  // namespace

void cmd_simulate(const std::filesystem::path& config_path,
                  const std::filesystem::path& out_path) {
  const ordered_json config = read_json(config_path);
  if (!config.contains("seed"))
    throw ConfigError("simulate config is missing the required field \"seed\"");
  if (!config.contains("setting"))
    throw ConfigError("simulate config is missing the required field \"setting\"");
  const std::string setting = config.at("setting").get<std::string>();
  const std::uint64_t seed = config.at("seed").get<std::uint64_t>();
  const std::filesystem::path base = config_path.parent_path();
  Rng rng(seed);

  DatasetBundle bundle;
  std::vector<SpdMatrix> data;
  std::vector<int> labels;
  int resolved_series_length = 0;
  try {
    if (setting == "wishart_mixture") {
      MixtureSpec spec;
      spec.scales = load_scale_list(config.at("scales"), base);
      spec.n = config.at("n").get<int>();
      spec.nu = config.at("nu").get<double>();
      if (config.contains("balance") && config.at("balance").is_array())
        spec.proportions = config.at("balance").get<std::vector<double>>();
      std::tie(data, labels) = generate_wishart_mixture(spec, rng);
    } else if (setting == "large") {
      LargeSettingSpec spec;
      if (config.contains("scales")) {
        auto scales = load_scale_list(config.at("scales"), base);
        if (scales.size() >= 1) spec.sigma1 = scales[0];
        if (scales.size() >= 2) spec.sigma2 = scales[1];
      }
      spec.n = config.at("n").get<int>();
      spec.nu = config.value("nu", spec.nu);
      spec.sigma3_wishart_dof =
          config.value("sigma3_wishart_dof", spec.sigma3_wishart_dof);
      std::tie(data, labels) = generate_large_setting(spec, rng);
    } else if (setting == "var1") {
      const double phi = config.at("phi").get<double>();
      const double nu0 = config.at("nu0").get<double>();
      int series_length;
      if (!config.contains("T") || config.at("T").is_string()) {
        if (config.contains("T") &&
            config.at("T").get<std::string>() != "auto")
          throw ConfigError("\"T\" must be an integer or \"auto\"");
        series_length = choose_T_for_target_nu(nu0, phi);
      } else {
        series_length = config.at("T").get<int>();
      }
      auto scales = load_scale_list(config.at("scales"), base);
      const int n = config.at("n").get<int>();
      std::vector<double> proportions;
      if (config.contains("balance") && config.at("balance").is_array())
        proportions = config.at("balance").get<std::vector<double>>();
      const std::vector<int> sizes =
          cluster_sizes(n, static_cast<int>(scales.size()), proportions);
      std::vector<Var1Spec> specs;
      for (auto& s : scales)
        specs.emplace_back(phi, std::move(s), series_length, nu0);
      resolved_series_length = series_length;
      std::tie(data, labels) = generate_var1_dataset(specs, sizes, rng);
    } else {
      throw ConfigError("unknown setting \"" + setting + "\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid simulate config: " + std::string(e.what()));
  }

  bundle.dim = data.front().dim();
  bundle.matrices = std::move(data);
  bundle.labels = std::move(labels);
  ordered_json prov;
  prov["generator"] = "simulate";
  prov["config"] = config;
  if (setting == "var1") {
    // echo the series length actually used (may have been auto-selected)
    prov["resolved_T"] = resolved_series_length;
  }
  bundle.provenance = std::move(prov);
  save_dataset(bundle, out_path);
}

namespace {

std::vector<int> parse_channel_selector(const std::string& text) {
  std::vector<int> channels;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto dash = token.find('-');
    try {
      if (dash == std::string::npos) {
        channels.push_back(std::stoi(token));
      } else {
        const int lo = std::stoi(token.substr(0, dash));
        const int hi = std::stoi(token.substr(dash + 1));
        if (hi < lo) throw ConfigError("descending channel range " + token);
        for (int c = lo; c <= hi; ++c) channels.push_back(c);
      }
    } catch (const std::invalid_argument&) {
      throw ConfigError("bad channel selector token \"" + token + "\"");
    }
  }
  if (channels.empty()) throw ConfigError("empty channel selector");
  for (int c : channels)
    if (c < 1) throw ConfigError("channels are 1-based");
  return channels;
}

// One numeric table; cells split on commas, spaces, or tabs.
std::vector<std::vector<double>> read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    for (char& ch : line)
      if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
    std::stringstream ss(line);
    std::vector<double> row;
    std::string cell;
    while (ss >> cell) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw NonNumericCell(path.filename().string(), line_number,
                             static_cast<long>(row.size()) + 1);
      }
    }
    if (row.empty()) continue;  // blank line
    if (!rows.empty() && row.size() != rows.front().size())
      throw RaggedSeries(path.filename().string() + ": row " +
                         std::to_string(line_number) + " has " +
                         std::to_string(row.size()) + " cells, expected " +
                         std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path.string() + " contains no data rows");
  return rows;
}

}  // namespace

void cmd_pipeline(const std::filesystem::path& series_dir,
                  const PipelineOptions& options,
                  const std::filesystem::path& out_path) {
  const std::vector<int> channels = parse_channel_selector(options.channels);
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(series_dir))
    throw DataError(series_dir.string() + " is not a directory");
  for (const auto& entry : std::filesystem::directory_iterator(series_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".csv" || ext == ".tsv" || ext == ".txt")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw DataError("no .csv/.tsv/.txt series files in " + series_dir.string());

  std::vector<std::vector<std::vector<double>>> tables;
  long shortest = std::numeric_limits<long>::max();
  for (const auto& f : files) {
    tables.push_back(read_table(f));
    const long t = static_cast<long>(tables.back().size());
    shortest = std::min(shortest, t);
    const int cols = static_cast<int>(tables.back().front().size());
    for (int c : channels)
      if (c > cols)
        throw DataError(f.filename().string() + " has " +
                        std::to_string(cols) + " channels; selector needs " +
                        std::to_string(c));
  }
  const long crop = options.crop_length.value_or(shortest);
  if (crop < 2)
    throw InsufficientLength("cropped length " + std::to_string(crop) +
                             " is too short to form a covariance");
  for (std::size_t s = 0; s < tables.size(); ++s)
    if (static_cast<long>(tables[s].size()) < crop)
      throw InsufficientLength(files[s].filename().string() + " has only " +
                               std::to_string(tables[s].size()) +
                               " rows; need " + std::to_string(crop));

  const int p = static_cast<int>(channels.size());
  DatasetBundle bundle;
  bundle.dim = p;
  std::vector<std::string> ids;
  for (std::size_t s = 0; s < tables.size(); ++s) {
    // lag-0 sample covariance over the first `crop` rows, divisor T-1
    Eigen::MatrixXd x(crop, p);
    for (long t = 0; t < crop; ++t)
      for (int c = 0; c < p; ++c)
        x(t, c) = tables[s][static_cast<std::size_t>(t)]
                        [static_cast<std::size_t>(channels[c] - 1)];
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
    Eigen::MatrixXd cov =
        x.transpose() * x / static_cast<double>(crop - 1);
    try {
      bundle.matrices.push_back(standardize_to_correlation(cov));
    } catch (const NumericError& e) {
      throw DataError(files[s].filename().string() +
                      " does not yield an SPD correlation matrix: " + e.what());
    }
    ids.push_back(files[s].filename().string());
  }
  bundle.subject_ids = std::move(ids);
  ordered_json prov;
  prov["generator"] = "pipeline";
  prov["channels"] = options.channels;
  prov["crop_length"] = crop;
  bundle.provenance = std::move(prov);
  save_dataset(bundle, out_path);
}

void cmd_fit(const std::optional<std::filesystem::path>& dataset_path,
             const std::optional<std::filesystem::path>& config_path,
             const FitOptions& options,
             const std::filesystem::path& out_result,
             const std::filesystem::path& out_trace) {
  ordered_json config_json = ordered_json::object();
  std::filesystem::path data_file;
  if (options.rerun_from) {
    const RunResult prior = load_result(*options.rerun_from);
    config_json = prior.config;
    if (!config_json.contains("dataset"))
      throw ConfigError("result file lacks an embedded dataset path");
    data_file = config_json.at("dataset").get<std::string>();
    config_json.erase("dataset");
  } else {
    if (!dataset_path) throw ConfigError("fit requires a dataset");
    data_file = *dataset_path;
    if (config_path) config_json = read_json(*config_path);
  }
  if (options.model_override) config_json["model"] = *options.model_override;
  if (options.seed_override) config_json["seed"] = *options.seed_override;

  FitSettings settings = parse_fit_settings(config_json);
  const DatasetBundle bundle = load_dataset(data_file);
  SamplerConfig config = to_sampler_config(settings, bundle.dim);

  const McmcTrace trace = run(bundle.matrices, config);
  save_trace(trace, out_trace);

  RunResult result;
  result.partition = dahl_partition(trace);
  result.nu.mean = 0.0;
  for (double v : trace.nu) result.nu.mean += v;
  result.nu.mean /= static_cast<double>(trace.nu.size());
  const auto [lo, hi] = credible_interval(trace.nu, 0.95);
  result.nu.ci_lo = lo;
  result.nu.ci_hi = hi;
  result.nu.ess_value = ess(trace.nu);
  result.nu.acceptance_rate =
      static_cast<double>(trace.nu_accept_count) /
      static_cast<double>(trace.iterations);
  result.seconds = trace.seconds;
  result.seconds_per_iteration =
      trace.seconds / static_cast<double>(trace.iterations);
  result.trace_path = out_trace.string();
  result.config = fit_settings_to_json(settings, bundle.dim);
  result.config["dataset"] = data_file.string();
  if (settings.audit_vn && settings.model == "mfm") {
    const LogVnTable table = compute_log_vn(bundle.n(), config.mfm);
    result.log_vn = table.values;
  }
  save_result(result, out_result);
}

void cmd_baselines(const std::filesystem::path& dataset_path,
                   const BaselinesOptions& options,
                   const std::filesystem::path& out_prefix) {
  const DatasetBundle bundle = load_dataset(dataset_path);
  int k = 0;
  if (options.k) {
    k = *options.k;
  } else if (options.k_from_result) {
    const RunResult r = load_result(*options.k_from_result);
    for (int z : r.partition.labels) k = std::max(k, z + 1);
  } else {
    throw ConfigError("baselines need --k or --k-from-result");
  }
  const DistanceMatrix d = pairwise_riemannian(bundle.matrices);
  const WardVariant variant = options.ward_variant == "d"
                                  ? WardVariant::kD
                                  : WardVariant::kD2;
  if (options.ward_variant != "d" && options.ward_variant != "d2")
    throw ConfigError("ward variant must be \"d2\" or \"d\"");
  if (options.run_hc) {
    const std::vector<int> labels = hierarchical_ward(d, k, variant);
    save_labels(labels, "hc_ward_" + options.ward_variant,
                out_prefix.string() + ".hc.json");
  }
  if (options.run_pam) {
    const std::vector<int> labels = pam(d, k);
    save_labels(labels, "pam", out_prefix.string() + ".pam.json");
  }
}

namespace {

std::vector<int> load_estimate_labels(const std::filesystem::path& path) {
  const ordered_json j = read_json(path);
  const std::string format = j.value("format", "");
  if (format == "wishmix-labels") return j.at("labels").get<std::vector<int>>();
  if (format == "wishmix-result")
    return j.at("partition").at("labels").get<std::vector<int>>();
  throw DataError(path.string() + " is neither a labels nor a result file");
}

}  // namespace

void cmd_evaluate(const EvaluateOptions& options,
                  const std::filesystem::path& out_path) {
  ordered_json report;
  report["format"] = "wishmix-evaluation";
  report["version"] = 1;

  std::optional<std::vector<int>> truth;
  if (options.truth_dataset) {
    const DatasetBundle bundle = load_dataset(*options.truth_dataset);
    if (!bundle.labels)
      throw DataError("truth dataset carries no labels");
    truth = bundle.labels;
  } else if (options.truth_labels) {
    truth = load_labels(*options.truth_labels);
  }

  ordered_json rows = ordered_json::array();
  std::vector<int> k_estimates;
  for (const auto& est_path : options.estimates) {
    const std::vector<int> est = load_estimate_labels(est_path);
    int k = 0;
    for (int z : est) k = std::max(k, z + 1);
    k_estimates.push_back(k);
    ordered_json row;
    row["file"] = est_path.string();
    row["k"] = k;
    if (truth)
      row["ari"] = adjusted_rand_index(*truth, est);
    rows.push_back(std::move(row));
  }
  report["estimates"] = std::move(rows);
  if (options.k0 && !k_estimates.empty())
    report["k_recovery_accuracy"] = k_recovery_accuracy(k_estimates, *options.k0);

  if (options.contingency) {
    const auto& cells = *options.contingency;
    if (cells.size() != 4)
      throw ConfigError("contingency needs exactly four cells");
    ContingencyTable2x2 table{cells[0], cells[1], cells[2], cells[3]};
    report["contingency"] = ordered_json::array(
        {ordered_json::array({table.a, table.b}),
         ordered_json::array({table.c, table.d})});
    report["fisher_p"] = fisher_exact_2x2(table);
  } else if (options.covariate && options.estimates.size() == 1) {
    const std::vector<int> est = load_estimate_labels(options.estimates[0]);
    const std::vector<int> cov = load_labels(*options.covariate);
    if (cov.size() != est.size())
      throw LengthMismatch(cov.size(), est.size());
    int k_est = 0, k_cov = 0;
    for (int z : est) k_est = std::max(k_est, z + 1);
    for (int z : cov) k_cov = std::max(k_cov, z + 1);
    if (k_est == 2 && k_cov == 2) {
      ContingencyTable2x2 table;
      for (std::size_t i = 0; i < est.size(); ++i) {
        if (est[i] == 0 && cov[i] == 0) ++table.a;
        if (est[i] == 0 && cov[i] == 1) ++table.b;
        if (est[i] == 1 && cov[i] == 0) ++table.c;
        if (est[i] == 1 && cov[i] == 1) ++table.d;
      }
      report["contingency"] = ordered_json::array(
          {ordered_json::array({table.a, table.b}),
           ordered_json::array({table.c, table.d})});
      report["fisher_p"] = fisher_exact_2x2(table);
    }
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot write " + out_path.string());
  out << report.dump(2) << "\n";
}

void cmd_report(const ReportOptions& options,
                const std::filesystem::path& out_path) {
  if (options.results.empty()) throw ConfigError("report needs result files");
  const int threads =
      options.threads > 0 ? options.threads : default_thread_count();

  struct Row {
    std::string file;
    int k = 0;
    double nu_mean = 0.0;
    double seconds = 0.0;
    std::optional<double> ari;
    std::uint64_t seed = 0;
  };
  std::vector<Row> rows(options.results.size());

  // fan the result/dataset loading out across workers
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= options.results.size()) return;
      const RunResult r = load_result(options.results[idx]);
      Row row;
      row.file = options.results[idx].string();
      for (int z : r.partition.labels) row.k = std::max(row.k, z + 1);
      row.nu_mean = r.nu.mean;
      row.seconds = r.seconds;
      row.seed = r.config.value("seed", 0ULL);
      if (r.config.contains("dataset")) {
        const std::filesystem::path data_file =
            r.config.at("dataset").get<std::string>();
        if (std::filesystem::exists(data_file)) {
          const DatasetBundle bundle = load_dataset(data_file);
          if (bundle.labels)
            row.ari = adjusted_rand_index(*bundle.labels, r.partition.labels);
        }
      }
      rows[idx] = std::move(row);
    }
  };
  std::vector<std::future<void>> futures;
  for (int t = 0; t < threads; ++t)
    futures.push_back(std::async(std::launch::async, worker));
  for (auto& f : futures) f.get();

  ordered_json report;
  report["format"] = "wishmix-report";
  report["version"] = 1;
  ordered_json out_rows = ordered_json::array();
  std::vector<double> aris, seconds;
  std::vector<int> ks;
  for (const Row& row : rows) {
    ordered_json r;
    r["file"] = row.file;
    r["seed"] = row.seed;
    r["k"] = row.k;
    r["nu_mean"] = row.nu_mean;
    r["seconds"] = row.seconds;
    if (row.ari) r["ari"] = *row.ari;
    out_rows.push_back(std::move(r));
    if (row.ari) aris.push_back(*row.ari);
    seconds.push_back(row.seconds);
    ks.push_back(row.k);
  }
  report["results"] = std::move(out_rows);

  auto mean_sd = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var = xs.size() > 1 ? var / static_cast<double>(xs.size() - 1) : 0.0;
    return std::pair<double, double>{mean, std::sqrt(var)};
  };
  ordered_json agg;
  agg["replicates"] = rows.size();
  if (!aris.empty()) {
    const auto [m, sd] = mean_sd(aris);
    agg["ari_mean"] = m;
    agg["ari_sd"] = sd;
  }
  {
    const auto [m, sd] = mean_sd(seconds);
    agg["seconds_mean"] = m;
    agg["seconds_sd"] = sd;
  }
  if (options.k0)
    agg["k_recovery_accuracy"] = k_recovery_accuracy(ks, *options.k0);
  report["aggregate"] = std::move(agg);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot write " + out_path.string());
  out << report.dump(2) << "\n";
}

}  // namespace wishmix
