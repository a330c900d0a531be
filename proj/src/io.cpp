#include "wishmix/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "wishmix/errors.hpp"

namespace wishmix {

namespace {

constexpr int kDatasetVersion = 1;
constexpr int kResultVersion = 1;

ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const ordered_json& j) {
  if (!j.is_array() || j.empty())
    throw DataError("matrix entry must be a nonempty array of rows");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != cols)
      throw DataError("matrix rows have inconsistent lengths");
    for (int c = 0; c < cols; ++c)
      m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

ordered_json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void save_dataset(const DatasetBundle& bundle,
                  const std::filesystem::path& path) {
  ordered_json j;
  j["format"] = "wishmix-dataset";
  j["version"] = kDatasetVersion;
  j["dim"] = bundle.dim;
  j["n"] = bundle.n();
  ordered_json mats = ordered_json::array();
  for (const SpdMatrix& w : bundle.matrices)
    mats.push_back(matrix_to_json(w.entries()));
  j["matrices"] = std::move(mats);
  if (bundle.labels) j["labels"] = *bundle.labels;
  if (bundle.subject_ids) j["subject_ids"] = *bundle.subject_ids;
  if (!bundle.provenance.is_null()) j["provenance"] = bundle.provenance;
  write_text_file(path, j.dump(2) + "\n");
}

DatasetBundle load_dataset(const std::filesystem::path& path) {
  const ordered_json j = read_json_file(path);
  if (j.value("format", "") != "wishmix-dataset")
    throw DataError(path.string() + " is not a dataset bundle");
  if (j.value("version", 0) != kDatasetVersion)
    throw DataError("unsupported dataset version in " + path.string());
  DatasetBundle bundle;
  bundle.dim = j.at("dim").get<int>();
  const auto& mats = j.at("matrices");
  bundle.matrices.reserve(mats.size());
  for (std::size_t i = 0; i < mats.size(); ++i) {
    Eigen::MatrixXd m = matrix_from_json(mats[i]);
    if (m.rows() != bundle.dim || m.cols() != bundle.dim)
      throw HeterogeneousDims(static_cast<int>(m.rows()), bundle.dim);
    try {
      bundle.matrices.emplace_back(m);
    } catch (const NumericError& e) {
      throw NonSpdObservation(static_cast<int>(i), e.what());
    }
  }
  if (j.contains("labels")) {
    auto labels = j.at("labels").get<std::vector<int>>();
    if (labels.size() != bundle.matrices.size())
      throw LengthMismatch(labels.size(), bundle.matrices.size());
    bundle.labels = std::move(labels);
  }
  if (j.contains("subject_ids")) {
    auto ids = j.at("subject_ids").get<std::vector<std::string>>();
    if (ids.size() != bundle.matrices.size())
      throw LengthMismatch(ids.size(), bundle.matrices.size());
    bundle.subject_ids = std::move(ids);
  }
  if (j.contains("provenance")) bundle.provenance = j.at("provenance");
  return bundle;
}

void save_trace(const McmcTrace& trace, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "wishmix-trace 1\n";
  out << "seed " << trace.seed << "\n";
  out << "iterations " << trace.iterations << " burn_in " << trace.burn_in
      << " thin " << trace.thin << "\n";
  const std::size_t n = trace.labels.empty() ? 0 : trace.labels.front().size();
  out << "n " << n << " retained " << trace.size() << "\n";
  out << "nu_accepted " << trace.nu_accept_count << "\n";
  out << "nu:\n";
  for (double v : trace.nu) out << format_double(v) << "\n";
  out << "labels:\n";
  for (const auto& z : trace.labels) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (i) out << ' ';
      out << z[i];
    }
    out << "\n";
  }
  out << "end\n";
  write_text_file(path, out.str());
}

McmcTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string word;
  McmcTrace trace;
  std::size_t n = 0, retained = 0;
  in >> word;
  if (word != "wishmix-trace") throw DataError("not a trace file: " + path.string());
  int version;
  in >> version;
  if (version != 1) throw DataError("unsupported trace version");
  in >> word >> trace.seed;
  in >> word >> trace.iterations >> word >> trace.burn_in >> word >> trace.thin;
  in >> word >> n >> word >> retained;
  in >> word >> trace.nu_accept_count;
  in >> word;  // "nu:"
  trace.nu.resize(retained);
  for (std::size_t l = 0; l < retained; ++l) in >> trace.nu[l];
  in >> word;  // "labels:"
  trace.labels.assign(retained, std::vector<int>(n));
  trace.k_plus.resize(retained);
  for (std::size_t l = 0; l < retained; ++l) {
    int k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      in >> trace.labels[l][i];
      k = std::max(k, trace.labels[l][i] + 1);
    }
    trace.k_plus[static_cast<std::size_t>(l)] = k;
  }
  if (!in) throw DataError("truncated trace file: " + path.string());
  return trace;
}

void save_labels(const std::vector<int>& labels, const std::string& method,
                 const std::filesystem::path& path) {
  ordered_json j;
  j["format"] = "wishmix-labels";
  j["version"] = 1;
  j["n"] = labels.size();
  j["method"] = method;
  int k = 0;
  for (int z : labels) k = std::max(k, z + 1);
  j["k"] = k;
  j["labels"] = labels;
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  const ordered_json j = read_json_file(path);
  if (j.value("format", "") != "wishmix-labels")
    throw DataError(path.string() + " is not a labels file");
  return j.at("labels").get<std::vector<int>>();
}

FitSettings parse_fit_settings(const ordered_json& j) {
  FitSettings s;
  try {
    s.model = j.value("model", s.model);
    if (s.model != "mfm" && s.model != "dpm")
      throw ConfigError("model must be \"mfm\" or \"dpm\"");
    s.iterations = j.value("iterations", s.iterations);
    s.burn_in = j.value("burn_in", s.burn_in);
    s.thin = j.value("thin", s.thin);
    s.proposal_sd = j.value("proposal_sd", s.proposal_sd);
    if (!j.contains("seed"))
      throw ConfigError("fit config is missing the required field \"seed\"");
    s.seed = j.at("seed").get<std::uint64_t>();
    s.gamma = j.value("gamma", s.gamma);
    s.lambda = j.value("lambda", s.lambda);
    s.alpha = j.value("alpha", s.alpha);
    if (j.contains("kappa0")) s.kappa0 = j.at("kappa0").get<double>();
    if (j.contains("nu_lo")) s.nu_lo = j.at("nu_lo").get<double>();
    s.nu_hi = j.value("nu_hi", s.nu_hi);
    if (j.contains("psi0")) {
      const auto& psi = j.at("psi0");
      if (psi.is_string()) {
        if (psi.get<std::string>() != "identity")
          throw ConfigError("psi0 must be \"identity\", a scale object, or a matrix");
      } else if (psi.is_object()) {
        s.psi0_scale = psi.at("scaled_identity").get<double>();
      } else {
        s.psi0 = matrix_from_json(psi);
      }
    }
    if (j.contains("init")) {
      const auto& init = j.at("init");
      if (init.is_string()) {
        s.init = init.get<std::string>();
        if (s.init != "singletons")
          throw ConfigError("string init must be \"singletons\"");
      } else if (init.is_object() && init.contains("k_clusters")) {
        s.init = "k_clusters";
        s.init_k = init.at("k_clusters").get<int>();
      } else if (init.is_object() && init.contains("given")) {
        s.init = "given";
        s.init_labels = init.at("given").get<std::vector<int>>();
      } else {
        throw ConfigError("unrecognized init specification");
      }
    }
    if (j.contains("nu_init")) s.nu_init = j.at("nu_init").get<double>();
    s.fix_nu = j.value("fix_nu", s.fix_nu);
    s.sweep = j.value("sweep", s.sweep);
    if (s.sweep != "fixed" && s.sweep != "random")
      throw ConfigError("sweep must be \"fixed\" or \"random\"");
    s.audit_vn = j.value("audit_vn", s.audit_vn);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid fit config: ") + e.what());
  }
  return s;
}

ordered_json fit_settings_to_json(const FitSettings& s, int dim) {
  ordered_json j;
  j["model"] = s.model;
  j["iterations"] = s.iterations;
  j["burn_in"] = s.burn_in;
  j["thin"] = s.thin;
  j["proposal_sd"] = s.proposal_sd;
  j["seed"] = s.seed;
  j["gamma"] = s.gamma;
  j["lambda"] = s.lambda;
  j["alpha"] = s.alpha;
  j["kappa0"] = s.kappa0.value_or(dim + 2.0);
  j["nu_lo"] = s.nu_lo.value_or(dim + 2.0);
  j["nu_hi"] = s.nu_hi;
  if (s.psi0) {
    j["psi0"] = matrix_to_json(*s.psi0);
  } else if (s.psi0_scale) {
    j["psi0"] = ordered_json{{"scaled_identity", *s.psi0_scale}};
  } else {
    j["psi0"] = "identity";
  }
  if (s.init == "singletons") {
    j["init"] = "singletons";
  } else if (s.init == "k_clusters") {
    j["init"] = ordered_json{{"k_clusters", s.init_k}};
  } else {
    j["init"] = ordered_json{{"given", s.init_labels}};
  }
  if (s.nu_init) j["nu_init"] = *s.nu_init;
  j["fix_nu"] = s.fix_nu;
  j["sweep"] = s.sweep;
  j["audit_vn"] = s.audit_vn;
  return j;
}

SamplerConfig to_sampler_config(const FitSettings& s, int dim) {
  Eigen::MatrixXd psi0;
  if (s.psi0) {
    psi0 = *s.psi0;
    if (psi0.rows() != dim)
      throw ConfigError("psi0 dimension does not match the dataset");
  } else if (s.psi0_scale) {
    psi0 = *s.psi0_scale * Eigen::MatrixXd::Identity(dim, dim);
  } else {
    psi0 = Eigen::MatrixXd::Identity(dim, dim);
  }
  PriorHyper hyper(SpdMatrix(psi0), s.kappa0.value_or(dim + 2.0),
                   s.nu_lo.value_or(dim + 2.0), s.nu_hi);
  SamplerConfig config(std::move(hyper));
  config.iterations = s.iterations;
  config.burn_in = s.burn_in;
  config.thin = s.thin;
  config.proposal_sd = s.proposal_sd;
  config.seed = s.seed;
  config.model = s.model == "mfm" ? ModelKind::kMfm : ModelKind::kDpm;
  config.mfm.gamma = s.gamma;
  config.mfm.lambda = s.lambda;
  config.dpm.alpha = s.alpha;
  if (s.init == "singletons") {
    config.init = InitSpec::singletons();
  } else if (s.init == "k_clusters") {
    config.init = InitSpec::k_clusters(s.init_k);
  } else {
    config.init = InitSpec::given(s.init_labels);
  }
  config.nu_init = s.nu_init;
  config.fix_nu = s.fix_nu;
  config.sweep = s.sweep == "random" ? SweepOrder::kRandom : SweepOrder::kFixed;
  return config;
}

void save_result(const RunResult& result, const std::filesystem::path& path) {
  ordered_json j;
  j["format"] = "wishmix-result";
  j["version"] = kResultVersion;
  j["config"] = result.config;
  ordered_json part;
  part["labels"] = result.partition.labels;
  part["draw_index"] = result.partition.draw_index;
  int k = 0;
  for (int z : result.partition.labels) k = std::max(k, z + 1);
  part["k"] = k;
  j["partition"] = std::move(part);
  ordered_json hist;
  for (const auto& [kk, mass] : result.partition.k_histogram)
    hist[std::to_string(kk)] = mass;
  j["k_posterior"] = std::move(hist);
  ordered_json nu;
  nu["mean"] = result.nu.mean;
  nu["ci_level"] = 0.95;
  nu["ci"] = ordered_json::array({result.nu.ci_lo, result.nu.ci_hi});
  nu["ess"] = result.nu.ess_value;
  nu["acceptance_rate"] = result.nu.acceptance_rate;
  j["nu"] = std::move(nu);
  ordered_json timing;
  timing["seconds"] = result.seconds;
  timing["seconds_per_iteration"] = result.seconds_per_iteration;
  j["timing"] = std::move(timing);
  j["trace"] = result.trace_path;
  if (!result.log_vn.empty()) j["log_vn"] = result.log_vn;
  write_text_file(path, j.dump(2) + "\n");
}

RunResult load_result(const std::filesystem::path& path) {
  const ordered_json j = read_json_file(path);
  if (j.value("format", "") != "wishmix-result")
    throw DataError(path.string() + " is not a result file");
  RunResult r;
  r.config = j.at("config");
  r.partition.labels = j.at("partition").at("labels").get<std::vector<int>>();
  r.partition.draw_index = j.at("partition").at("draw_index").get<std::size_t>();
  for (const auto& [key, mass] : j.at("k_posterior").items())
    r.partition.k_histogram[std::stoi(key)] = mass.get<double>();
  const auto& nu = j.at("nu");
  r.nu.mean = nu.at("mean").get<double>();
  r.nu.ci_lo = nu.at("ci")[0].get<double>();
  r.nu.ci_hi = nu.at("ci")[1].get<double>();
  r.nu.ess_value = nu.at("ess").get<double>();
  r.nu.acceptance_rate = nu.at("acceptance_rate").get<double>();
  r.seconds = j.at("timing").at("seconds").get<double>();
  r.seconds_per_iteration =
      j.at("timing").at("seconds_per_iteration").get<double>();
  r.trace_path = j.at("trace").get<std::string>();
  if (j.contains("log_vn"))
    r.log_vn = j.at("log_vn").get<std::vector<double>>();
  return r;
}

int default_thread_count() {
  if (const char* env = std::getenv("WISHMIX_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace wishmix
