#include "gsc/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <thread>

#include "gsc/config.hpp"
#include "gsc/error.hpp"
#include "gsc/report.hpp"

namespace gsc::cli {

using report::Json;

std::optional<Command> parse_command(std::string_view name) {
  if (name == "simulate") return Command::Simulate;
  if (name == "analyze") return Command::Analyze;
  if (name == "fit") return Command::Fit;
  if (name == "metrics") return Command::Metrics;
  if (name == "validate") return Command::Validate;
  if (name == "report") return Command::Report;
  return std::nullopt;
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Analyze: return "analyze";
    case Command::Fit: return "fit";
    case Command::Metrics: return "metrics";
    case Command::Validate: return "validate";
    case Command::Report: return "report";
  }
  return "analyze";
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

config::ToolConfig resolve_config(const RunConfig& rc) {
  std::optional<std::filesystem::path> path = rc.config;
  if (!path) {
    if (const char* env = std::getenv(config::kConfigEnv); env != nullptr && *env != '\0') {
      path = env;
    }
  }
  config::ToolConfig cfg;
  if (path) {
    if (!std::filesystem::exists(*path)) throw Error("config file not found: " + path->string());
    cfg = config::load_config(*path);
  }

  auto& a = cfg.analysis;
  if (rc.scenario) {
    const auto sc = calibration::parse_scenario(*rc.scenario);
    if (!sc) throw UsageError("unknown scenario '" + *rc.scenario + "'");
    a.scenario = *sc;
    a.calibration_weights.reset();
  }
  try {
    if (rc.cccs_weights) {
      const auto& w = *rc.cccs_weights;
      a.calibration_weights = calibration::CalibrationWeights(w[0], w[1], w[2]);
    }
    if (rc.cvi_weights) a.fidelity.weights = fidelity::ValidationWeights(*rc.cvi_weights);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (rc.bins) {
    if (*rc.bins < 2) throw UsageError("--bins must be >= 2");
    a.fidelity.histogram_bins = *rc.bins;
  }
  if (rc.window) {
    if (*rc.window < 1) throw UsageError("--window must be >= 1");
    a.fidelity.window_len = *rc.window;
  }
  if (rc.hop) {
    if (*rc.hop < 1) throw UsageError("--hop must be >= 1");
    a.fidelity.hop = *rc.hop;
  }
  if (rc.k) {
    if (!(*rc.k > 0.0)) throw UsageError("--k must be > 0");
    a.k_declared = *rc.k;
  }
  if (rc.ignore_labels) a.use_labels = false;
  if (rc.seed) cfg.simulation.seed = *rc.seed;
  return cfg;
}

void require_inputs(const RunConfig& rc) {
  if (rc.inputs.empty()) {
    throw UsageError(std::string(command_name(rc.command)) + " needs at least one --input");
  }
  for (const auto& p : rc.inputs) {
    if (!std::filesystem::is_regular_file(p)) throw Error("input not found: " + p.string());
  }
}

pipeline::ExperimentLog read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return pipeline::parse_log(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void emit(const RunConfig& rc, std::ostream& out, const std::string& text) {
  if (!rc.output) {
    out << text;
    out.flush();
    return;
  }
  std::ofstream file(*rc.output, std::ios::binary);
  file << text;
  if (!file) throw Error("cannot write " + rc.output->string());
}

std::string finish(Json doc) {
  for (const auto& ptr : report::scrub_non_finite(doc)) {
    doc["warnings"].push_back("non-finite value replaced by null at " + ptr);
  }
  if (!doc.contains("warnings")) doc["warnings"] = Json::array();
  return doc.dump(2) + "\n";
}

std::vector<report::InputDigest> digests(const RunConfig& rc) {
  std::vector<report::InputDigest> out;
  for (const auto& p : rc.inputs) out.push_back(report::digest_file(p));
  return out;
}

void append(std::string& s, double x) {
  std::array<char, 32> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  s.append(buf.data(), ptr);
}

Format format_of(const RunConfig& rc) { return rc.format.value_or(Format::Json); }

struct InputAnalysis {
  std::filesystem::path path;
  std::vector<analysis::TrialAnalysis> trials;
};

std::vector<InputAnalysis> analyze_inputs(const RunConfig& rc,
                                          const analysis::AnalysisOptions& opts) {
  const std::size_t n = rc.inputs.size();
  unsigned jobs = rc.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : rc.jobs;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));

  std::vector<InputAnalysis> out(n);
  auto work = [&](std::size_t k) {
    out[k].path = rc.inputs[k];
    out[k].trials = analysis::analyze_log(read_log(rc.inputs[k]), opts);
  };
  if (jobs <= 1) {
    for (std::size_t k = 0; k < n; ++k) work(k);
    return out;
  }
  for (std::size_t start = 0; start < n; start += jobs) {
    std::vector<std::future<void>> batch;
    for (std::size_t k = start; k < std::min(n, start + jobs); ++k) {
      batch.push_back(std::async(std::launch::async, work, k));
    }
    // get() rethrows in input order, so the first failing file is reported.
    for (auto& f : batch) f.wait();
    for (auto& f : batch) f.get();
  }
  return out;
}

int cmd_simulate(const RunConfig& rc, const config::ToolConfig& cfg, std::ostream& out) {
  if (!rc.inputs.empty()) throw UsageError("simulate takes no --input");
  if (rc.format && *rc.format != Format::Csv) throw UsageError("simulate writes csv only");
  const pipeline::ExperimentLog log = pipeline::simulate_experiment(cfg.simulation);
  std::ostringstream text;
  pipeline::write_log(text, log);
  emit(rc, out, text.str());
  return kExitOk;
}

int cmd_analyze(const RunConfig& rc, const config::ToolConfig& cfg, std::ostream& out) {
  require_inputs(rc);
  const bool csv = format_of(rc) == Format::Csv;
  if (csv && !rc.output) throw UsageError("analyze --format csv needs --output <directory>");
  const auto results = analyze_inputs(rc, cfg.analysis);

  auto plot = [&](const std::filesystem::path& dir) {
    for (const auto& r : results) {
      const auto sub = results.size() == 1 ? dir : dir / r.path.stem();
      report::emit_plot_data(r.trials, sub);
    }
  };
  if (csv) {
    plot(*rc.output);
    return kExitOk;
  }
  if (rc.plot_dir) plot(*rc.plot_dir);

  Json doc;
  doc["metadata"] = report::metadata("analyze", digests(rc));
  doc["trials"] = Json::array();
  doc["warnings"] = Json::array();
  for (const auto& r : results) {
    for (const auto& t : r.trials) {
      Json j = report::to_json(t);
      j["input"] = r.path.string();
      for (const auto& w : t.warnings) {
        doc["warnings"].push_back("trial " + std::to_string(t.trial.id) + ": " + w);
      }
      doc["trials"].push_back(std::move(j));
    }
  }
  emit(rc, out, finish(std::move(doc)));
  return kExitOk;
}

int cmd_fit(const RunConfig& rc, const config::ToolConfig& cfg, std::ostream& out) {
  require_inputs(rc);
  Json fits = Json::array();
  std::string csv = "input,trial,window_points,r0_fit_ohm,k_fit_per_s,rmse_ohm,iterations,converged\n";
  for (const auto& path : rc.inputs) {
    const pipeline::ExperimentLog log = read_log(path);
    for (int id : log.trial_ids()) {
      const pipeline::Trial trial = log.trial(id);
      const pipeline::Segmentation seg = pipeline::segment_phases(trial, cfg.analysis.use_labels);
      const pipeline::Segment& fault = *seg.find(pipeline::Phase::Fault);
      const pipeline::DecayWindow w = pipeline::decay_window(trial, fault);
      const auto fit = pipeline::fit_fault_decay(trial, fault);

      Json j{{"input", path.string()}, {"trial", id}, {"window_points", w.series.t.size()}};
      j["fit"] = fit ? report::to_json(*fit) : Json(nullptr);
      if (!fit) j["note"] = "decay window holds too few points or the fit did not converge";
      fits.push_back(std::move(j));

      csv += path.string() + "," + std::to_string(id) + "," + std::to_string(w.series.t.size());
      if (fit) {
        for (double x : {fit->r0_fit, fit->k_fit, fit->rmse}) {
          csv.push_back(',');
          append(csv, x);
        }
        csv += "," + std::to_string(fit->iterations) + (fit->converged ? ",true" : ",false");
      } else {
        csv += ",,,,,false";
      }
      csv.push_back('\n');
    }
  }
  if (format_of(rc) == Format::Csv) {
    emit(rc, out, csv);
  } else {
    Json doc;
    doc["metadata"] = report::metadata("fit", digests(rc));
    doc["fits"] = std::move(fits);
    emit(rc, out, finish(std::move(doc)));
  }
  return kExitOk;
}

double number_field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(std::string("metrics input: missing field '") + key + "'");
  if (!j[key].is_number()) {
    throw Error(std::string("metrics input: field '") + key + "' must be a number");
  }
  return j[key].get<double>();
}

int cmd_metrics(const RunConfig& rc, const config::ToolConfig& cfg, std::ostream& out) {
  require_inputs(rc);
  if (rc.inputs.size() != 1) throw UsageError("metrics takes exactly one --input");
  std::ifstream in(rc.inputs.front(), std::ios::binary);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(rc.inputs.front().string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error("metrics input: expected a JSON object");
  static constexpr std::array<std::string_view, 9> kKeys = {
      "v_source_v", "v_clamp_v", "i_nom_a", "v_short_min_v", "i_max_a",
      "t_fault_s",  "k_per_s",   "c_j_f",   "n_diodes"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw Error("metrics input: unknown field '" + key + "'");
    }
  }

  double k = metrics::kLiteratureDecayConstant;
  auto provenance = metrics::KProvenance::LiteratureDefault;
  if (rc.k) {
    k = *rc.k;
    provenance = metrics::KProvenance::Declared;
  } else if (j.contains("k_per_s")) {
    k = number_field(j, "k_per_s");
    provenance = metrics::KProvenance::Declared;
  }
  const double c_j = j.contains("c_j_f") ? number_field(j, "c_j_f") : cfg.analysis.c_j;
  int n_diodes = cfg.analysis.n_diodes;
  if (j.contains("n_diodes")) {
    if (!j["n_diodes"].is_number_integer()) {
      throw Error("metrics input: field 'n_diodes' must be an integer");
    }
    n_diodes = j["n_diodes"].get<int>();
  }

  const metrics::FaultExtrema e(number_field(j, "v_source_v"), number_field(j, "v_clamp_v"),
                                number_field(j, "i_nom_a"), number_field(j, "v_short_min_v"),
                                number_field(j, "i_max_a"), k, number_field(j, "t_fault_s"));
  const metrics::BoundedFaultReport r = metrics::characterize_fault(e, c_j, n_diodes, provenance);

  if (format_of(rc) == Format::Csv) {
    std::string csv = "field,value\n";
    const Json rj = report::to_json(r);
    for (const auto& [key, value] : rj.items()) {
      if (!value.is_number()) continue;
      csv += key + ",";
      append(csv, value.get<double>());
      csv.push_back('\n');
    }
    csv += "k_provenance," + std::string(metrics::provenance_name(r.k_provenance)) + "\n";
    csv += std::string("bounded,") + (r.bounded ? "true" : "false") + "\n";
    emit(rc, out, csv);
    return kExitOk;
  }
  Json doc;
  doc["metadata"] = report::metadata("metrics", digests(rc));
  doc["k_per_s"] = k;
  doc["bounded_fault"] = report::to_json(r);
  doc["warnings"] = r.warnings;
  emit(rc, out, finish(std::move(doc)));
  return kExitOk;
}

int cmd_validate(const RunConfig& rc, const config::ToolConfig& cfg, std::ostream& out) {
  require_inputs(rc);
  const auto results = analyze_inputs(rc, cfg.analysis);
  if (format_of(rc) == Format::Csv) {
    std::string csv =
        "input,trial,phase,nci,tci,f_d_hz,f_c_hz,h_s_bits,scc,ses,tfsm,cvi,"
        "cdi_mean_pct,gamma,rmd,nlr,redundancy_error_pct,cccs,scenario,excluded_samples\n";
    for (const auto& r : results) {
      for (const auto& t : r.trials) {
        for (const auto& ps : t.spectra) {
          const auto& s = ps.summary;
          csv += r.path.string() + "," + std::to_string(t.trial.id) + "," +
                 std::string(pipeline::phase_name(ps.phase));
          for (double x : {s.nci, s.tci_complexity, s.f_d, s.f_c, s.h_s, s.scc, s.ses, s.tfsm,
                           s.cvi}) {
            csv.push_back(',');
            append(csv, x);
          }
          if (t.calibration) {
            const auto& c = *t.calibration;
            csv.push_back(',');
            append(csv, c.cdi_mean_pct);
            csv.push_back(',');
            if (c.gamma) append(csv, *c.gamma);
            csv.push_back(',');
            append(csv, c.rmd);
            csv.push_back(',');
            append(csv, c.nlr);
            csv.push_back(',');
            if (c.redundancy_error_pct) append(csv, *c.redundancy_error_pct);
            csv.push_back(',');
            append(csv, c.cccs);
            csv += "," + std::string(calibration::scenario_name(c.scenario)) + "," +
                   std::to_string(c.excluded_samples);
          } else {
            csv += ",,,,,,,,";
          }
          csv.push_back('\n');
        }
      }
    }
    emit(rc, out, csv);
    return kExitOk;
  }

  Json doc;
  doc["metadata"] = report::metadata("validate", digests(rc));
  doc["trials"] = Json::array();
  doc["warnings"] = Json::array();
  for (const auto& r : results) {
    for (const auto& t : r.trials) {
      const Json full = report::to_json(t);
      doc["trials"].push_back(Json{{"input", r.path.string()},
                                   {"trial", t.trial.id},
                                   {"spectral", full["spectral"]},
                                   {"calibration", full["calibration"]}});
      for (const auto& w : t.warnings) {
        doc["warnings"].push_back("trial " + std::to_string(t.trial.id) + ": " + w);
      }
    }
  }
  emit(rc, out, finish(std::move(doc)));
  return kExitOk;
}

int cmd_report(const RunConfig& rc, std::ostream& out) {
  require_inputs(rc);
  if (format_of(rc) != Format::Json) throw UsageError("report writes json only");
  Json merged;
  merged["metadata"] = report::metadata("report", digests(rc));
  Json sources = Json::array();
  Json warnings = Json::array();
  for (const auto& path : rc.inputs) {
    std::ifstream in(path, std::ios::binary);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw Error(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw Error(path.string() + ": expected a JSON object");
    if (doc.contains("metadata")) {
      sources.push_back(Json{{"path", path.string()}, {"metadata", doc["metadata"]}});
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string& key = it.key();
      if (key == "metadata") continue;
      if (key == "warnings") {
        for (const auto& w : it.value()) warnings.push_back(w);
        continue;
      }
      if (!merged.contains(key)) {
        merged[key] = it.value();
      } else {
        Json& dst = merged[key];
        if (!dst.is_array()) dst = Json::array({dst});
        if (it.value().is_array()) {
          for (const auto& x : it.value()) dst.push_back(x);
        } else {
          dst.push_back(it.value());
        }
      }
    }
  }
  merged["metadata"]["sources"] = std::move(sources);
  merged["warnings"] = std::move(warnings);
  emit(rc, out, finish(std::move(merged)));
  return kExitOk;
}

}  // namespace

int run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  try {
    const config::ToolConfig cfg = resolve_config(rc);
    switch (rc.command) {
      case Command::Simulate: return cmd_simulate(rc, cfg, out);
      case Command::Analyze: return cmd_analyze(rc, cfg, out);
      case Command::Fit: return cmd_fit(rc, cfg, out);
      case Command::Metrics: return cmd_metrics(rc, cfg, out);
      case Command::Validate: return cmd_validate(rc, cfg, out);
      case Command::Report: return cmd_report(rc, out);
    }
  } catch (const UsageError& e) {
    err << "gsc: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "gsc: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace gsc::cli
