#include "gsc/report.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "gsc/error.hpp"
#include "gsc/model_core.hpp"

#ifndef GSC_VERSION
#define GSC_VERSION "0.0.0"
#endif

namespace gsc::report {

std::string_view version() { return GSC_VERSION; }

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(kHex[md[k] >> 4]);
    out.push_back(kHex[md[k] & 0xF]);
  }
  return out;
}

InputDigest digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return {path.string(), sha256_hex(buf.str())};
}

Json to_json(const fidelity::SpectralSummary& s) {
  return Json{{"nci", s.nci},   {"tci", s.tci_complexity}, {"f_d_hz", s.f_d},
              {"f_c_hz", s.f_c}, {"h_s_bits", s.h_s},       {"scc", s.scc},
              {"ses", s.ses},   {"tfsm", s.tfsm},           {"cvi", s.cvi}};
}

Json to_json(const calibration::CalibrationReport& r) {
  Json j;
  j["cdi_mean_pct"] = r.cdi_mean_pct;
  j["gamma"] = r.gamma ? Json(*r.gamma) : Json(nullptr);
  j["rmd"] = r.rmd;
  j["nlr"] = r.nlr;
  j["redundancy_error_pct"] =
      r.redundancy_error_pct ? Json(*r.redundancy_error_pct) : Json(nullptr);
  j["cccs"] = r.cccs;
  j["scenario"] = std::string(calibration::scenario_name(r.scenario));
  j["excluded_samples"] = r.excluded_samples;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const metrics::BoundedFaultReport& r) {
  Json j;
  j["r0_ohm"] = r.r0;
  j["r_c_min_ohm"] = r.r_c_min;
  j["epsilon"] = r.epsilon;
  j["i_ceiling_a"] = r.i_ceiling;
  j["p_css_w"] = r.p_css;
  j["p_nom_w"] = r.p_nom;
  j["sfe"] = r.sfe;
  j["tci_clamp"] = r.tci_clamp;
  j["tau_s"] = r.tau;
  j["scer"] = r.scer;
  j["e_total_j"] = r.e_total;
  j["e_cap_j"] = r.e_cap;
  j["k_provenance"] = std::string(metrics::provenance_name(r.k_provenance));
  j["bounded"] = r.bounded;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const pipeline::FitResult& f) {
  return Json{{"r0_fit_ohm", f.r0_fit},
              {"k_fit_per_s", f.k_fit},
              {"rmse_ohm", f.rmse},
              {"iterations", f.iterations},
              {"converged", f.converged}};
}

Json to_json(const pipeline::MeasuredExtrema& e) {
  return Json{{"v_source_v", e.v_source},   {"v_clamp_v", e.v_clamp},
              {"i_nom_a", e.i_nom},         {"v_short_min_v", e.v_short_min},
              {"i_max_clap_a", e.i_max_clap}, {"t_fault_s", e.t_fault}};
}

Json to_json(const pipeline::Segmentation& s, const pipeline::Trial& trial) {
  Json segs = Json::array();
  for (const auto& seg : s.segments) {
    segs.push_back(Json{{"phase", std::string(pipeline::phase_name(seg.phase))},
                        {"begin", seg.begin},
                        {"end", seg.end},
                        {"t_start_s", trial.t[seg.begin]},
                        {"samples", seg.size()}});
  }
  return Json{{"source", s.from_labels ? "labels" : "detected"}, {"segments", segs}};
}

Json to_json(const analysis::TrialAnalysis& a) {
  Json j;
  j["trial"] = a.trial.id;
  j["polarity"] = std::string(pipeline::polarity_name(a.trial.polarity));
  j["sampling_ms"] = std::lround(a.trial.t_s * 1000.0);
  j["samples"] = a.trial.size();
  j["segmentation"] = to_json(a.segmentation, a.trial);
  j["fit"] = a.fit ? to_json(*a.fit) : Json(nullptr);
  j["k_used_per_s"] = a.k_used;
  j["k_provenance"] = std::string(metrics::provenance_name(a.k_provenance));
  j["extrema"] = a.extrema ? to_json(*a.extrema) : Json(nullptr);
  j["bounded_fault"] = a.fault ? to_json(*a.fault) : Json(nullptr);
  if (a.law_power) {
    j["law_power"] = Json{{"t_s", a.law_power->t_s},
                          {"p_standard_w", a.law_power->p_standard_w},
                          {"p_modified_w", a.law_power->p_modified_w},
                          {"note", "measured V_clamp times each law's current at tau; "
                                   "modified-law power has no agreed formula"}};
  } else {
    j["law_power"] = nullptr;
  }
  Json spectral = Json::array();
  for (const auto& ps : a.spectra) {
    Json s = to_json(ps.summary);
    s["phase"] = std::string(pipeline::phase_name(ps.phase));
    spectral.push_back(std::move(s));
  }
  j["spectral"] = std::move(spectral);
  j["calibration"] = a.calibration ? to_json(*a.calibration) : Json(nullptr);
  j["warnings"] = a.warnings;
  return j;
}

Json metadata(std::string_view command, const std::vector<InputDigest>& inputs) {
  Json in = Json::array();
  for (const auto& d : inputs) in.push_back(Json{{"path", d.path}, {"sha256", d.sha256}});
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&tt, &utc);
  std::array<char, 32> stamp{};
  std::strftime(stamp.data(), stamp.size(), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return Json{{"tool", "gsc"},
              {"version", std::string(version())},
              {"command", std::string(command)},
              {"generated_at", std::string(stamp.data())},
              {"inputs", std::move(in)}};
}

namespace {

void scrub(Json& node, const std::string& pointer, std::vector<std::string>& touched) {
  if (node.is_number_float() && !std::isfinite(node.get<double>())) {
    node = nullptr;
    touched.push_back(pointer.empty() ? "/" : pointer);
  } else if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      scrub(it.value(), pointer + "/" + it.key(), touched);
    }
  } else if (node.is_array()) {
    for (std::size_t k = 0; k < node.size(); ++k) {
      scrub(node[k], pointer + "/" + std::to_string(k), touched);
    }
  }
}

void put(std::string& out, double x) {
  std::array<char, 32> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  out.append(buf.data(), ptr);
}

class Table {
 public:
  Table(std::filesystem::path path, std::string_view header) : path_(std::move(path)) {
    text_.append(header);
    text_.push_back('\n');
  }

  void row(std::initializer_list<std::optional<double>> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) text_.push_back(',');
      first = false;
      if (c) put(text_, *c);
    }
    text_.push_back('\n');
  }

  std::filesystem::path write() const {
    std::ofstream out(path_, std::ios::binary);
    out << text_;
    if (!out) throw Error("cannot write " + path_.string());
    return path_;
  }

 private:
  std::filesystem::path path_;
  std::string text_;
};

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<std::string> scrub_non_finite(Json& doc) {
  std::vector<std::string> touched;
  scrub(doc, "", touched);
  return touched;
}

std::vector<std::filesystem::path> emit_plot_data(
    const std::vector<analysis::TrialAnalysis>& trials, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  for (const auto& a : trials) {
    const std::string stem = "trial" + std::to_string(a.trial.id);
    const auto& tr = a.trial;

    for (const auto& seg : a.segmentation.segments) {
      const std::string phase = lowercase(pipeline::phase_name(seg.phase));
      Table trace(dir / (stem + "_" + phase + "_trace.csv"), "t_s,v_v,i_a,r_ohm,p_w");
      for (std::size_t k = seg.begin; k < seg.end; ++k) {
        const double v = tr.v[k];
        const double i = tr.i[k];
        const std::optional<double> r =
            std::abs(i) < 1e-6 ? std::nullopt : std::optional<double>(v / i);
        trace.row({tr.t[k], v, i, r, v * i});
      }
      written.push_back(trace.write());
    }

    for (const auto& ps : a.spectra) {
      const std::string phase = lowercase(pipeline::phase_name(ps.phase));
      Table psd(dir / (stem + "_" + phase + "_psd.csv"), "f_hz,psd");
      for (std::size_t k = 0; k < ps.summary.psd.psd.size(); ++k) {
        psd.row({ps.summary.psd.freqs_hz[k], ps.summary.psd.psd[k]});
      }
      written.push_back(psd.write());

      const auto& sg = ps.spectrogram;
      Table spec(dir / (stem + "_" + phase + "_spectrogram.csv"), "frame_t_s,f_hz,power");
      for (std::size_t f = 0; f < sg.frames; ++f) {
        for (std::size_t b = 0; b < sg.bins; ++b) {
          spec.row({sg.frame_times_s[f], sg.freqs_hz[b], sg.at(f, b)});
        }
      }
      written.push_back(spec.write());
    }

    if (a.extrema) {
      const model::ModelParams p(a.extrema->v_clamp, a.extrema->v_clamp / a.extrema->i_nom,
                                 a.k_used);
      const double eps = a.fault ? a.fault->epsilon : 0.01;
      const double span = model::stabilization_time(p.k(), eps);
      constexpr int kPoints = 201;
      Table law(dir / (stem + "_law.csv"), "r_short_ohm,i_std_a,i_mod_a");
      for (int k = 0; k < kPoints; ++k) {
        const double t = span * static_cast<double>(k) / (kPoints - 1);
        law.row({model::r_short_deviation(p, t), model::current_standard(p, t),
                 model::current_modified(p, t)});
      }
      written.push_back(law.write());
    }
  }
  return written;
}

}  // namespace gsc::report
