#include "gsc/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <toml.hpp>

#include "gsc/error.hpp"

namespace gsc::config {

namespace {

class Section {
 public:
  Section(const toml::table* table, std::string name, std::initializer_list<std::string_view> keys)
      : table_(table), name_(std::move(name)) {
    if (table_ == nullptr) return;
    for (const auto& [key, node] : *table_) {
      if (std::find(keys.begin(), keys.end(), key.str()) == keys.end()) {
        throw DomainError("config: unknown key [" + name_ + "]." + std::string(key.str()));
      }
    }
  }

  template <typename T>
  void get(std::string_view key, T& dst) const {
    if (auto v = value<T>(key)) dst = *v;
  }

  template <typename T>
  std::optional<T> value(std::string_view key) const {
    if (table_ == nullptr) return std::nullopt;
    const toml::node* node = table_->get(key);
    if (node == nullptr) return std::nullopt;
    if constexpr (std::is_same_v<T, double>) {
      if (auto d = node->value<double>()) return *d;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (node->is_boolean()) return node->as_boolean()->get();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (node->is_string()) return node->as_string()->get();
    } else if constexpr (std::is_integral_v<T>) {
      if (node->is_integer()) {
        const auto x = node->as_integer()->get();
        if (x < 0 && std::is_unsigned_v<T>) throw bad(key, "must be >= 0");
        return static_cast<T>(x);
      }
    }
    throw bad(key, "has the wrong type");
  }

  std::vector<double> numbers(std::string_view key) const {
    std::vector<double> out;
    if (table_ == nullptr) return out;
    const toml::node* node = table_->get(key);
    if (node == nullptr) return out;
    const toml::array* arr = node->as_array();
    if (arr == nullptr) throw bad(key, "must be an array of numbers");
    for (const auto& x : *arr) {
      const auto d = x.value<double>();
      if (!d) throw bad(key, "must be an array of numbers");
      out.push_back(*d);
    }
    return out;
  }

  const toml::array* array(std::string_view key) const {
    if (table_ == nullptr) return nullptr;
    const toml::node* node = table_->get(key);
    if (node == nullptr) return nullptr;
    if (!node->is_array()) throw bad(key, "must be an array");
    return node->as_array();
  }

  DomainError bad(std::string_view key, std::string_view what) const {
    return DomainError("config: [" + name_ + "]." + std::string(key) + " " + std::string(what));
  }

 private:
  const toml::table* table_;
  std::string name_;
};

void read_fidelity(const Section& s, fidelity::FidelityOptions& f) {
  s.get("histogram_bins", f.histogram_bins);
  if (auto w = s.value<std::size_t>("window_len")) f.window_len = *w;
  if (auto h = s.value<std::size_t>("hop")) f.hop = *h;
  if (auto w = s.value<std::string>("window")) {
    if (*w == "hann") {
      f.window = fidelity::Window::Hann;
    } else if (*w == "rectangular") {
      f.window = fidelity::Window::Rectangular;
    } else {
      throw s.bad("window", "must be \"hann\" or \"rectangular\"");
    }
  }
  s.get("stability_tolerance", f.stability.relative_tolerance);
  const auto w = s.numbers("cvi_weights");
  if (!w.empty()) {
    if (w.size() != 5) throw s.bad("cvi_weights", "needs 5 values");
    f.weights = fidelity::ValidationWeights({w[0], w[1], w[2], w[3], w[4]});
  }
}

void read_calibration(const Section& s, analysis::AnalysisOptions& a) {
  if (auto name = s.value<std::string>("scenario")) {
    const auto sc = calibration::parse_scenario(*name);
    if (!sc) throw s.bad("scenario", "is not a known scenario");
    a.scenario = *sc;
  }
  const auto w = s.numbers("weights");
  if (!w.empty()) {
    if (w.size() != 3) throw s.bad("weights", "needs 3 values");
    a.calibration_weights = calibration::CalibrationWeights(w[0], w[1], w[2]);
  }
  s.get("cdi_floor_a", a.cdi_floor);
  if (auto n = s.value<double>("nominal_cdi_pct")) a.nominal_cdi_pct = *n;
  if (const toml::array* steps = s.array("linearity_steps")) {
    for (const auto& step : *steps) {
      const toml::array* pair = step.as_array();
      if (pair == nullptr || pair->size() != 2 || !pair->get(0)->value<double>() ||
          !pair->get(1)->value<double>()) {
        throw s.bad("linearity_steps", "entries must be [measured, ideal] pairs");
      }
      a.linearity_steps.push_back(
          {*pair->get(0)->value<double>(), *pair->get(1)->value<double>()});
    }
  }
}

clamp::ClampNetwork read_clamp(const Section& s, const clamp::ClampNetwork& base) {
  clamp::DiodeSpec d = base.conduction_path().front();
  if (auto name = s.value<std::string>("diode")) {
    const auto preset = clamp::diode_preset(*name);
    if (!preset) throw s.bad("diode", "is not a known preset");
    d = *preset;
  }
  s.get("vf", d.vf);
  s.get("i_s", d.i_s);
  s.get("n", d.n);
  s.get("v_t", d.v_t);
  s.get("c_j", d.c_j);
  int path = static_cast<int>(base.conduction_path().size());
  double r_dyn = base.r_dyn();
  int clamp_diodes = base.n_clamp_diodes();
  s.get("path_diodes", path);
  s.get("r_dyn", r_dyn);
  s.get("clamp_diodes", clamp_diodes);
  if (path < 1) throw s.bad("path_diodes", "must be >= 1");
  return clamp::ClampNetwork(std::vector<clamp::DiodeSpec>(static_cast<std::size_t>(path), d),
                             r_dyn, clamp_diodes);
}

void read_simulation(const Section& s, pipeline::SimConfig& c) {
  double v0 = c.model.v0();
  double r0 = c.model.r0();
  double k = c.model.k();
  s.get("v0", v0);
  s.get("r0", r0);
  s.get("k", k);
  c.model = model::ModelParams(v0, r0, k);
  s.get("pre_s", c.pre_s);
  s.get("fault_s", c.fault_s);
  s.get("post_s", c.post_s);
  s.get("v_short_min", c.v_short_min);
  s.get("i_max", c.i_max);
  s.get("base_interval_s", c.base_interval_s);
  s.get("block_size", c.block_size);
  s.get("noise_v", c.noise_v);
  s.get("noise_i", c.noise_i);
  s.get("sensor_sensitivity", c.sensor_sensitivity);
  s.get("sensor_midpoint", c.sensor_midpoint);
  s.get("adc_bits", c.adc_bits);
  s.get("adc_fullscale", c.adc_fullscale);
  s.get("quantize", c.quantize);
  if (auto p = s.value<std::string>("polarity")) {
    if (*p == "forward") {
      c.polarity = pipeline::Polarity::Forward;
    } else if (*p == "reverse") {
      c.polarity = pipeline::Polarity::Reverse;
    } else {
      throw s.bad("polarity", "must be \"forward\" or \"reverse\"");
    }
  }
  s.get("trial", c.trial);
  s.get("label_phases", c.label_phases);
  s.get("seed", c.seed);
}

const toml::table* table_of(const toml::table& root, std::string_view name) {
  const toml::node* node = root.get(name);
  if (node == nullptr) return nullptr;
  if (!node->is_table()) throw DomainError("config: " + std::string(name) + " must be a table");
  return node->as_table();
}

}  // namespace

ToolConfig parse_config(std::string_view toml_text, std::string_view source_name) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source_name);
  } catch (const toml::parse_error& err) {
    throw ParseError(std::string(err.description()),
                     static_cast<std::size_t>(err.source().begin.line));
  }
  for (const auto& [key, node] : root) {
    const std::string_view k = key.str();
    if (k != "fidelity" && k != "calibration" && k != "analysis" && k != "clamp" &&
        k != "simulation") {
      throw DomainError("config: unknown table [" + std::string(k) + "]");
    }
  }

  ToolConfig cfg;
  read_fidelity(Section(table_of(root, "fidelity"), "fidelity",
                        {"histogram_bins", "window_len", "hop", "window", "stability_tolerance",
                         "cvi_weights"}),
                cfg.analysis.fidelity);
  read_calibration(Section(table_of(root, "calibration"), "calibration",
                           {"scenario", "weights", "cdi_floor_a", "nominal_cdi_pct",
                            "linearity_steps"}),
                   cfg.analysis);

  const Section analysis(table_of(root, "analysis"), "analysis", {"use_labels", "k_declared"});
  analysis.get("use_labels", cfg.analysis.use_labels);
  if (auto k = analysis.value<double>("k_declared")) {
    if (!(*k > 0.0)) throw analysis.bad("k_declared", "must be > 0");
    cfg.analysis.k_declared = *k;
  }

  const clamp::ClampNetwork net =
      read_clamp(Section(table_of(root, "clamp"), "clamp",
                         {"diode", "vf", "i_s", "n", "v_t", "c_j", "path_diodes", "r_dyn",
                          "clamp_diodes"}),
                 cfg.simulation.clamp);
  cfg.simulation.clamp = net;
  cfg.analysis.c_j = net.conduction_path().front().c_j;
  cfg.analysis.n_diodes = net.n_clamp_diodes();

  read_simulation(Section(table_of(root, "simulation"), "simulation",
                          {"v0", "r0", "k", "pre_s", "fault_s", "post_s", "v_short_min", "i_max",
                           "base_interval_s", "block_size", "noise_v", "noise_i",
                           "sensor_sensitivity", "sensor_midpoint", "adc_bits", "adc_fullscale",
                           "quantize", "polarity", "trial", "label_phases", "seed"}),
                  cfg.simulation);

  if (cfg.analysis.fidelity.histogram_bins < 2) {
    throw DomainError("config: [fidelity].histogram_bins must be >= 2");
  }
  return cfg;
}

ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace gsc::config
