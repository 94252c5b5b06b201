#pragma once

// Tool configuration read from a TOML file. Every key is optional; anything
// missing keeps the library default. Unknown tables or keys are rejected so
// a typo never silently falls back to a default.
//
//   [fidelity]     histogram_bins, window_len, hop, window ("hann" | "rectangular"),
//                  stability_tolerance, cvi_weights = [5 numbers]
//   [calibration]  scenario, weights = [w1, w2, w3], cdi_floor_a, nominal_cdi_pct,
//                  linearity_steps = [[measured, ideal], ...]
//   [analysis]     use_labels, k_declared
//   [clamp]        diode (preset name), vf, i_s, n, v_t, c_j, path_diodes, r_dyn,
//                  clamp_diodes. Starts from the simulator bench pair.
//   [simulation]   v0, r0, k, pre_s, fault_s, post_s, v_short_min, i_max,
//                  base_interval_s, block_size, noise_v, noise_i, sensor_sensitivity,
//                  sensor_midpoint, adc_bits, adc_fullscale, quantize,
//                  polarity ("forward" | "reverse"), trial, label_phases, seed

#include <filesystem>
#include <string_view>

#include "gsc/analysis.hpp"
#include "gsc/pipeline.hpp"

namespace gsc::config {

/// Environment variable naming a config file when --config is not given.
inline constexpr const char* kConfigEnv = "GSC_CONFIG";

struct ToolConfig {
  analysis::AnalysisOptions analysis;
  pipeline::SimConfig simulation;
};

/// Throws ParseError for bad TOML and DomainError for values out of range.
ToolConfig parse_config(std::string_view toml_text, std::string_view source_name = "config");
ToolConfig load_config(const std::filesystem::path& path);

}  // namespace gsc::config
