#pragma once

// JSON documents and plot tables for analysis results.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gsc/analysis.hpp"

namespace gsc::report {

using Json = nlohmann::ordered_json;

std::string_view version();

struct InputDigest {
  std::string path;
  std::string sha256;  // lowercase hex
};

std::string sha256_hex(std::string_view bytes);
/// Throws Error naming the path when the file cannot be read.
InputDigest digest_file(const std::filesystem::path& path);

Json to_json(const fidelity::SpectralSummary& s);
Json to_json(const calibration::CalibrationReport& r);
Json to_json(const metrics::BoundedFaultReport& r);
Json to_json(const pipeline::FitResult& f);
Json to_json(const pipeline::MeasuredExtrema& e);
Json to_json(const pipeline::Segmentation& s, const pipeline::Trial& trial);
Json to_json(const analysis::TrialAnalysis& a);

/// `generated_at` is the only field that changes between identical runs.
Json metadata(std::string_view command, const std::vector<InputDigest>& inputs);

/// Replaces every non-finite number with null and returns the JSON pointers
/// of the fields it touched.
std::vector<std::string> scrub_non_finite(Json& doc);

/// Writes per trial:
///   trial<N>_<phase>_trace.csv        t_s,v_v,i_a,r_ohm,p_w
///   trial<N>_<phase>_psd.csv          f_hz,psd
///   trial<N>_<phase>_spectrogram.csv  frame_t_s,f_hz,power
///   trial<N>_law.csv                  r_short_ohm,i_std_a,i_mod_a
/// r_ohm is left empty where |i| < 1e-6 A. The law table spans onset to the
/// stabilisation time of the trial's (v_clamp, r0, k). Returns the files
/// written. Throws Error when a file cannot be written.
std::vector<std::filesystem::path> emit_plot_data(
    const std::vector<analysis::TrialAnalysis>& trials, const std::filesystem::path& dir);

}  // namespace gsc::report
