#pragma once

// One-call analysis of a trial: segmentation, decay fit, extrema, the
// bounded-fault report, spectral summaries per phase, and the calibration
// report. Failures in one stage become warnings; the stages that can still
// run do.

#include <optional>
#include <string>
#include <vector>

#include "gsc/calibration.hpp"
#include "gsc/fault_metrics.hpp"
#include "gsc/pipeline.hpp"
#include "gsc/signal_fidelity.hpp"

namespace gsc::analysis {

struct AnalysisOptions {
  fidelity::FidelityOptions fidelity;
  calibration::Scenario scenario = calibration::Scenario::Balanced;
  std::optional<calibration::CalibrationWeights> calibration_weights;
  double cdi_floor = calibration::kCdiFloorAmps;
  std::vector<calibration::LinearityStep> linearity_steps;
  std::optional<double> nominal_cdi_pct;
  bool use_labels = true;
  /// Replaces the fitted k when set.
  std::optional<double> k_declared;
  double c_j = 40e-12;
  int n_diodes = 2;
};

struct PhaseSpectrum {
  pipeline::Phase phase;
  fidelity::SpectralSummary summary;
  fidelity::Spectrogram spectrogram;
};

/// Measured clamp voltage times each law's current at the stabilisation
/// time. There is no agreed formula for the modified-law power, so this
/// pairing is one reading and is labelled as such in reports.
struct LawPower {
  double t_s;
  double p_standard_w;
  double p_modified_w;
};

struct TrialAnalysis {
  pipeline::Trial trial;
  pipeline::Segmentation segmentation;
  std::optional<pipeline::FitResult> fit;
  double k_used = metrics::kLiteratureDecayConstant;
  metrics::KProvenance k_provenance = metrics::KProvenance::LiteratureDefault;
  std::optional<pipeline::MeasuredExtrema> extrema;
  std::optional<metrics::BoundedFaultReport> fault;
  std::optional<LawPower> law_power;
  std::vector<PhaseSpectrum> spectra;
  std::optional<calibration::CalibrationReport> calibration;
  std::vector<std::string> warnings;
};

/// Throws only when the trial cannot be segmented at all.
TrialAnalysis analyze_trial(const pipeline::Trial& trial, const AnalysisOptions& opts);

std::vector<TrialAnalysis> analyze_log(const pipeline::ExperimentLog& log,
                                       const AnalysisOptions& opts);

}  // namespace gsc::analysis
