#include "gsc/analysis.hpp"

#include <cmath>

#include "gsc/error.hpp"

namespace gsc::analysis {

using pipeline::Phase;

namespace {

std::span<const double> slice(const std::vector<double>& xs, const pipeline::Segment& s) {
  return std::span<const double>(xs).subspan(s.begin, s.size());
}

void fit_stage(TrialAnalysis& out, const pipeline::Segment& fault, const AnalysisOptions& opts) {
  out.fit = pipeline::fit_fault_decay(out.trial, fault);
  if (opts.k_declared) {
    out.k_used = *opts.k_declared;
    out.k_provenance = metrics::KProvenance::Declared;
  } else if (out.fit) {
    out.k_used = out.fit->k_fit;
    out.k_provenance = metrics::KProvenance::Fitted;
  } else {
    out.k_used = metrics::kLiteratureDecayConstant;
    out.k_provenance = metrics::KProvenance::LiteratureDefault;
    out.warnings.push_back(
        "decay window too short to fit at this sampling interval; using literature k = 1000 1/s");
  }
}

void fault_stage(TrialAnalysis& out, const AnalysisOptions& opts) {
  try {
    const pipeline::MeasuredExtrema m = pipeline::measure_extrema(out.trial, out.segmentation);
    out.extrema = m;
    const metrics::FaultExtrema e(m.v_source, m.v_clamp, m.i_nom, m.v_short_min, m.i_max_clap,
                                  out.k_used, m.t_fault);
    out.fault = metrics::characterize_fault(e, opts.c_j, opts.n_diodes, out.k_provenance);
    const model::ModelParams p(m.v_clamp, e.r0(), out.k_used);
    const double tau = out.fault->tau;
    out.law_power = LawPower{tau, m.v_clamp * model::current_standard(p, tau),
                             m.v_clamp * model::current_modified(p, tau)};
  } catch (const DomainError& err) {
    out.warnings.push_back(std::string("bounded-fault report unavailable: ") + err.what());
  }
}

void spectral_stage(TrialAnalysis& out, const AnalysisOptions& opts) {
  const double f_max = fidelity::f_max_from_k(out.k_used);
  for (const auto& seg : out.segmentation.segments) {
    try {
      const auto xs = slice(out.trial.i, seg);
      const fidelity::SampledSignal sig(std::vector<double>(xs.begin(), xs.end()), out.trial.t_s);
      PhaseSpectrum ps{seg.phase, fidelity::summarize(sig, f_max, opts.fidelity), {}};
      ps.spectrogram =
          fidelity::stft_spectrogram(sig, fidelity::resolve_stft(sig.size(), opts.fidelity));
      out.spectra.push_back(std::move(ps));
    } catch (const DomainError& err) {
      out.warnings.push_back("spectral summary for " + std::string(pipeline::phase_name(seg.phase)) +
                             " unavailable: " + err.what());
    }
  }
}

void calibration_stage(TrialAnalysis& out, const pipeline::Segment& fault,
                       const AnalysisOptions& opts) {
  calibration::CalibrationInputs in;
  in.fault_v = slice(out.trial.v, fault);
  in.fault_i = slice(out.trial.i, fault);
  for (const auto& seg : out.segmentation.segments) in.segments.push_back(slice(out.trial.i, seg));
  in.linearity_steps = opts.linearity_steps;
  in.nominal_cdi_pct = opts.nominal_cdi_pct;
  in.scenario = opts.scenario;
  in.weights = opts.calibration_weights;
  in.cdi_floor = opts.cdi_floor;
  try {
    out.calibration = calibration::assess(in);
  } catch (const DomainError& err) {
    out.warnings.push_back(std::string("calibration report unavailable: ") + err.what());
  }
}

}  // namespace

TrialAnalysis analyze_trial(const pipeline::Trial& trial, const AnalysisOptions& opts) {
  TrialAnalysis out;
  out.trial = trial;
  out.segmentation = pipeline::segment_phases(trial, opts.use_labels);
  const pipeline::Segment& fault = *out.segmentation.find(Phase::Fault);

  fit_stage(out, fault, opts);
  fault_stage(out, opts);
  spectral_stage(out, opts);
  calibration_stage(out, fault, opts);
  return out;
}

std::vector<TrialAnalysis> analyze_log(const pipeline::ExperimentLog& log,
                                       const AnalysisOptions& opts) {
  std::vector<TrialAnalysis> out;
  for (int id : log.trial_ids()) out.push_back(analyze_trial(log.trial(id), opts));
  return out;
}

}  // namespace gsc::analysis
