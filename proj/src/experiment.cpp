#include "rroff/experiment.hpp"

#include <algorithm>

namespace rroff {

HarmonicSpectrum terminal_spectrum(const LoopConfig& cfg, const SimulationTrace& trace, std::span<const int> indices) {
  const auto window = terminal_window(trace.e, cfg.samples_per_rev, cfg.report.analysis_revolutions);
  return harmonic_spectrum(window, cfg.samples_per_rev, indices);
}

ExperimentResult run_experiment(const LoopConfig& cfg, const RunOptions& opts) {
  ExperimentResult out;
  out.indices = target_harmonics(cfg);
  std::sort(out.indices.begin(), out.indices.end());

  out.trace = run_episode(cfg, opts);
  RunOptions ref = opts;
  ref.measure_timing = false;
  ref.disable_adaptation = true;
  const auto baseline = run_episode(cfg, ref);
  ref.disable_rro = true;
  const auto floor_run = run_episode(cfg, ref);

  out.before = terminal_spectrum(cfg, baseline, out.indices);
  out.after = terminal_spectrum(cfg, out.trace, out.indices);
  out.floor = terminal_spectrum(cfg, floor_run, out.indices);
  out.report = attenuation_report(out.before, out.after, out.floor, cfg.report.floor_margin, cfg.report.floor_abs);
  return out;
}

}  // namespace rroff
