#pragma once

#include "rroff/analysis.hpp"
#include "rroff/servo_sim.hpp"

namespace rroff {

// One adaptive episode plus its two references over the same terminal window:
// the u_a = 0 baseline ("before") and the RRO-free, non-adaptive run that
// defines the non-repeatable floor. All three share every random stream.
struct ExperimentResult {
  SimulationTrace trace;
  std::vector<int> indices;  // sorted target harmonics
  HarmonicSpectrum before;
  HarmonicSpectrum after;
  HarmonicSpectrum floor;
  AttenuationReport report;
};

ExperimentResult run_experiment(const LoopConfig& cfg, const RunOptions& opts = {});

// Spectrum of e over the configured terminal window.
HarmonicSpectrum terminal_spectrum(const LoopConfig& cfg, const SimulationTrace& trace, std::span<const int> indices);

}  // namespace rroff
