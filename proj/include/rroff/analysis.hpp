#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rroff {

// Amplitude/phase per harmonic, x(k) ~ amplitude * cos(2 pi i k / N + phase).
struct HarmonicSpectrum {
  int samples_per_rev = 0;
  std::vector<int> indices;
  std::vector<double> amplitude;
  std::vector<double> phase;

  std::size_t size() const { return indices.size(); }
  // Signal of `revolutions * N` samples rebuilt from the listed bins.
  std::vector<double> synthesize(std::int64_t revolutions) const;
  void write_csv(std::ostream& os) const;
};

// Bin-exact projection onto cos/sin at 2 pi i / N, averaged over every
// revolution in the signal. signal.size() must be a positive multiple of N and
// every index must lie in [1, N/2).
HarmonicSpectrum harmonic_spectrum(std::span<const double> signal, int samples_per_rev, std::span<const int> indices);

// Last `revolutions` whole revolutions of a signal.
std::span<const double> terminal_window(std::span<const double> signal, int samples_per_rev, std::int64_t revolutions);

struct AttenuationRow {
  int index = 0;
  double before = 0.0;
  double after = 0.0;
  double floor = 0.0;
  double db = 0.0;  // 20 log10(after / before); -inf when after == 0
  bool at_floor = false;
};

struct AttenuationReport {
  std::vector<AttenuationRow> rows;
  double max_residual = 0.0;
  std::size_t count_at_floor = 0;
  double worst_db = 0.0;

  bool all_at_floor() const { return count_at_floor == rows.size(); }
  void write_csv(std::ostream& os) const;
  std::string to_table() const;
};

// at_floor: after <= floor_margin * floor + floor_abs.
AttenuationReport attenuation_report(const HarmonicSpectrum& before, const HarmonicSpectrum& after,
                                     const HarmonicSpectrum& noise_floor, double floor_margin = 2.0,
                                     double floor_abs = 0.0);

double attenuation_db(double before, double after);

}  // namespace rroff
