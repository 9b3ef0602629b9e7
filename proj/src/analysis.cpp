#include "rroff/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rroff/csv.hpp"
#include "rroff/regressors.hpp"

namespace rroff {

HarmonicSpectrum harmonic_spectrum(std::span<const double> signal, int samples_per_rev, std::span<const int> indices) {
  if (samples_per_rev <= 0) throw std::invalid_argument("harmonic_spectrum: samples_per_rev must be positive");
  const auto n = static_cast<std::size_t>(samples_per_rev);
  if (signal.empty() || signal.size() % n != 0)
    throw std::invalid_argument("harmonic_spectrum: signal length is not a positive multiple of N");
  for (int i : indices)
    if (i < 1 || 2 * i >= samples_per_rev) throw std::invalid_argument("harmonic_spectrum: index outside [1, N/2)");

  // Fold all revolutions onto one period first; each bin is then a single
  // N-point correlation against the shared trig table.
  std::vector<double> folded(n, 0.0);
  for (std::size_t k = 0; k < signal.size(); ++k) folded[k % n] += signal[k];

  const auto table = TrigTable::shared(samples_per_rev);
  const double scale = 2.0 / static_cast<double>(signal.size());
  HarmonicSpectrum out;
  out.samples_per_rev = samples_per_rev;
  out.indices.assign(indices.begin(), indices.end());
  for (int i : indices) {
    double c = 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto m = table->slot(i, static_cast<std::int64_t>(k));
      c += folded[k] * table->cos_slot(m);
      s += folded[k] * table->sin_slot(m);
    }
    c *= scale;
    s *= scale;
    out.amplitude.push_back(std::hypot(c, s));
    out.phase.push_back(std::atan2(-s, c));
  }
  return out;
}

std::vector<double> HarmonicSpectrum::synthesize(std::int64_t revolutions) const {
  const auto table = TrigTable::shared(samples_per_rev);
  std::vector<double> x(static_cast<std::size_t>(revolutions * samples_per_rev), 0.0);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const double c = amplitude[b] * std::cos(phase[b]);
    const double s = -amplitude[b] * std::sin(phase[b]);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const auto m = table->slot(indices[b], static_cast<std::int64_t>(k));
      x[k] += c * table->cos_slot(m) + s * table->sin_slot(m);
    }
  }
  return x;
}

void HarmonicSpectrum::write_csv(std::ostream& os) const {
  os << "index,amplitude,phase\n";
  for (std::size_t b = 0; b < indices.size(); ++b)
    os << indices[b] << ',' << csv::format(amplitude[b]) << ',' << csv::format(phase[b]) << '\n';
}

std::span<const double> terminal_window(std::span<const double> signal, int samples_per_rev, std::int64_t revolutions) {
  const auto len = static_cast<std::size_t>(revolutions * samples_per_rev);
  if (revolutions <= 0 || len > signal.size())
    throw std::invalid_argument("terminal_window: window longer than signal");
  return signal.subspan(signal.size() - len, len);
}

double attenuation_db(double before, double after) {
  if (after == 0.0) return -std::numeric_limits<double>::infinity();
  if (before == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(after / before);
}

AttenuationReport attenuation_report(const HarmonicSpectrum& before, const HarmonicSpectrum& after,
                                     const HarmonicSpectrum& noise_floor, double floor_margin, double floor_abs) {
  if (before.indices != after.indices || before.indices != noise_floor.indices)
    throw std::invalid_argument("attenuation_report: index sets differ");
  AttenuationReport rep;
  rep.worst_db = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < before.size(); ++b) {
    AttenuationRow row;
    row.index = before.indices[b];
    row.before = before.amplitude[b];
    row.after = after.amplitude[b];
    row.floor = noise_floor.amplitude[b];
    row.db = attenuation_db(row.before, row.after);
    row.at_floor = row.after <= floor_margin * row.floor + floor_abs;
    rep.max_residual = std::max(rep.max_residual, row.after);
    rep.worst_db = std::max(rep.worst_db, row.db);
    if (row.at_floor) ++rep.count_at_floor;
    rep.rows.push_back(row);
  }
  return rep;
}

void AttenuationReport::write_csv(std::ostream& os) const {
  os << "index,before,after,floor,db,at_floor\n";
  for (const auto& r : rows)
    os << r.index << ',' << csv::format(r.before) << ',' << csv::format(r.after) << ',' << csv::format(r.floor) << ','
       << csv::format(r.db) << ',' << (r.at_floor ? 1 : 0) << '\n';
}

std::string AttenuationReport::to_table() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%7s %13s %13s %13s %9s %s\n", "index", "before", "after", "floor", "dB", "at-floor");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%7d %13.6e %13.6e %13.6e %9.2f %s\n", r.index, r.before, r.after, r.floor, r.db,
                  r.at_floor ? "yes" : "no");
    os << line;
  }
  std::snprintf(line, sizeof line, "max residual %.6e, worst %.2f dB, %zu/%zu at floor\n", max_residual, worst_db,
                count_at_floor, rows.size());
  os << line;
  return os.str();
}

}  // namespace rroff
