#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rroff {

// Unit-circle lookup table cos/sin(2*pi*m/N), m in [0, N). Shared by every
// object that evaluates harmonics of the same revolution length so that
// regressors, disturbances and spectra agree bit for bit.
class TrigTable {
 public:
  explicit TrigTable(int samples_per_rev);

  int size() const { return n_; }
  // Reduces (index * k) modulo N before the lookup.
  std::size_t slot(int index, std::int64_t k) const;
  double cos_slot(std::size_t m) const { return cos_[m]; }
  double sin_slot(std::size_t m) const { return sin_[m]; }

  static std::shared_ptr<const TrigTable> shared(int samples_per_rev);

 private:
  int n_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// Target frequencies omega_i = 2*pi*i/N for a sorted set of distinct harmonic
// indices of the spindle frequency.
class HarmonicSet {
 public:
  HarmonicSet() = default;
  HarmonicSet(double spindle_hz, int samples_per_rev, std::vector<int> indices);

  double spindle_hz() const { return spindle_hz_; }
  int samples_per_rev() const { return n_; }
  double sample_rate_hz() const { return spindle_hz_ * n_; }
  std::span<const int> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  std::size_t dimension() const { return 2 * indices_.size(); }
  bool empty() const { return indices_.empty(); }
  double omega(std::size_t i) const;
  double frequency_hz(std::size_t i) const { return spindle_hz_ * indices_[i]; }

  const TrigTable& table() const { return *table_; }

  // (cos, sin) of omega_i * k.
  double cos_at(std::size_t i, std::int64_t k) const {
    return table_->cos_slot(table_->slot(indices_[i], k));
  }
  double sin_at(std::size_t i, std::int64_t k) const {
    return table_->sin_slot(table_->slot(indices_[i], k));
  }

 private:
  double spindle_hz_ = 0.0;
  int n_ = 0;
  std::vector<int> indices_;
  std::shared_ptr<const TrigTable> table_;
};

// Parses "1-58", "59-173", "3,5,7-9". Returns sorted, de-duplicated indices.
std::vector<int> parse_index_ranges(std::string_view text);
// Compact inverse of parse_index_ranges.
std::string format_index_ranges(std::span<const int> indices);

// phi_r(k) = [cos(w_1 k), sin(w_1 k), ..., cos(w_n k), sin(w_n k)].
void rro_regressor(const HarmonicSet& h, std::int64_t k, std::span<double> out);
std::vector<double> rro_regressor(const HarmonicSet& h, std::int64_t k);

}  // namespace rroff
