#include "rroff/regressors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rroff {

TrigTable::TrigTable(int samples_per_rev) : n_(samples_per_rev) {
  if (n_ <= 0) throw std::invalid_argument("TrigTable: samples_per_rev must be positive");
  cos_.resize(static_cast<std::size_t>(n_));
  sin_.resize(static_cast<std::size_t>(n_));
  for (int m = 0; m < n_; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n_);
    cos_[static_cast<std::size_t>(m)] = std::cos(angle);
    sin_[static_cast<std::size_t>(m)] = std::sin(angle);
  }
}

std::size_t TrigTable::slot(int index, std::int64_t k) const {
  const std::int64_t n = n_;
  std::int64_t r = k % n;
  if (r < 0) r += n;
  return static_cast<std::size_t>((static_cast<std::int64_t>(index) % n * r) % n);
}

std::shared_ptr<const TrigTable> TrigTable::shared(int samples_per_rev) {
  static std::mutex mu;
  static std::map<int, std::weak_ptr<const TrigTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[samples_per_rev];
  if (auto existing = slot.lock()) return existing;
  auto fresh = std::make_shared<const TrigTable>(samples_per_rev);
  slot = fresh;
  return fresh;
}

HarmonicSet::HarmonicSet(double spindle_hz, int samples_per_rev, std::vector<int> indices)
    : spindle_hz_(spindle_hz), n_(samples_per_rev), indices_(std::move(indices)) {
  if (samples_per_rev <= 0) throw std::invalid_argument("HarmonicSet: samples_per_rev must be positive");
  if (!(spindle_hz > 0.0)) throw std::invalid_argument("HarmonicSet: spindle_hz must be positive");
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
    throw std::invalid_argument("HarmonicSet: duplicate harmonic index");
  for (int i : indices_) {
    if (i < 1) throw std::invalid_argument("HarmonicSet: harmonic index must be >= 1");
    if (2 * i >= samples_per_rev) throw std::invalid_argument("HarmonicSet: harmonic above Nyquist");
  }
  table_ = TrigTable::shared(samples_per_rev);
}

double HarmonicSet::omega(std::size_t i) const {
  return 2.0 * std::numbers::pi * static_cast<double>(indices_[i]) / static_cast<double>(n_);
}

std::vector<int> parse_index_ranges(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
      throw std::invalid_argument("bad harmonic index '" + std::string(s) + "'");
    return v;
  };
  std::vector<int> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      out.push_back(parse_int(item));
    } else {
      const int lo = parse_int(item.substr(0, dash));
      const int hi = parse_int(item.substr(dash + 1));
      if (hi < lo) throw std::invalid_argument("bad harmonic range '" + std::string(item) + "'");
      for (int i = lo; i <= hi; ++i) out.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string format_index_ranges(std::span<const int> indices) {
  std::string out;
  std::size_t i = 0;
  while (i < indices.size()) {
    std::size_t j = i;
    while (j + 1 < indices.size() && indices[j + 1] == indices[j] + 1) ++j;
    if (!out.empty()) out += ',';
    out += std::to_string(indices[i]);
    if (j > i) out += '-' + std::to_string(indices[j]);
    i = j + 1;
  }
  return out;
}

void rro_regressor(const HarmonicSet& h, std::int64_t k, std::span<double> out) {
  if (out.size() != h.dimension()) throw std::invalid_argument("rro_regressor: output size mismatch");
  const auto& table = h.table();
  const auto idx = h.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto m = table.slot(idx[i], k);
    out[2 * i] = table.cos_slot(m);
    out[2 * i + 1] = table.sin_slot(m);
  }
}

std::vector<double> rro_regressor(const HarmonicSet& h, std::int64_t k) {
  std::vector<double> out(h.dimension());
  rro_regressor(h, k, out);
  return out;
}

}  // namespace rroff
