#include "rroff/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "rroff/csv.hpp"

namespace rroff {

RroProfile::RroProfile(int samples_per_rev, std::vector<HarmonicComponent> components)
    : n_(samples_per_rev), components_(std::move(components)) {
  if (n_ <= 0) throw std::invalid_argument("RroProfile: samples_per_rev must be positive");
  for (const auto& c : components_) {
    if (c.index < 1 || 2 * c.index >= n_) throw std::invalid_argument("RroProfile: harmonic above Nyquist");
    if (!(c.amplitude >= 0.0) || !std::isfinite(c.amplitude))
      throw std::invalid_argument("RroProfile: amplitude must be finite and >= 0");
    if (!std::isfinite(c.phase)) throw std::invalid_argument("RroProfile: non-finite phase");
  }
  std::sort(components_.begin(), components_.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  for (std::size_t i = 1; i < components_.size(); ++i)
    if (components_[i].index == components_[i - 1].index)
      throw std::invalid_argument("RroProfile: duplicate harmonic index");
  coeffs_.reserve(2 * components_.size());
  for (const auto& c : components_) {
    coeffs_.push_back(c.amplitude * std::cos(c.phase));
    coeffs_.push_back(-c.amplitude * std::sin(c.phase));
  }
  table_ = TrigTable::shared(n_);
}

RroProfile RroProfile::random(int samples_per_rev, std::span<const int> indices, double scale,
                              double decay_power, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  std::vector<HarmonicComponent> comps;
  comps.reserve(indices.size());
  for (int i : indices) {
    const double amp = scale / std::pow(static_cast<double>(i), decay_power);
    comps.push_back({i, amp, phase(rng)});
  }
  return RroProfile(samples_per_rev, std::move(comps));
}

std::vector<int> RroProfile::indices() const {
  std::vector<int> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.index);
  return out;
}

double RroProfile::sample(std::int64_t k) const {
  if (components_.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto m = table_->slot(components_[i].index, k);
    acc += coeffs_[2 * i] * table_->cos_slot(m) + coeffs_[2 * i + 1] * table_->sin_slot(m);
  }
  return acc;
}

RroProfile RroProfile::scaled(double factor) const {
  auto comps = components_;
  for (auto& c : comps) c.amplitude *= factor;
  return RroProfile(n_, std::move(comps));
}

void RroProfile::write_csv(std::ostream& os) const {
  os << "index,amplitude,phase\n";
  for (const auto& c : components_)
    os << c.index << ',' << csv::format(c.amplitude) << ',' << csv::format(c.phase) << '\n';
}

RroProfile RroProfile::read_csv(std::istream& is, int samples_per_rev) {
  const auto table = csv::read(is);
  const auto index = table.numeric_column("index");
  const auto amp = table.numeric_column("amplitude");
  const auto phase = table.numeric_column("phase");
  std::vector<HarmonicComponent> comps;
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] != std::floor(index[r])) throw std::invalid_argument("RRO profile: non-integer harmonic index");
    comps.push_back({static_cast<int>(index[r]), amp[r], phase[r]});
  }
  return RroProfile(samples_per_rev, std::move(comps));
}

RroProfile RroProfile::load_csv(const std::filesystem::path& path, int samples_per_rev) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open RRO profile '" + path.string() + "'");
  return read_csv(in, samples_per_rev);
}

std::vector<double> theta_rbar(const RroProfile& profile, const DelayPolynomial& a_star) {
  const auto coeffs = profile.coefficients();
  std::vector<double> out(coeffs.size());
  const auto& comps = profile.components();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const double omega =
        2.0 * std::numbers::pi * static_cast<double>(comps[i].index) / static_cast<double>(profile.samples_per_rev());
    const auto block = Block2::from_gain(evaluate_monic(a_star, omega));
    block.apply(coeffs[2 * i], coeffs[2 * i + 1], out[2 * i], out[2 * i + 1]);
  }
  return out;
}

NrroModel::NrroModel(std::uint64_t seed, double sigma, double lowpass_pole) : sigma_(sigma), rng_(seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("NrroModel: sigma must be >= 0");
  if (!(lowpass_pole >= 0.0 && lowpass_pole < 1.0))
    throw std::invalid_argument("NrroModel: lowpass_pole must lie in [0, 1)");
  if (lowpass_pole > 0.0)
    shaping_.emplace(DelayPolynomial({1.0 - lowpass_pole}), DelayPolynomial({lowpass_pole}));
}

double NrroModel::sample() {
  if (sigma_ == 0.0) return 0.0;
  const double w = sigma_ * normal_(rng_);
  return shaping_ ? shaping_->step(w) : w;
}

}  // namespace rroff
