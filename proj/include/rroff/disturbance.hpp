#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "rroff/lti.hpp"
#include "rroff/regressors.hpp"

namespace rroff {

struct HarmonicComponent {
  int index = 0;
  double amplitude = 0.0;  // PES units, >= 0
  double phase = 0.0;      // radians

  friend bool operator==(const HarmonicComponent&, const HarmonicComponent&) = default;
};

// Repeatable runout r(k) = sum_i amp_i cos(w_i k + phase_i). N-periodic.
class RroProfile {
 public:
  RroProfile() = default;
  RroProfile(int samples_per_rev, std::vector<HarmonicComponent> components);

  // Seeded random profile: amp_i = scale / i^decay_power, phases uniform in [-pi, pi).
  static RroProfile random(int samples_per_rev, std::span<const int> indices, double scale,
                           double decay_power, std::uint64_t seed);

  int samples_per_rev() const { return n_; }
  const std::vector<HarmonicComponent>& components() const { return components_; }
  std::vector<int> indices() const;
  bool empty() const { return components_.empty(); }

  double sample(std::int64_t k) const;

  // (cos, sin) coefficient pairs [a cos(phase), -a sin(phase)] in index order.
  const std::vector<double>& coefficients() const { return coeffs_; }

  RroProfile scaled(double factor) const;

  void write_csv(std::ostream& os) const;
  static RroProfile read_csv(std::istream& is, int samples_per_rev);
  static RroProfile load_csv(const std::filesystem::path& path, int samples_per_rev);

 private:
  int n_ = 0;
  std::vector<HarmonicComponent> components_;
  std::vector<double> coeffs_;
  std::shared_ptr<const TrigTable> table_;
};

inline double rro_sample(const RroProfile& profile, std::int64_t k) { return profile.sample(k); }

// Coefficients of A(q^-1) r(k) on the phi_r basis (interleaved cos/sin per
// harmonic, in profile index order). Per harmonic the (cos, sin) pair is
// multiplied by the 2x2 frequency-response block of A = 1 - A*.
std::vector<double> theta_rbar(const RroProfile& profile, const DelayPolynomial& a_star);

// Broadband non-repeatable runout: seeded Gaussian samples, optionally shaped
// by the first-order low-pass (1 - p) q^-1 / (1 - p q^-1).
class NrroModel {
 public:
  NrroModel(std::uint64_t seed, double sigma, double lowpass_pole = 0.0);

  double sample();
  double sigma() const { return sigma_; }

 private:
  double sigma_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::optional<RationalSystem> shaping_;
};

inline double nrro_sample(NrroModel& model) { return model.sample(); }

}  // namespace rroff
