#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace rroff {

// K(k) = max(floor, k0 / (1 + decay * k)). decay = 0 gives a constant gain.
struct GainSchedule {
  double k0 = 0.5;
  double decay = 0.0;
  double floor = 0.0;

  double operator()(std::int64_t k) const;
  void validate() const;
};

// Block sizes of the stacked estimate [theta_A; theta_B(stage 0); ...; theta_M].
// One theta_B block per actuator stage.
struct ParameterLayout {
  std::size_t na = 0;
  std::vector<std::size_t> nb;
  std::size_t nm = 0;  // 2 * n_r

  std::size_t size() const;
  std::size_t b_offset(std::size_t stage) const;
  std::size_t m_offset() const { return size() - nm; }
  friend bool operator==(const ParameterLayout&, const ParameterLayout&) = default;
};

class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(ParameterLayout layout);
  ParameterVector(ParameterLayout layout, std::vector<double> values);

  const ParameterLayout& layout() const { return layout_; }
  std::span<const double> stacked() const { return values_; }
  std::span<double> stacked() { return values_; }

  std::span<const double> theta_a() const { return {values_.data(), layout_.na}; }
  std::span<const double> theta_b(std::size_t stage = 0) const {
    return {values_.data() + layout_.b_offset(stage), layout_.nb.at(stage)};
  }
  std::span<const double> theta_m() const { return {values_.data() + layout_.m_offset(), layout_.nm}; }

 private:
  ParameterLayout layout_;
  std::vector<double> values_;
};

// Optional per-block multipliers on K(k); all ones reproduces the plain scalar gain.
struct BlockGains {
  double a = 1.0;
  double b = 1.0;
  double m = 1.0;

  double max() const;
};

// theta^T phi.
double predict(std::span<const double> theta, std::span<const double> phi);
inline double predict(const ParameterVector& theta, std::span<const double> phi) {
  return predict(theta.stacked(), phi);
}

// theta + K * phi * e_tilde / (1 + phi^T phi), returned as a new vector.
ParameterVector update(const ParameterVector& theta, std::span<const double> phi, double e_tilde, double gain,
                       const BlockGains& blocks = {});

// In-place form of update(); returns the Euclidean norm of the applied step.
double apply_update(ParameterVector& theta, std::span<const double> phi, double e_tilde, double gain,
                    const BlockGains& blocks = {});

// ||step|| <= max_gain * |e_tilde| / 2 holds for every phi.
inline double step_bound(double gain, double e_tilde, const BlockGains& blocks = {}) {
  return gain * blocks.max() * std::abs(e_tilde) / 2.0;
}

}  // namespace rroff
