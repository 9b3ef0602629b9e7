#include "rroff/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rroff {

double GainSchedule::operator()(std::int64_t k) const {
  return std::max(floor, k0 / (1.0 + decay * static_cast<double>(k)));
}

void GainSchedule::validate() const {
  if (!(k0 >= 0.0) || !std::isfinite(k0)) throw std::invalid_argument("gain.k0 must be >= 0");
  if (!(decay >= 0.0) || !std::isfinite(decay)) throw std::invalid_argument("gain.decay must be >= 0");
  if (!(floor >= 0.0) || floor > k0) throw std::invalid_argument("gain.floor must lie in [0, k0]");
}

std::size_t ParameterLayout::size() const {
  return na + std::accumulate(nb.begin(), nb.end(), std::size_t{0}) + nm;
}

std::size_t ParameterLayout::b_offset(std::size_t stage) const {
  std::size_t off = na;
  for (std::size_t s = 0; s < stage; ++s) off += nb.at(s);
  return off;
}

ParameterVector::ParameterVector(ParameterLayout layout)
    : layout_(std::move(layout)), values_(layout_.size(), 0.0) {}

ParameterVector::ParameterVector(ParameterLayout layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_.size()) throw std::invalid_argument("ParameterVector: size does not match layout");
}

double BlockGains::max() const { return std::max({a, b, m}); }

double predict(std::span<const double> theta, std::span<const double> phi) {
  if (theta.size() != phi.size()) throw std::invalid_argument("predict: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) acc += theta[i] * phi[i];
  return acc;
}

double apply_update(ParameterVector& theta, std::span<const double> phi, double e_tilde, double gain,
                    const BlockGains& blocks) {
  auto values = theta.stacked();
  if (values.size() != phi.size()) throw std::invalid_argument("update: dimension mismatch");
  if (!std::isfinite(e_tilde)) throw std::invalid_argument("update: non-finite estimation error");
  double phi_sq = 0.0;
  for (double p : phi) phi_sq += p * p;
  const double scale = gain * e_tilde / (1.0 + phi_sq);
  const auto& layout = theta.layout();
  const std::size_t b_begin = layout.na;
  const std::size_t m_begin = layout.m_offset();
  double step_sq = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double g = i < b_begin ? blocks.a : (i < m_begin ? blocks.b : blocks.m);
    const double step = g * scale * phi[i];
    values[i] += step;
    step_sq += step * step;
  }
  return std::sqrt(step_sq);
}

ParameterVector update(const ParameterVector& theta, std::span<const double> phi, double e_tilde, double gain,
                       const BlockGains& blocks) {
  ParameterVector next = theta;
  apply_update(next, phi, e_tilde, gain, blocks);
  return next;
}

}  // namespace rroff
