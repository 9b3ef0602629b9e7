#include "rroff/feedforward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rroff {

std::string_view to_string(Variant v) { return v == Variant::basic ? "basic" : "improved"; }

Variant parse_variant(std::string_view text) {
  if (text == "basic") return Variant::basic;
  if (text == "improved") return Variant::improved;
  throw std::invalid_argument("unknown variant '" + std::string(text) + "' (expected basic|improved)");
}

SmoothedResponse::SmoothedResponse(std::size_t n_harmonics, SmoothingConfig cfg)
    : cfg_(cfg),
      magnitude_(n_harmonics, 0.0),
      phase_(n_harmonics, 0.0),
      seeded_(n_harmonics, 0),
      frozen_(n_harmonics, 1) {
  if (!(cfg.beta >= 0.0 && cfg.beta < 1.0)) throw std::invalid_argument("smoothing beta must lie in [0, 1)");
  if (!(cfg.magnitude_floor > 0.0)) throw std::invalid_argument("smoothing magnitude floor must be > 0");
}

void SmoothedResponse::update(std::size_t i, const FrequencyPoint& raw) {
  if (raw.magnitude < cfg_.magnitude_floor) {
    frozen_[i] = 1;
    return;
  }
  frozen_[i] = 0;
  if (!seeded_[i]) {
    magnitude_[i] = raw.magnitude;
    phase_[i] = raw.phase;
    seeded_[i] = 1;
    return;
  }
  // Unwrap the raw phase onto the branch nearest the running average.
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double unwrapped = raw.phase + two_pi * std::round((phase_[i] - raw.phase) / two_pi);
  const double b = cfg_.beta;
  magnitude_[i] = b * magnitude_[i] + (1.0 - b) * raw.magnitude;
  phase_[i] = b * phase_[i] + (1.0 - b) * unwrapped;
}

double SmoothedResponse::magnitude(std::size_t i) const { return std::max(magnitude_[i], cfg_.magnitude_floor); }

DbMatrix::DbMatrix(std::vector<Block2> blocks, std::vector<char> frozen)
    : blocks_(std::move(blocks)), frozen_(std::move(frozen)) {
  if (blocks_.size() != frozen_.size()) throw std::invalid_argument("DbMatrix: block/flag count mismatch");
}

bool DbMatrix::invertible() const {
  return std::none_of(frozen_.begin(), frozen_.end(), [](char f) { return f != 0; });
}

DbMatrix DbMatrix::inverse() const {
  std::vector<Block2> inv(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) inv[i] = frozen_[i] ? blocks_[i] : blocks_[i].inverse();
  return DbMatrix(std::move(inv), frozen_);
}

std::vector<double> DbMatrix::apply(std::span<const double> x) const {
  if (x.size() != 2 * blocks_.size()) throw std::invalid_argument("DbMatrix::apply: dimension mismatch");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i].apply(x[2 * i], x[2 * i + 1], y[2 * i], y[2 * i + 1]);
  return y;
}

std::vector<double> DbMatrix::apply_transpose(std::span<const double> x) const {
  if (x.size() != 2 * blocks_.size()) throw std::invalid_argument("DbMatrix::apply_transpose: dimension mismatch");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    blocks_[i].transpose().apply(x[2 * i], x[2 * i + 1], y[2 * i], y[2 * i + 1]);
  return y;
}

DbMatrix build_db(std::span<const double> theta_b, const HarmonicSet& h, SmoothedResponse& smooth) {
  if (smooth.size() != h.size()) throw std::invalid_argument("build_db: smoother size mismatch");
  const auto& table = h.table();
  const auto idx = h.indices();
  std::vector<Block2> blocks(h.size());
  std::vector<char> frozen(h.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    // B-hat(e^{-jw}) = sum_j b_j (cos(wj) - j sin(wj))
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < theta_b.size(); ++j) {
      const auto m = table.slot(idx[i], static_cast<std::int64_t>(j + 1));
      re += theta_b[j] * table.cos_slot(m);
      im -= theta_b[j] * table.sin_slot(m);
    }
    FrequencyPoint raw{h.omega(i), std::hypot(re, im), std::atan2(im, re)};
    smooth.update(i, raw);
    frozen[i] = smooth.frozen(i) ? 1 : 0;
    blocks[i] = Block2::from_polar(smooth.magnitude(i), smooth.phase(i));
  }
  return DbMatrix(std::move(blocks), std::move(frozen));
}

FeedforwardState::FeedforwardState(HarmonicSet harmonics, std::size_t nb_hat, FeedforwardConfig cfg,
                                   std::vector<double> theta_d_init)
    : harmonics_(std::move(harmonics)),
      cfg_(cfg),
      theta_d_(std::move(theta_d_init)),
      smoother_(harmonics_.size(), cfg.smoothing),
      history_(nb_hat, std::vector<double>(harmonics_.dimension(), 0.0)),
      frozen_samples_(harmonics_.size(), 0) {
  if (theta_d_.empty()) theta_d_.assign(harmonics_.dimension(), 0.0);
  if (theta_d_.size() != harmonics_.dimension())
    throw std::invalid_argument("FeedforwardState: theta_D size must be 2 * n_r");
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha))
    throw std::invalid_argument("FeedforwardState: alpha must be >= 0");
}

std::span<const double> FeedforwardState::past_regressor(std::size_t j) const {
  std::size_t idx = head_ + j - 1;
  if (idx >= history_.size()) idx -= history_.size();
  return history_[idx];
}

void FeedforwardState::push_regressor(std::span<const double> phi_r) {
  if (history_.empty()) return;
  head_ = head_ == 0 ? history_.size() - 1 : head_ - 1;
  std::copy(phi_r.begin(), phi_r.end(), history_[head_].begin());
}

double control(const FeedforwardState& state, std::span<const double> phi_r) {
  const auto theta = state.theta_d();
  if (theta.size() != phi_r.size()) throw std::invalid_argument("control: dimension mismatch");
  double u = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) u += theta[i] * phi_r[i];
  return u;
}

void update_basic(FeedforwardState& state, const DbMatrix& db_inverse, std::span<const double> theta_m) {
  auto theta = state.theta_d();
  if (theta_m.size() != theta.size() || db_inverse.size() * 2 != theta.size())
    throw std::invalid_argument("update_basic: dimension mismatch");
  const double alpha = state.alpha();
  for (std::size_t i = 0; i < db_inverse.size(); ++i) {
    if (db_inverse.frozen(i)) {
      ++state.frozen_samples_[i];
      continue;
    }
    double d0 = 0.0;
    double d1 = 0.0;
    db_inverse.block(i).apply(theta_m[2 * i], theta_m[2 * i + 1], d0, d1);
    theta[2 * i] -= alpha * d0;
    theta[2 * i + 1] -= alpha * d1;
  }
}

void filter_regressor(FeedforwardState& state, std::span<const double> theta_b, std::span<const double> phi_r,
                      std::span<double> out) {
  if (theta_b.size() != state.nb_hat()) throw std::invalid_argument("filter_regressor: theta_B order mismatch");
  if (phi_r.size() != out.size() || phi_r.size() != state.harmonics().dimension())
    throw std::invalid_argument("filter_regressor: dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 1; j <= theta_b.size(); ++j) {
    const double b = theta_b[j - 1];
    if (b == 0.0) continue;
    const auto past = state.past_regressor(j);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += b * past[c];
  }
  state.push_regressor(phi_r);
}

std::vector<double> filter_regressor(FeedforwardState& state, std::span<const double> theta_b,
                                     std::span<const double> phi_r) {
  std::vector<double> out(phi_r.size());
  filter_regressor(state, theta_b, phi_r, out);
  return out;
}

void update_improved(FeedforwardState& state, std::span<const double> filtered_phi, double residual) {
  auto theta = state.theta_d();
  if (filtered_phi.size() != theta.size()) throw std::invalid_argument("update_improved: dimension mismatch");
  const double scale = state.alpha() * residual;
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= scale * filtered_phi[i];
}

void adapt(FeedforwardState& state, std::span<const double> theta_b, std::span<const double> theta_m,
           std::span<const double> phi_r) {
  if (state.variant() == Variant::basic) {
    const auto db = build_db(theta_b, state.harmonics(), state.smoother());
    update_basic(state, db.inverse(), theta_m);
    return;
  }
  thread_local std::vector<double> filtered;
  filtered.resize(phi_r.size());
  filter_regressor(state, theta_b, phi_r, filtered);
  double residual = 0.0;
  for (std::size_t i = 0; i < theta_m.size(); ++i) residual += theta_m[i] * phi_r[i];
  update_improved(state, filtered, residual);
}

}  // namespace rroff
