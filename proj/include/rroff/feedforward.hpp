#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rroff/lti.hpp"
#include "rroff/regressors.hpp"

namespace rroff {

enum class Variant {
  basic,     // inverts the per-harmonic plant response blocks
  improved,  // filters the regressor through B-hat instead; no inversion
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

struct SmoothingConfig {
  double beta = 0.95;             // EMA factor in [0, 1); 0 disables smoothing
  double magnitude_floor = 1e-4;  // epsilon: harmonics with |B-hat| below this are frozen
};

// Exponentially averaged magnitude/phase of B-hat at each target harmonic.
class SmoothedResponse {
 public:
  SmoothedResponse() = default;
  SmoothedResponse(std::size_t n_harmonics, SmoothingConfig cfg);

  // Feeds one raw evaluation. Raw magnitudes below the floor freeze the
  // harmonic and leave the averages untouched.
  void update(std::size_t i, const FrequencyPoint& raw);

  std::size_t size() const { return magnitude_.size(); }
  const SmoothingConfig& config() const { return cfg_; }
  bool frozen(std::size_t i) const { return frozen_[i] != 0; }
  // Never below the floor.
  double magnitude(std::size_t i) const;
  double phase(std::size_t i) const { return phase_[i]; }

 private:
  SmoothingConfig cfg_;
  std::vector<double> magnitude_;
  std::vector<double> phase_;
  std::vector<char> seeded_;
  std::vector<char> frozen_;
};

// Block-diagonal D_B-hat: one m*[[cos p, sin p], [-sin p, cos p]] block per harmonic.
class DbMatrix {
 public:
  DbMatrix() = default;
  DbMatrix(std::vector<Block2> blocks, std::vector<char> frozen);

  std::size_t size() const { return blocks_.size(); }
  const Block2& block(std::size_t i) const { return blocks_[i]; }
  bool frozen(std::size_t i) const { return frozen_[i] != 0; }
  bool invertible() const;

  // Blockwise inverse; frozen blocks are carried over unchanged and stay flagged.
  DbMatrix inverse() const;
  // y = D x and y = D^T x over the interleaved (cos, sin) layout.
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_transpose(std::span<const double> x) const;

 private:
  std::vector<Block2> blocks_;
  std::vector<char> frozen_;
};

// Evaluates B-hat at each harmonic, runs the smoother and emits D_B-hat.
DbMatrix build_db(std::span<const double> theta_b, const HarmonicSet& h, SmoothedResponse& smooth);

struct FeedforwardConfig {
  Variant variant = Variant::improved;
  double alpha = 0.01;
  SmoothingConfig smoothing;
};

// theta_D plus the variant-specific memory for one actuator.
class FeedforwardState {
 public:
  FeedforwardState(HarmonicSet harmonics, std::size_t nb_hat, FeedforwardConfig cfg,
                   std::vector<double> theta_d_init = {});

  const HarmonicSet& harmonics() const { return harmonics_; }
  const FeedforwardConfig& config() const { return cfg_; }
  Variant variant() const { return cfg_.variant; }
  double alpha() const { return cfg_.alpha; }
  std::size_t nb_hat() const { return history_.size(); }

  std::span<const double> theta_d() const { return theta_d_; }
  std::span<double> theta_d() { return theta_d_; }

  SmoothedResponse& smoother() { return smoother_; }
  const SmoothedResponse& smoother() const { return smoother_; }

  // Samples each harmonic spent frozen in the basic update.
  std::span<const std::int64_t> frozen_samples() const { return frozen_samples_; }

  // Past phi_r vectors, j = 1..nb_hat, zero before start.
  std::span<const double> past_regressor(std::size_t j) const;
  void push_regressor(std::span<const double> phi_r);

 private:
  friend void update_basic(FeedforwardState&, const DbMatrix&, std::span<const double>);

  HarmonicSet harmonics_;
  FeedforwardConfig cfg_;
  std::vector<double> theta_d_;
  SmoothedResponse smoother_;
  std::vector<std::vector<double>> history_;
  std::size_t head_ = 0;
  std::vector<std::int64_t> frozen_samples_;
};

// u_a = theta_D^T phi_r.
double control(const FeedforwardState& state, std::span<const double> phi_r);

// theta_D -= alpha * D^-1 theta_M on unfrozen harmonic pairs.
void update_basic(FeedforwardState& state, const DbMatrix& db_inverse, std::span<const double> theta_m);

// B-hat(q^-1) phi_r(k) = sum_j b_j phi_r(k - j) with the current coefficients,
// then stores phi_r(k) for later samples.
void filter_regressor(FeedforwardState& state, std::span<const double> theta_b, std::span<const double> phi_r,
                      std::span<double> out);
std::vector<double> filter_regressor(FeedforwardState& state, std::span<const double> theta_b,
                                     std::span<const double> phi_r);

// theta_D -= alpha * filtered_phi * residual.
void update_improved(FeedforwardState& state, std::span<const double> filtered_phi, double residual);

// One adaptation step for the configured variant, given the current plant and
// residual estimates restricted to this actuator's harmonics.
void adapt(FeedforwardState& state, std::span<const double> theta_b, std::span<const double> theta_m,
           std::span<const double> phi_r);

}  // namespace rroff
