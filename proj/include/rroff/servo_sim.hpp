#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rroff/disturbance.hpp"
#include "rroff/estimator.hpp"
#include "rroff/feedforward.hpp"
#include "rroff/lti.hpp"
#include "rroff/regressors.hpp"

namespace rroff {

struct PlantSpec {
  std::vector<double> a_star;  // a_1..a_na of A* (A = 1 - A*)
  std::vector<double> b;       // b_1..b_nb of B
};

enum class ExcitationKind { zero, white, multisine };

std::string_view to_string(ExcitationKind k);
ExcitationKind parse_excitation_kind(std::string_view text);

// Exogenous input u_e. White: N(0, sigma^2). Multisine: sum of unit-phase-randomized
// cosines of amplitude `sigma` at `tones` (cycles per revolution; half-integer
// tones are orthogonal to every harmonic bin over an even number of revolutions).
struct ExcitationSpec {
  ExcitationKind kind = ExcitationKind::white;
  double sigma = 0.0;
  std::vector<double> tones;
};

struct StageConfig {
  std::string name;
  PlantSpec plant;
  std::vector<int> harmonics;
  std::size_t nb_hat = 2;
  ExcitationSpec excitation;
  FeedforwardConfig feedforward;
  bool adapt = true;
  std::int64_t warmup_revolutions = 0;  // theta_D frozen before this revolution
  std::vector<double> theta_b_init;     // empty = zeros
};

struct EstimatorConfig {
  bool enabled = true;
  std::size_t na = 2;
  GainSchedule gain;
  BlockGains block_gains;
  std::vector<double> theta_a_init;  // empty = zeros
};

struct RroConfig {
  double scale = 1.0;
  double decay_power = 1.0;
  std::vector<int> harmonics;  // empty = union of the stage harmonics
  std::string profile_csv;     // overrides the random draw when set
};

struct NrroConfig {
  double sigma = 0.0;
  double lowpass_pole = 0.0;
};

struct ReportConfig {
  std::int64_t analysis_revolutions = 10;  // terminal window
  double floor_margin = 2.0;
  double floor_abs = 1e-9;  // absolute allowance added to margin * floor
};

struct OutputConfig {
  std::int64_t trace_decimation = 1;
  std::int64_t snapshot_decimation = 420;
};

struct LoopConfig {
  std::string name = "custom";
  double spindle_hz = 120.0;
  int samples_per_rev = 420;
  std::int64_t revolutions = 100;
  std::optional<std::uint64_t> seed;
  std::vector<StageConfig> stages;
  EstimatorConfig estimator;
  RroConfig rro;
  NrroConfig nrro;
  ReportConfig report;
  OutputConfig output;
  bool check_invariants = false;

  std::int64_t total_samples() const { return revolutions * samples_per_rev; }
};

struct Diagnostic {
  std::string field;
  std::string message;
};

std::vector<Diagnostic> validate(const LoopConfig& cfg);

// Independent seeds for each random stream, derived from the master seed.
struct StreamSeeds {
  std::uint64_t rro = 0;
  std::uint64_t nrro = 0;
  std::vector<std::uint64_t> excitation;
};
StreamSeeds derive_seeds(const LoopConfig& cfg);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

class NumericError : public std::runtime_error {
 public:
  NumericError(std::string step, std::int64_t sample);
  const std::string& step() const { return step_; }
  std::int64_t sample() const { return sample_; }

 private:
  std::string step_;
  std::int64_t sample_;
};

struct StageTrace {
  std::string name;
  std::vector<double> u_e;
  std::vector<double> u_a;
  std::vector<std::vector<double>> theta_d;  // snapshots
  std::vector<std::int64_t> frozen_samples;  // per harmonic, basic variant only
  std::vector<int> harmonics;
  double adapt_ns_total = 0.0;  // wall time inside the theta_D update path
  std::int64_t adapt_calls = 0;
};

struct SimulationTrace {
  std::int64_t samples = 0;
  int samples_per_rev = 0;
  std::vector<double> e, e_hat, e_tilde, r, nrro;
  std::vector<StageTrace> stages;
  std::vector<std::int64_t> snapshot_samples;
  std::vector<std::vector<double>> theta;  // stacked estimate snapshots
  ParameterLayout layout;
  ParameterVector final_theta;
  std::int64_t step_bound_violations = 0;  // counted only when check_invariants
  std::int64_t step_bound_checks = 0;
  RroProfile rro_profile;
};

struct RunOptions {
  bool measure_timing = false;
  bool disable_adaptation = false;  // K = 0, alpha = 0
  bool disable_rro = false;
};

// Runs the add-on feedforward loop sample by sample:
// u_a from theta_D, e = sum_s R_s(u_e,s + u_a,s) + r + nrro, estimator update,
// then the theta_D update that produces u_a for the next sample.
SimulationTrace run_episode(const LoopConfig& cfg, const RunOptions& opts = {});

// Profile used by the episode (random draw or CSV), before any disable_rro override.
RroProfile resolve_rro_profile(const LoopConfig& cfg);

// Union of stage harmonics in stage order; defines the phi_r layout of theta_M.
std::vector<int> target_harmonics(const LoopConfig& cfg);

}  // namespace rroff
