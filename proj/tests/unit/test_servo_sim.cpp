#include <cmath>
#include <string>

#include "doctest.h"
#include "rroff/analysis.hpp"
#include "rroff/config.hpp"
#include "rroff/experiment.hpp"
#include "rroff/servo_sim.hpp"
#include "support.hpp"

using namespace rroff;

namespace {

LoopConfig base(std::vector<int> harmonics) {
  LoopConfig c;
  c.seed = 3;
  c.revolutions = 4;
  c.report.analysis_revolutions = 2;
  c.estimator.na = 2;
  c.estimator.gain = {0.2, 0.0, 0.0};
  c.check_invariants = true;
  StageConfig s;
  s.name = "vcm";
  s.plant = {{1.4856, -0.81}, {0.5, 0.3}};
  s.harmonics = std::move(harmonics);
  s.excitation = {ExcitationKind::white, 0.3, {}};
  s.feedforward.alpha = 0.001;
  c.stages.push_back(s);
  return c;
}

std::vector<double> impulse_response(const PlantSpec& p, std::size_t len) {
  std::vector<double> h(len, 0.0);
  for (std::size_t k = 0; k < len; ++k) {
    double v = (k >= 1 && k <= p.b.size()) ? p.b[k - 1] : 0.0;
    for (std::size_t i = 1; i <= p.a_star.size() && i <= k; ++i) v += p.a_star[i - 1] * h[k - i];
    h[k] = v;
  }
  return h;
}

bool has_field(const std::vector<Diagnostic>& d, const std::string& field, const std::string& text = "") {
  for (const auto& x : d)
    if (x.field == field && x.message.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("zero disturbances and zero excitation keep every signal at zero") {
  auto c = base({1, 2});
  c.rro.scale = 0.0;
  c.stages[0].excitation = {ExcitationKind::zero, 0.0, {}};
  const auto tr = run_episode(c);
  CHECK(testutil::max_abs(tr.e) == 0.0);
  CHECK(testutil::max_abs(tr.stages[0].u_a) == 0.0);
  CHECK(testutil::max_abs(tr.final_theta.stacked()) == 0.0);
}

TEST_CASE("with adaptation disabled the loop is the open-loop composition") {
  auto c = base({1, 3, 7});
  c.nrro.sigma = 0.05;
  const auto tr = run_episode(c, RunOptions{false, true, false});
  const auto h = impulse_response(c.stages[0].plant, static_cast<std::size_t>(tr.samples));
  const auto& u = tr.stages[0].u_e;
  double worst = 0.0;
  for (std::size_t k = 0; k < tr.e.size(); ++k) {
    double y = 0.0;
    for (std::size_t j = 0; j <= k; ++j) y += h[j] * u[k - j];
    const double ref = y + tr.rro_profile.sample(static_cast<std::int64_t>(k)) + tr.nrro[k];
    worst = std::max(worst, std::abs(tr.e[k] - ref));
  }
  CHECK(worst < 1e-12);
  CHECK(testutil::max_abs(tr.stages[0].u_a) == 0.0);
  for (std::size_t k = 0; k < tr.r.size(); ++k) REQUIRE(tr.r[k] == tr.rro_profile.sample(static_cast<std::int64_t>(k)));
}

TEST_CASE("single harmonic, unit-delay plant: the RRO line is cancelled") {
  LoopConfig c;
  c.seed = 5;
  c.revolutions = 50;
  c.report.analysis_revolutions = 2;  // half-integer tones are orthogonal to the bins over even windows
  c.estimator.na = 0;
  c.estimator.gain = {0.5, 0.0, 0.0};
  c.check_invariants = true;
  StageConfig s;
  s.name = "vcm";
  s.plant = {{}, {1.0}};
  s.nb_hat = 1;
  s.harmonics = {1};
  s.excitation = {ExcitationKind::multisine, 0.3, {2.5, 7.5}};
  s.feedforward.alpha = 0.005;
  c.stages.push_back(s);
  const auto res = run_experiment(c);
  CHECK(res.before.amplitude[0] > 0.1);
  CHECK(res.after.amplitude[0] < 1e-6 * res.before.amplitude[0]);
  CHECK(res.trace.step_bound_violations == 0);
}

TEST_CASE("validation diagnostics name the field") {
  auto c = base({1});
  c.seed.reset();
  c.stages[0].feedforward.alpha = -1.0;
  c.stages[0].harmonics = {1, 300};
  auto d = validate(c);
  CHECK(has_field(d, "seed", "seed missing"));
  CHECK(has_field(d, "stages[0].feedforward.alpha"));
  CHECK(has_field(d, "stages[0].harmonics", "harmonic above Nyquist"));
  CHECK_THROWS_AS(run_episode(c), ConfigError);

  auto two = base({1, 2});
  two.stages.push_back(two.stages[0]);
  two.stages[1].name = "ma";
  two.stages[1].harmonics = {2, 3};
  CHECK(has_field(validate(two), "stages", "harmonic sets overlap"));

  auto smooth = base({1});
  smooth.stages[0].feedforward.smoothing.beta = 1.0;
  smooth.stages[0].feedforward.smoothing.magnitude_floor = 0.0;
  d = validate(smooth);
  CHECK(has_field(d, "stages[0].feedforward.beta"));
  CHECK(has_field(d, "stages[0].feedforward.epsilon"));
  CHECK(validate(base({1, 2})).empty());
}

TEST_CASE("episodes are deterministic in the seed") {
  auto c = base({1, 2, 5});
  c.nrro.sigma = 0.05;
  const auto a = run_episode(c), b = run_episode(c);
  CHECK(a.e == b.e);
  CHECK(a.stages[0].u_a == b.stages[0].u_a);
  CHECK(a.theta == b.theta);
  c.seed = 4;
  CHECK_FALSE(run_episode(c).e == a.e);
}

TEST_CASE("causality: a shorter run is a bit-exact prefix, and u_a(k+1) uses theta_D after sample k") {
  auto c = base({1, 4});
  c.nrro.sigma = 0.05;
  c.output.snapshot_decimation = 1;
  const auto longer = run_episode(c);
  c.revolutions = 2;
  c.report.analysis_revolutions = 1;
  const auto shorter = run_episode(c);
  CHECK(std::equal(shorter.e.begin(), shorter.e.end(), longer.e.begin()));
  CHECK(std::equal(shorter.stages[0].u_a.begin(), shorter.stages[0].u_a.end(), longer.stages[0].u_a.begin()));

  HarmonicSet h(c.spindle_hz, c.samples_per_rev, c.stages[0].harmonics);
  const auto& snaps = longer.stages[0].theta_d;
  for (std::int64_t k = 0; k + 1 < longer.samples; k += 37) {
    const auto phi = rro_regressor(h, k + 1);
    double u = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) u += snaps[static_cast<std::size_t>(k)][i] * phi[i];
    CHECK(longer.stages[0].u_a[static_cast<std::size_t>(k + 1)] == doctest::Approx(u).epsilon(1e-14));
  }
  CHECK(testutil::max_abs(snaps.back()) > 0.0);
  CHECK(longer.stages[0].u_a[0] == 0.0);
}

TEST_CASE("prediction error is e - e_hat and the step bound holds") {
  auto c = base({1, 2, 3});
  c.nrro.sigma = 0.05;
  const auto tr = run_episode(c);
  for (std::size_t k = 0; k < tr.e.size(); ++k) REQUIRE(tr.e_tilde[k] == tr.e[k] - tr.e_hat[k]);
  CHECK(tr.step_bound_checks == tr.samples);
  CHECK(tr.step_bound_violations == 0);
}

TEST_CASE("unstable plant surfaces a NumericError") {
  auto c = base({1});
  c.revolutions = 20;
  c.stages[0].plant = {{1.5}, {1.0}};
  CHECK_THROWS_AS(run_episode(c), NumericError);
}

TEST_CASE("dual stage: a non-adapting second stage leaves its bins untouched") {
  auto c = preset("dual_stage_173_clean");
  c.stages[1].adapt = false;
  const auto adaptive = run_episode(c);
  const auto baseline = run_episode(c, RunOptions{false, true, false});
  const auto ma = c.stages[1].harmonics;
  const auto after = terminal_spectrum(c, adaptive, ma);
  const auto before = terminal_spectrum(c, baseline, ma);
  double worst = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i)
    worst = std::max(worst, std::abs(after.amplitude[i] - before.amplitude[i]));
  CHECK(worst < 1e-9);
  CHECK(testutil::max_abs(adaptive.stages[1].u_a) == 0.0);
  CHECK(adaptive.stages[1].adapt_calls == 0);
  CHECK(adaptive.stages[0].adapt_calls == adaptive.samples);
}
