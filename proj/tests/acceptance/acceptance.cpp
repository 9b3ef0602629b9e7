// One line per acceptance criterion; nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "rroff/cli.hpp"
#include "rroff/config.hpp"
#include "rroff/experiment.hpp"
#include "rroff/feedforward.hpp"
#include "rroff/regressors.hpp"

using namespace rroff;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> true_ab(const LoopConfig& c) {
  std::vector<double> v = c.stages[0].plant.a_star;
  v.resize(c.estimator.na, 0.0);
  for (const auto& s : c.stages) {
    auto b = s.plant.b;
    b.resize(s.nb_hat, 0.0);
    v.insert(v.end(), b.begin(), b.end());
  }
  return v;
}

// Cached runs shared between criteria.
struct Runs {
  std::optional<ExperimentResult> improved10, basic10, nrro10;
  double improved10_s = 0.0;
};
Runs runs;

const ExperimentResult& improved10() {
  if (!runs.improved10) {
    const auto t0 = Clock::now();
    runs.improved10 = run_experiment(preset("single_stage_10"));
    runs.improved10_s = seconds_since(t0);
  }
  return *runs.improved10;
}

const ExperimentResult& basic10() {
  if (!runs.basic10) {
    auto c = preset("single_stage_10");
    c.stages[0].feedforward.variant = Variant::basic;
    runs.basic10 = run_experiment(c);
  }
  return *runs.basic10;
}

Outcome c1_identification() {
  const auto c = preset("estimator_id");
  const auto t0 = Clock::now();
  const auto tr = run_episode(c);
  const double secs = seconds_since(t0);
  const auto truth = true_ab(c);
  const std::size_t n_ab = truth.size();
  std::int64_t first_rev = -1;
  for (std::size_t i = 0; i < tr.snapshot_samples.size(); ++i) {
    const auto& th = tr.theta[i];
    if (max_abs_diff(std::span<const double>(th).first(n_ab), truth) < 1e-3) {
      first_rev = (tr.snapshot_samples[i] + c.samples_per_rev - 1) / c.samples_per_rev;
      break;
    }
  }
  const double final_err = max_abs_diff(tr.final_theta.stacked().first(n_ab), truth);
  const bool pass = final_err < 1e-3 && first_rev >= 0 && first_rev <= 100 && secs < 5.0;
  return {pass, fmt("A,B within 1e-3 after %lld rev (final err %.2e), %.2f s", static_cast<long long>(first_rev),
                    final_err, secs)};
}

Outcome c2_residual_estimate() {
  auto c = preset("single_stage_10");
  c.stages[0].adapt = false;
  c.nrro.sigma = 0.0;
  const auto tr = run_episode(c);
  const auto ref = theta_rbar(tr.rro_profile, DelayPolynomial(c.stages[0].plant.a_star));
  const double err = max_abs_diff(tr.final_theta.theta_m(), ref);
  return {err < 5e-3, fmt("max |theta_M - theta_rbar| = %.2e with u_a = 0", err)};
}

Outcome c3_attenuation() {
  const auto& r = improved10();
  const bool pass = r.report.worst_db <= -60.0 && runs.improved10_s < 10.0 && r.trace.samples <= 200 * 420;
  return {pass, fmt("improved: worst %.1f dB over %zu bins in %lld rev, %.2f s", r.report.worst_db,
                    r.report.rows.size(), static_cast<long long>(r.trace.samples / 420), runs.improved10_s)};
}

Outcome c4_floor() {
  const auto r = run_experiment(preset("single_stage_10_nrro"));
  return {r.report.all_at_floor() && r.trace.step_bound_violations == 0,
          fmt("%zu/%zu bins at the non-repeatable floor, max residual %.3e", r.report.count_at_floor,
              r.report.rows.size(), r.report.max_residual)};
}

Outcome c5_variants_agree() {
  const auto& b = basic10();
  const auto& i = improved10();
  const double diff = max_abs_diff(b.trace.stages[0].theta_d.back(), i.trace.stages[0].theta_d.back());
  const bool pass = diff <= 1e-2 && b.report.worst_db <= -60.0 && i.report.worst_db <= -60.0;
  return {pass, fmt("terminal theta_D max diff %.2e; worst dB basic %.1f, improved %.1f", diff, b.report.worst_db,
                    i.report.worst_db)};
}

Outcome c6_filter_identity() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HarmonicSet h(120.0, 420, parse_index_ranges("1-10"));
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    std::vector<double> b(1 + t % 4);
    for (auto& x : b) x = u(rng);
    FeedforwardConfig fc;
    FeedforwardState st(h, b.size(), fc);
    for (std::int64_t k = 0; k < 1000; ++k) {
      const auto phi = rro_regressor(h, k);
      const auto f = filter_regressor(st, b, phi);
      if (k < static_cast<std::int64_t>(b.size())) continue;
      for (std::size_t i = 0; i < h.size(); ++i) {
        std::complex<long double> g = 0.0L;
        const long double w = 2.0L * std::numbers::pi_v<long double> * h.indices()[i] / 420.0L;
        for (std::size_t j = 0; j < b.size(); ++j) g += std::polar<long double>(b[j], -w * (j + 1));
        const auto z = g * std::polar<long double>(1.0L, w * static_cast<long double>(k % 420));
        worst = std::max({worst, std::abs(f[2 * i] - static_cast<double>(z.real())),
                          std::abs(f[2 * i + 1] - static_cast<double>(z.imag()))});
      }
    }
  }
  return {worst < 1e-9, fmt("max |B(q^-1) phi_r - D^T phi_r| = %.2e over 10 FIRs x 10 harmonics", worst)};
}

Outcome c7_invariants() {
  std::int64_t checks = 0, violations = 0;
  for (const auto* r : {&improved10(), &basic10()}) {
    checks += r->trace.step_bound_checks;
    violations += r->trace.step_bound_violations;
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HarmonicSet h(120.0, 420, parse_index_ranges("1-173"));
  double inv_err = 0.0;
  for (int t = 0; t < 10; ++t) {
    std::vector<double> b(4);
    for (auto& x : b) x = u(rng);
    SmoothedResponse sm(h.size(), {0.0, 1e-4});
    const auto db = build_db(b, h, sm);
    const auto inv = db.inverse();
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (db.frozen(i)) continue;
      const auto p = db.block(i) * inv.block(i);
      inv_err = std::max({inv_err, std::abs(p.a - 1.0), std::abs(p.b), std::abs(p.c), std::abs(p.d - 1.0)});
    }
  }
  const std::size_t d = h.dimension();
  std::vector<double> acc(d * d, 0.0), phi(d);
  for (std::int64_t k = 0; k < 420; ++k) {
    rro_regressor(h, k, phi);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) acc[r * d + c] += phi[r] * phi[c];
  }
  double outer_err = 0.0;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) outer_err = std::max(outer_err, std::abs(acc[r * d + c] / 420 - (r == c ? 0.5 : 0.0)));
  const bool pass = checks > 0 && violations == 0 && inv_err < 1e-12 && outer_err < 1e-9;
  return {pass, fmt("step bound %lld/%lld violations; block*inverse err %.1e; outer product err %.1e",
                    static_cast<long long>(violations), static_cast<long long>(checks), inv_err, outer_err)};
}

double cross_leakage(const LoopConfig& c, const SimulationTrace& tr) {
  double worst = 0.0;
  for (std::size_t s = 0; s < tr.stages.size(); ++s)
    for (std::size_t o = 0; o < tr.stages.size(); ++o) {
      if (o == s) continue;
      const auto win = terminal_window(tr.stages[s].u_a, c.samples_per_rev, c.report.analysis_revolutions);
      const auto spec = harmonic_spectrum(win, c.samples_per_rev, tr.stages[o].harmonics);
      for (double a : spec.amplitude) worst = std::max(worst, a);
    }
  return worst;
}

Outcome c8_dual_stage() {
  const auto clean_cfg = preset("dual_stage_173_clean");
  const auto clean = run_episode(clean_cfg);
  const double leak = cross_leakage(clean_cfg, clean);
  const auto t0 = Clock::now();
  const auto r = run_experiment(preset("dual_stage_173"));
  const double secs = seconds_since(t0);
  const bool pass = leak < 1e-9 && r.report.rows.size() == 173 && r.report.all_at_floor() &&
                    r.trace.step_bound_violations == 0 && secs < 60.0;
  return {pass, fmt("cross-band leakage %.2e; %zu/%zu bins at floor with NRRO, %.2f s", leak, r.report.count_at_floor,
                    r.report.rows.size(), secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c9_reproducible() {
  const fs::path root = fs::temp_directory_path() / ("rroff_acceptance_" + std::to_string(std::random_device{}()));
  std::size_t compared = 0, differing = 0;
  for (const char* name : {"single_harmonic_demo", "basic_transient_demo"}) {
    const auto cfg = preset(name);
    const auto a = cli::write_run(root / name / "a", cfg, run_experiment(cfg), "simulate");
    const auto b = cli::write_run(root / name / "b", cfg, run_experiment(cfg), "simulate");
    for (std::size_t i = 0; i < a.size(); ++i) {
      ++compared;
      if (i >= b.size() || a[i].name != b[i].name || a[i].sha256 != b[i].sha256 ||
          slurp(root / name / "a" / a[i].name) != slurp(root / name / "b" / b[i].name))
        ++differing;
    }
    if (slurp(root / name / "a" / "manifest.json") != slurp(root / name / "b" / "manifest.json")) ++differing;
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  return {compared > 0 && differing == 0, fmt("%zu CSV files compared, %zu differ", compared, differing)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 plant identification", c1_identification},
      {"2 residual estimate with u_a = 0", c2_residual_estimate},
      {"3 improved variant attenuation", c3_attenuation},
      {"4 residual at non-repeatable floor", c4_floor},
      {"5 basic and improved agree", c5_variants_agree},
      {"6 filtered regressor identity", c6_filter_identity},
      {"7 numerical invariants", c7_invariants},
      {"8 dual-stage separation", c8_dual_stage},
      {"9 reproducible artifacts", c9_reproducible},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  criterion %-38s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
