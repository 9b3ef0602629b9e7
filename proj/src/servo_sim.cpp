#include "rroff/servo_sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace rroff {

std::string_view to_string(ExcitationKind k) {
  switch (k) {
    case ExcitationKind::zero: return "zero";
    case ExcitationKind::white: return "white";
    case ExcitationKind::multisine: return "multisine";
  }
  return "zero";
}

ExcitationKind parse_excitation_kind(std::string_view text) {
  if (text == "zero") return ExcitationKind::zero;
  if (text == "white") return ExcitationKind::white;
  if (text == "multisine") return ExcitationKind::multisine;
  throw std::invalid_argument("unknown excitation kind '" + std::string(text) + "' (expected zero|white|multisine)");
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out = "invalid configuration:";
  for (const auto& d : diags) out += "\n  " + d.field + ": " + d.message;
  return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Excitation {
 public:
  Excitation(const ExcitationSpec& spec, int samples_per_rev, std::uint64_t seed)
      : spec_(spec), n_(samples_per_rev), rng_(seed) {
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    for (std::size_t t = 0; t < spec.tones.size(); ++t) phases_.push_back(phase(rng_));
  }

  double next(std::int64_t k) {
    switch (spec_.kind) {
      case ExcitationKind::zero: return 0.0;
      case ExcitationKind::white: return spec_.sigma == 0.0 ? 0.0 : spec_.sigma * normal_(rng_);
      case ExcitationKind::multisine: {
        double u = 0.0;
        for (std::size_t t = 0; t < spec_.tones.size(); ++t) {
          // Reduce f*k modulo N before scaling so long runs keep exact periodicity.
          const double cycles = std::fmod(spec_.tones[t] * static_cast<double>(k), static_cast<double>(n_));
          u += std::cos(2.0 * std::numbers::pi * cycles / n_ + phases_[t]);
        }
        return spec_.sigma * u;
      }
    }
    return 0.0;
  }

 private:
  ExcitationSpec spec_;
  int n_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<double> phases_;
};

void check_finite(double v, const char* step, std::int64_t k) {
  if (!std::isfinite(v)) throw NumericError(step, k);
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diags)
    : std::runtime_error(join_diagnostics(diags)), diags_(std::move(diags)) {}

NumericError::NumericError(std::string step, std::int64_t sample)
    : std::runtime_error("non-finite value in " + step + " at sample " + std::to_string(sample)),
      step_(std::move(step)),
      sample_(sample) {}

std::vector<int> target_harmonics(const LoopConfig& cfg) {
  std::vector<int> out;
  for (const auto& s : cfg.stages) {
    auto h = s.harmonics;
    std::sort(h.begin(), h.end());
    out.insert(out.end(), h.begin(), h.end());
  }
  return out;
}

std::vector<Diagnostic> validate(const LoopConfig& cfg) {
  std::vector<Diagnostic> d;
  auto add = [&](std::string field, std::string msg) { d.push_back({std::move(field), std::move(msg)}); };
  const int n = cfg.samples_per_rev;
  if (n <= 0) add("samples_per_rev", "must be positive");
  if (!(cfg.spindle_hz > 0.0)) add("spindle_hz", "must be positive");
  if (cfg.revolutions <= 0) add("revolutions", "must be positive");
  if (!cfg.seed) add("seed", "seed missing");
  if (cfg.report.analysis_revolutions <= 0 || cfg.report.analysis_revolutions > cfg.revolutions)
    add("report.analysis_revolutions", "must lie in [1, revolutions]");
  if (!(cfg.report.floor_margin > 0.0)) add("report.floor_margin", "must be positive");
  if (!(cfg.report.floor_abs >= 0.0)) add("report.floor_abs", "must be >= 0");
  if (cfg.output.trace_decimation <= 0) add("output.trace_decimation", "must be positive");
  if (cfg.output.snapshot_decimation <= 0) add("output.snapshot_decimation", "must be positive");
  if (cfg.stages.empty()) add("stages", "at least one actuator stage is required");

  const auto& est = cfg.estimator;
  try {
    est.gain.validate();
  } catch (const std::exception& ex) {
    add("estimator.gain", ex.what());
  }
  if (!(est.block_gains.a >= 0.0 && est.block_gains.b >= 0.0 && est.block_gains.m >= 0.0))
    add("estimator.block_gains", "must be >= 0");
  if (!est.theta_a_init.empty() && est.theta_a_init.size() != est.na)
    add("estimator.theta_a_init", "length must equal estimator.na");

  std::set<int> seen;
  bool overlap = false;
  for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
    const auto& st = cfg.stages[s];
    const std::string p = "stages[" + std::to_string(s) + "]";
    if (st.plant.b.empty()) add(p + ".plant.b", "numerator order must be >= 1");
    if (st.nb_hat == 0) add(p + ".nb_hat", "must be >= 1");
    if (st.harmonics.empty()) add(p + ".harmonics", "no target harmonics");
    std::set<int> own;
    for (int i : st.harmonics) {
      if (i < 1) add(p + ".harmonics", "harmonic index must be >= 1");
      else if (n > 0 && 2 * i >= n) add(p + ".harmonics", "harmonic above Nyquist");
      if (!own.insert(i).second) add(p + ".harmonics", "duplicate harmonic " + std::to_string(i));
      else if (!seen.insert(i).second) overlap = true;
    }
    const auto& ff = st.feedforward;
    if (!(ff.alpha >= 0.0) || !std::isfinite(ff.alpha)) add(p + ".feedforward.alpha", "must be >= 0");
    if (!(ff.smoothing.beta >= 0.0 && ff.smoothing.beta < 1.0)) add(p + ".feedforward.beta", "must lie in [0, 1)");
    if (!(ff.smoothing.magnitude_floor > 0.0)) add(p + ".feedforward.epsilon", "must be > 0");
    if (st.warmup_revolutions < 0) add(p + ".warmup_revolutions", "must be >= 0");
    if (!st.theta_b_init.empty() && st.theta_b_init.size() != st.nb_hat)
      add(p + ".theta_b_init", "length must equal nb_hat");
    const auto& ex = st.excitation;
    if (!(ex.sigma >= 0.0)) add(p + ".excitation.sigma", "must be >= 0");
    if (ex.kind == ExcitationKind::multisine) {
      if (ex.tones.empty()) add(p + ".excitation.tones", "multisine needs at least one tone");
      for (double f : ex.tones)
        if (!(f > 0.0) || (n > 0 && 2.0 * f >= n)) add(p + ".excitation.tones", "tone above Nyquist or not positive");
    }
    for (double c : st.plant.a_star)
      if (!std::isfinite(c)) add(p + ".plant.a_star", "non-finite coefficient");
    for (double c : st.plant.b)
      if (!std::isfinite(c)) add(p + ".plant.b", "non-finite coefficient");
  }
  if (overlap) add("stages", "harmonic sets overlap");

  for (int i : cfg.rro.harmonics)
    if (i < 1 || (n > 0 && 2 * i >= n)) add("rro.harmonics", "harmonic above Nyquist");
  if (!(cfg.rro.scale >= 0.0)) add("rro.scale", "must be >= 0");
  if (!(cfg.nrro.sigma >= 0.0)) add("nrro.sigma", "must be >= 0");
  if (!(cfg.nrro.lowpass_pole >= 0.0 && cfg.nrro.lowpass_pole < 1.0)) add("nrro.lowpass_pole", "must lie in [0, 1)");
  return d;
}

StreamSeeds derive_seeds(const LoopConfig& cfg) {
  const std::uint64_t master = cfg.seed.value_or(0);
  StreamSeeds s;
  s.rro = splitmix64(master ^ 0x52524f00ULL);
  s.nrro = splitmix64(master ^ 0x4e52524fULL);
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) s.excitation.push_back(splitmix64(master ^ (0x45584300ULL + i)));
  return s;
}

RroProfile resolve_rro_profile(const LoopConfig& cfg) {
  if (!cfg.rro.profile_csv.empty()) return RroProfile::load_csv(cfg.rro.profile_csv, cfg.samples_per_rev);
  auto indices = cfg.rro.harmonics;
  if (indices.empty()) {
    indices = target_harmonics(cfg);
    std::sort(indices.begin(), indices.end());
  }
  return RroProfile::random(cfg.samples_per_rev, indices, cfg.rro.scale, cfg.rro.decay_power, derive_seeds(cfg).rro);
}

SimulationTrace run_episode(const LoopConfig& cfg, const RunOptions& opts) {
  if (auto diags = validate(cfg); !diags.empty()) throw ConfigError(std::move(diags));

  const auto seeds = derive_seeds(cfg);
  const int n = cfg.samples_per_rev;
  const std::int64_t total = cfg.total_samples();
  const std::size_t n_stages = cfg.stages.size();

  RroProfile rro = resolve_rro_profile(cfg);
  if (opts.disable_rro) rro = RroProfile(n, {});
  NrroModel nrro(seeds.nrro, cfg.nrro.sigma, cfg.nrro.lowpass_pole);

  std::vector<RationalSystem> plants;
  std::vector<Excitation> excitations;
  std::vector<FeedforwardState> ff;
  std::vector<TappedDelayLine> ue_lines;
  std::vector<std::size_t> phi_r_offset;
  ParameterLayout layout;
  layout.na = cfg.estimator.na;
  std::size_t nm = 0;
  for (std::size_t s = 0; s < n_stages; ++s) {
    const auto& st = cfg.stages[s];
    plants.emplace_back(DelayPolynomial(st.plant.b), DelayPolynomial(st.plant.a_star));
    excitations.emplace_back(st.excitation, n, seeds.excitation[s]);
    FeedforwardConfig ffc = st.feedforward;
    if (opts.disable_adaptation) ffc.alpha = 0.0;
    ff.emplace_back(HarmonicSet(cfg.spindle_hz, n, st.harmonics), st.nb_hat, ffc);
    ue_lines.emplace_back(st.nb_hat);
    layout.nb.push_back(st.nb_hat);
    phi_r_offset.push_back(nm);
    nm += 2 * st.harmonics.size();
  }
  layout.nm = nm;

  ParameterVector theta(layout);
  {
    auto values = theta.stacked();
    std::copy(cfg.estimator.theta_a_init.begin(), cfg.estimator.theta_a_init.end(), values.begin());
    for (std::size_t s = 0; s < n_stages; ++s) {
      const auto& init = cfg.stages[s].theta_b_init;
      std::copy(init.begin(), init.end(), values.begin() + static_cast<std::ptrdiff_t>(layout.b_offset(s)));
    }
  }
  const bool estimate = cfg.estimator.enabled && !opts.disable_adaptation;
  TappedDelayLine e_line(layout.na);

  SimulationTrace tr;
  tr.samples = total;
  tr.samples_per_rev = n;
  tr.layout = layout;
  tr.rro_profile = rro;
  tr.e.reserve(static_cast<std::size_t>(total));
  tr.e_hat.reserve(static_cast<std::size_t>(total));
  tr.e_tilde.reserve(static_cast<std::size_t>(total));
  tr.r.reserve(static_cast<std::size_t>(total));
  tr.nrro.reserve(static_cast<std::size_t>(total));
  tr.stages.resize(n_stages);
  for (std::size_t s = 0; s < n_stages; ++s) {
    tr.stages[s].name = cfg.stages[s].name;
    const auto idx = ff[s].harmonics().indices();
    tr.stages[s].harmonics.assign(idx.begin(), idx.end());
    tr.stages[s].u_e.reserve(static_cast<std::size_t>(total));
    tr.stages[s].u_a.reserve(static_cast<std::size_t>(total));
  }

  std::vector<double> phi(layout.size(), 0.0);
  const std::size_t m_off = layout.m_offset();
  std::vector<double> u_e(n_stages), u_a(n_stages);

  auto snapshot = [&](std::int64_t k) {
    tr.snapshot_samples.push_back(k);
    tr.theta.emplace_back(theta.stacked().begin(), theta.stacked().end());
    for (std::size_t s = 0; s < n_stages; ++s)
      tr.stages[s].theta_d.emplace_back(ff[s].theta_d().begin(), ff[s].theta_d().end());
  };

  for (std::int64_t k = 0; k < total; ++k) {
    // phi_r(k) for every stage, stored in the theta_M slot of phi.
    for (std::size_t s = 0; s < n_stages; ++s) {
      const auto& h = ff[s].harmonics();
      rro_regressor(h, k, std::span<double>(phi.data() + m_off + phi_r_offset[s], h.dimension()));
    }

    double e = rro.sample(k);
    const double r = e;
    const double w = nrro.sample();
    e += w;
    for (std::size_t s = 0; s < n_stages; ++s) {
      const auto& h = ff[s].harmonics();
      const std::span<const double> phi_r(phi.data() + m_off + phi_r_offset[s], h.dimension());
      u_a[s] = control(ff[s], phi_r);
      u_e[s] = excitations[s].next(k);
      check_finite(u_a[s], "feedforward control", k);
      e += plants[s].step(u_e[s] + u_a[s]);
    }
    check_finite(e, "plant output", k);

    // Past e and u_e taps complete the stacked regressor.
    e_line.copy_to(std::span<double>(phi.data(), layout.na));
    for (std::size_t s = 0; s < n_stages; ++s)
      ue_lines[s].copy_to(std::span<double>(phi.data() + layout.b_offset(s), layout.nb[s]));

    const double e_hat = predict(theta, phi);
    const double e_tilde = e - e_hat;
    check_finite(e_tilde, "estimation error", k);

    if (estimate) {
      const double gain = cfg.estimator.gain(k);
      const double step = apply_update(theta, phi, e_tilde, gain, cfg.estimator.block_gains);
      if (cfg.check_invariants) {
        ++tr.step_bound_checks;
        if (step > step_bound(gain, e_tilde, cfg.estimator.block_gains) * (1.0 + 1e-12) + 1e-300)
          ++tr.step_bound_violations;
      }
    }

    for (std::size_t s = 0; s < n_stages; ++s) {
      const auto& st = cfg.stages[s];
      const auto& h = ff[s].harmonics();
      const std::span<const double> phi_r(phi.data() + m_off + phi_r_offset[s], h.dimension());
      const bool active = st.adapt && !opts.disable_adaptation && k >= st.warmup_revolutions * n;
      if (!active) {
        ff[s].push_regressor(phi_r);
        continue;
      }
      const auto theta_m = theta.theta_m().subspan(phi_r_offset[s], h.dimension());
      if (opts.measure_timing) {
        const auto t0 = std::chrono::steady_clock::now();
        adapt(ff[s], theta.theta_b(s), theta_m, phi_r);
        const auto t1 = std::chrono::steady_clock::now();
        tr.stages[s].adapt_ns_total += std::chrono::duration<double, std::nano>(t1 - t0).count();
      } else {
        adapt(ff[s], theta.theta_b(s), theta_m, phi_r);
      }
      ++tr.stages[s].adapt_calls;
    }

    e_line.push(e);
    for (std::size_t s = 0; s < n_stages; ++s) ue_lines[s].push(u_e[s]);

    tr.e.push_back(e);
    tr.e_hat.push_back(e_hat);
    tr.e_tilde.push_back(e_tilde);
    tr.r.push_back(r);
    tr.nrro.push_back(w);
    for (std::size_t s = 0; s < n_stages; ++s) {
      tr.stages[s].u_e.push_back(u_e[s]);
      tr.stages[s].u_a.push_back(u_a[s]);
    }
    if (k % cfg.output.snapshot_decimation == 0) snapshot(k);
  }
  for (double v : theta.stacked()) check_finite(v, "estimator update", total - 1);
  snapshot(total);
  tr.final_theta = theta;
  for (std::size_t s = 0; s < n_stages; ++s)
    tr.stages[s].frozen_samples.assign(ff[s].frozen_samples().begin(), ff[s].frozen_samples().end());
  return tr;
}

}  // namespace rroff
