#include <stdexcept>

#include "rroff/config.hpp"

namespace rroff {

namespace {

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

// Lightly damped second-order path with a one-sample delay.
PlantSpec resonant_plant() { return {{1.4856, -0.81}, {0.5, 0.3}}; }

StageConfig single_stage(std::vector<int> harmonics) {
  StageConfig s;
  s.name = "vcm";
  s.plant = resonant_plant();
  s.harmonics = std::move(harmonics);
  s.nb_hat = 2;
  s.feedforward.variant = Variant::improved;
  s.feedforward.alpha = 0.001;
  return s;
}

LoopConfig single_base(std::string name, std::vector<int> harmonics) {
  LoopConfig c;
  c.name = std::move(name);
  c.seed = 7;
  c.revolutions = 200;
  c.report.analysis_revolutions = 20;
  c.estimator.na = 2;
  c.estimator.gain = {0.2, 0.0, 0.0};
  c.check_invariants = true;
  c.stages.push_back(single_stage(std::move(harmonics)));
  return c;
}

// Tones at half-integer cycles/rev never land on a harmonic bin.
ExcitationSpec off_bin_multisine() { return {ExcitationKind::multisine, 0.3, {2.5, 7.5, 13.5, 21.5, 35.5, 55.5}}; }

LoopConfig single_harmonic_demo() {
  auto c = single_base("single_harmonic_demo", {1});
  c.revolutions = 100;
  c.stages[0].excitation = {ExcitationKind::white, 0.3, {}};
  c.nrro.sigma = 0.05;
  return c;
}

LoopConfig single_stage_10() {
  auto c = single_base("single_stage_10", range(1, 10));
  c.stages[0].excitation = off_bin_multisine();
  return c;
}

LoopConfig single_stage_10_nrro() {
  auto c = single_base("single_stage_10_nrro", range(1, 10));
  c.stages[0].excitation = {ExcitationKind::white, 0.3, {}};
  c.stages[0].feedforward.alpha = 0.0005;
  c.nrro.sigma = 0.05;
  return c;
}

LoopConfig basic_transient_demo() {
  auto c = single_base("basic_transient_demo", range(1, 10));
  c.stages[0].excitation = off_bin_multisine();
  c.stages[0].feedforward.variant = Variant::basic;
  c.stages[0].feedforward.smoothing.beta = 0.0;
  c.stages[0].theta_b_init = {0.0, 0.0};
  return c;
}

LoopConfig estimator_id(bool excited) {
  LoopConfig c;
  c.name = excited ? "estimator_id" : "no_excitation";
  c.seed = 7;
  c.revolutions = 100;
  c.report.analysis_revolutions = 10;
  c.estimator.na = 2;
  c.estimator.gain = {0.5, 0.0, 0.0};
  c.rro.scale = excited ? 0.0 : 1.0;
  c.check_invariants = true;
  auto s = single_stage(range(1, 10));
  s.adapt = false;
  s.excitation = excited ? ExcitationSpec{ExcitationKind::white, 1.0, {}} : ExcitationSpec{ExcitationKind::zero, 0.0, {}};
  c.stages.push_back(s);
  return c;
}

// VCM: low-pass first-order path, MA: high-pass-leaning first-order path.
// Both stages carry their own white excitation so that each numerator of the
// common-denominator model stays identifiable.
LoopConfig dual_stage(bool noisy) {
  LoopConfig c;
  c.name = noisy ? "dual_stage_173" : "dual_stage_173_clean";
  c.seed = 7;
  c.revolutions = 300;
  c.report.analysis_revolutions = 20;
  c.estimator.na = 2;
  c.estimator.gain = {1.0, 0.0, 0.0};
  c.estimator.block_gains = {2.0, 2.0, 1.0};
  c.check_invariants = true;

  StageConfig vcm;
  vcm.name = "vcm";
  vcm.plant = {{0.5}, {0.5}};
  vcm.harmonics = range(1, 58);
  vcm.nb_hat = 2;
  vcm.excitation = {ExcitationKind::white, 5.0, {}};
  vcm.feedforward.alpha = 0.004;

  StageConfig ma;
  ma.name = "ma";
  ma.plant = {{-0.3}, {0.8}};
  ma.harmonics = range(59, 173);
  ma.nb_hat = 2;
  ma.excitation = {ExcitationKind::white, 5.0, {}};
  ma.feedforward.alpha = 0.001;

  c.stages = {vcm, ma};
  c.nrro.sigma = noisy ? 0.05 : 0.0;
  return c;
}

struct Entry {
  const char* name;
  const char* summary;
  LoopConfig (*make)();
};

const Entry kPresets[] = {
    {"single_harmonic_demo", "one harmonic, resonant plant, white u_e, NRRO on", single_harmonic_demo},
    {"single_stage_10", "harmonics 1-10, noise-free, off-bin multisine u_e", single_stage_10},
    {"single_stage_10_nrro", "harmonics 1-10, white u_e, NRRO on", single_stage_10_nrro},
    {"basic_transient_demo", "basic variant from theta_B = 0 with smoothing off", basic_transient_demo},
    {"estimator_id", "no RRO, white u_e, feedforward idle; parameter identification only",
     [] { return estimator_id(true); }},
    {"no_excitation", "u_e = 0 with RRO present; theta_B is not identifiable", [] { return estimator_id(false); }},
    {"dual_stage_173", "VCM 1-58 + MA 59-173, NRRO on", [] { return dual_stage(true); }},
    {"dual_stage_173_clean", "VCM 1-58 + MA 59-173, noise-free", [] { return dual_stage(false); }},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& e : kPresets) out.emplace_back(e.name);
  return out;
}

LoopConfig preset(std::string_view name) {
  for (const auto& e : kPresets)
    if (name == e.name) return e.make();
  throw ConfigError(std::vector<Diagnostic>{{"preset", "unknown preset '" + std::string(name) + "'"}});
}

std::string preset_summary(std::string_view name) {
  for (const auto& e : kPresets)
    if (name == e.name) return e.summary;
  throw ConfigError(std::vector<Diagnostic>{{"preset", "unknown preset '" + std::string(name) + "'"}});
}

}  // namespace rroff
