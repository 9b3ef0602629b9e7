#include "rroff/config.hpp"

#include <fstream>
#include <type_traits>
#include <sstream>

namespace rroff {

using nlohmann::json;

namespace {

std::string key_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : base + "." + std::string(key);
}

class Reader {
 public:
  explicit Reader(std::vector<Diagnostic>& diags) : diags_(diags) {}

  void fail(std::string path, std::string msg) { diags_.push_back({std::move(path), std::move(msg)}); }

  // True if `j` is an object; reports every key outside `allowed`.
  bool object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) {
      fail(path.empty() ? "<root>" : path, "expected an object");
      return false;
    }
    for (const auto& [k, v] : j.items()) {
      bool known = false;
      for (auto a : allowed) known = known || k == a;
      if (!known) fail(key_path(path, k), "unknown key");
    }
    return true;
  }

  const json* find(const json& obj, std::string_view key) {
    auto it = obj.find(std::string(key));
    return it == obj.end() ? nullptr : &*it;
  }

  void number(const json& obj, const std::string& path, std::string_view key, double& out) {
    if (auto* v = find(obj, key)) {
      if (v->is_number()) out = v->get<double>();
      else fail(key_path(path, key), "expected a number");
    }
  }

  template <class Int>
  void integer(const json& obj, const std::string& path, std::string_view key, Int& out) {
    if (auto* v = find(obj, key)) {
      // nlohmann stores non-negative literals as unsigned
      if (std::is_signed_v<Int> ? v->is_number_integer() : v->is_number_unsigned())
        out = v->get<Int>();
      else
        fail(key_path(path, key), std::is_signed_v<Int> ? "expected an integer" : "expected a non-negative integer");
    }
  }

  void boolean(const json& obj, const std::string& path, std::string_view key, bool& out) {
    if (auto* v = find(obj, key)) {
      if (v->is_boolean()) out = v->get<bool>();
      else fail(key_path(path, key), "expected true or false");
    }
  }

  void string(const json& obj, const std::string& path, std::string_view key, std::string& out) {
    if (auto* v = find(obj, key)) {
      if (v->is_string()) out = v->get<std::string>();
      else fail(key_path(path, key), "expected a string");
    }
  }

  void numbers(const json& obj, const std::string& path, std::string_view key, std::vector<double>& out) {
    auto* v = find(obj, key);
    if (!v) return;
    bool ok = v->is_array();
    if (ok)
      for (const auto& x : *v) ok = ok && x.is_number();
    if (!ok) {
      fail(key_path(path, key), "expected an array of numbers");
      return;
    }
    out = v->get<std::vector<double>>();
  }

  // Harmonic lists: either [1, 2, 5] or a range string "1-58,60".
  void indices(const json& obj, const std::string& path, std::string_view key, std::vector<int>& out) {
    auto* v = find(obj, key);
    if (!v) return;
    if (v->is_string()) {
      try {
        out = parse_index_ranges(v->get<std::string>());
      } catch (const std::exception& ex) {
        fail(key_path(path, key), ex.what());
      }
      return;
    }
    bool ok = v->is_array();
    if (ok)
      for (const auto& x : *v) ok = ok && x.is_number_integer();
    if (!ok) {
      fail(key_path(path, key), "expected an array of integers or a range string like \"1-58\"");
      return;
    }
    out = v->get<std::vector<int>>();
  }

 private:
  std::vector<Diagnostic>& diags_;
};

void read_stage(Reader& r, const json& j, const std::string& p, StageConfig& st) {
  if (!r.object(j, p,
                {"name", "plant", "harmonics", "nb_hat", "excitation", "feedforward", "adapt", "warmup_revolutions",
                 "theta_b_init"}))
    return;
  r.string(j, p, "name", st.name);
  if (auto* plant = r.find(j, "plant")) {
    const auto pp = p + ".plant";
    if (r.object(*plant, pp, {"a_star", "b"})) {
      r.numbers(*plant, pp, "a_star", st.plant.a_star);
      r.numbers(*plant, pp, "b", st.plant.b);
    }
  }
  r.indices(j, p, "harmonics", st.harmonics);
  r.integer(j, p, "nb_hat", st.nb_hat);
  if (auto* ex = r.find(j, "excitation")) {
    const auto pe = p + ".excitation";
    if (r.object(*ex, pe, {"kind", "sigma", "tones"})) {
      std::string kind(to_string(st.excitation.kind));
      r.string(*ex, pe, "kind", kind);
      try {
        st.excitation.kind = parse_excitation_kind(kind);
      } catch (const std::exception& e) {
        r.fail(pe + ".kind", e.what());
      }
      r.number(*ex, pe, "sigma", st.excitation.sigma);
      r.numbers(*ex, pe, "tones", st.excitation.tones);
    }
  }
  if (auto* ff = r.find(j, "feedforward")) {
    const auto pf = p + ".feedforward";
    if (r.object(*ff, pf, {"variant", "alpha", "beta", "epsilon"})) {
      std::string variant(to_string(st.feedforward.variant));
      r.string(*ff, pf, "variant", variant);
      try {
        st.feedforward.variant = parse_variant(variant);
      } catch (const std::exception& e) {
        r.fail(pf + ".variant", e.what());
      }
      r.number(*ff, pf, "alpha", st.feedforward.alpha);
      r.number(*ff, pf, "beta", st.feedforward.smoothing.beta);
      r.number(*ff, pf, "epsilon", st.feedforward.smoothing.magnitude_floor);
    }
  }
  r.boolean(j, p, "adapt", st.adapt);
  r.integer(j, p, "warmup_revolutions", st.warmup_revolutions);
  r.numbers(j, p, "theta_b_init", st.theta_b_init);
}

}  // namespace

LoopConfig config_from_json(const json& j) {
  std::vector<Diagnostic> diags;
  Reader r(diags);
  LoopConfig cfg;
  if (!r.object(j, "",
                {"name", "spindle_hz", "samples_per_rev", "revolutions", "seed", "check_invariants", "stages",
                 "estimator", "rro", "nrro", "report", "output"}))
    throw ConfigError(std::move(diags));

  r.string(j, "", "name", cfg.name);
  r.number(j, "", "spindle_hz", cfg.spindle_hz);
  r.integer(j, "", "samples_per_rev", cfg.samples_per_rev);
  r.integer(j, "", "revolutions", cfg.revolutions);
  if (auto* s = r.find(j, "seed")) {
    if (s->is_number_unsigned()) cfg.seed = s->get<std::uint64_t>();
    else if (!s->is_null()) r.fail("seed", "expected a non-negative integer");
  }
  r.boolean(j, "", "check_invariants", cfg.check_invariants);

  if (auto* stages = r.find(j, "stages")) {
    if (!stages->is_array()) {
      r.fail("stages", "expected an array of stage objects");
    } else {
      for (std::size_t s = 0; s < stages->size(); ++s) {
        StageConfig st;
        st.name = "stage" + std::to_string(s);
        read_stage(r, (*stages)[s], "stages[" + std::to_string(s) + "]", st);
        cfg.stages.push_back(std::move(st));
      }
    }
  }

  if (auto* e = r.find(j, "estimator"); e && r.object(*e, "estimator", {"enabled", "na", "gain", "block_gains", "theta_a_init"})) {
    auto& est = cfg.estimator;
    r.boolean(*e, "estimator", "enabled", est.enabled);
    r.integer(*e, "estimator", "na", est.na);
    if (auto* g = r.find(*e, "gain"); g && r.object(*g, "estimator.gain", {"k0", "decay", "floor"})) {
      r.number(*g, "estimator.gain", "k0", est.gain.k0);
      r.number(*g, "estimator.gain", "decay", est.gain.decay);
      r.number(*g, "estimator.gain", "floor", est.gain.floor);
    }
    if (auto* b = r.find(*e, "block_gains"); b && r.object(*b, "estimator.block_gains", {"a", "b", "m"})) {
      r.number(*b, "estimator.block_gains", "a", est.block_gains.a);
      r.number(*b, "estimator.block_gains", "b", est.block_gains.b);
      r.number(*b, "estimator.block_gains", "m", est.block_gains.m);
    }
    r.numbers(*e, "estimator", "theta_a_init", est.theta_a_init);
  }

  if (auto* x = r.find(j, "rro"); x && r.object(*x, "rro", {"scale", "decay_power", "harmonics", "profile_csv"})) {
    r.number(*x, "rro", "scale", cfg.rro.scale);
    r.number(*x, "rro", "decay_power", cfg.rro.decay_power);
    r.indices(*x, "rro", "harmonics", cfg.rro.harmonics);
    r.string(*x, "rro", "profile_csv", cfg.rro.profile_csv);
  }
  if (auto* x = r.find(j, "nrro"); x && r.object(*x, "nrro", {"sigma", "lowpass_pole"})) {
    r.number(*x, "nrro", "sigma", cfg.nrro.sigma);
    r.number(*x, "nrro", "lowpass_pole", cfg.nrro.lowpass_pole);
  }
  if (auto* x = r.find(j, "report"); x && r.object(*x, "report", {"analysis_revolutions", "floor_margin", "floor_abs"})) {
    r.integer(*x, "report", "analysis_revolutions", cfg.report.analysis_revolutions);
    r.number(*x, "report", "floor_margin", cfg.report.floor_margin);
    r.number(*x, "report", "floor_abs", cfg.report.floor_abs);
  }
  if (auto* x = r.find(j, "output"); x && r.object(*x, "output", {"trace_decimation", "snapshot_decimation"})) {
    r.integer(*x, "output", "trace_decimation", cfg.output.trace_decimation);
    r.integer(*x, "output", "snapshot_decimation", cfg.output.snapshot_decimation);
  }

  if (!diags.empty()) throw ConfigError(std::move(diags));
  return cfg;
}

json config_to_json(const LoopConfig& cfg) {
  json stages = json::array();
  for (const auto& st : cfg.stages) {
    stages.push_back({
        {"name", st.name},
        {"plant", {{"a_star", st.plant.a_star}, {"b", st.plant.b}}},
        {"harmonics", format_index_ranges(st.harmonics)},
        {"nb_hat", st.nb_hat},
        {"excitation",
         {{"kind", std::string(to_string(st.excitation.kind))},
          {"sigma", st.excitation.sigma},
          {"tones", st.excitation.tones}}},
        {"feedforward",
         {{"variant", std::string(to_string(st.feedforward.variant))},
          {"alpha", st.feedforward.alpha},
          {"beta", st.feedforward.smoothing.beta},
          {"epsilon", st.feedforward.smoothing.magnitude_floor}}},
        {"adapt", st.adapt},
        {"warmup_revolutions", st.warmup_revolutions},
        {"theta_b_init", st.theta_b_init},
    });
  }
  const auto& est = cfg.estimator;
  json j = {
      {"name", cfg.name},
      {"spindle_hz", cfg.spindle_hz},
      {"samples_per_rev", cfg.samples_per_rev},
      {"revolutions", cfg.revolutions},
      {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
      {"check_invariants", cfg.check_invariants},
      {"stages", stages},
      {"estimator",
       {{"enabled", est.enabled},
        {"na", est.na},
        {"gain", {{"k0", est.gain.k0}, {"decay", est.gain.decay}, {"floor", est.gain.floor}}},
        {"block_gains", {{"a", est.block_gains.a}, {"b", est.block_gains.b}, {"m", est.block_gains.m}}},
        {"theta_a_init", est.theta_a_init}}},
      {"rro",
       {{"scale", cfg.rro.scale},
        {"decay_power", cfg.rro.decay_power},
        {"harmonics", format_index_ranges(cfg.rro.harmonics)},
        {"profile_csv", cfg.rro.profile_csv}}},
      {"nrro", {{"sigma", cfg.nrro.sigma}, {"lowpass_pole", cfg.nrro.lowpass_pole}}},
      {"report",
       {{"analysis_revolutions", cfg.report.analysis_revolutions},
        {"floor_margin", cfg.report.floor_margin},
        {"floor_abs", cfg.report.floor_abs}}},
      {"output",
       {{"trace_decimation", cfg.output.trace_decimation}, {"snapshot_decimation", cfg.output.snapshot_decimation}}},
  };
  return j;
}

LoopConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::vector<Diagnostic>{{"<file>", std::string("JSON syntax error: ") + ex.what()}});
  }
  // A run manifest carries the resolved config under "config".
  if (j.is_object() && j.contains("config") && j.contains("files")) return config_from_json(j["config"]);
  return config_from_json(j);
}

LoopConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::vector<Diagnostic>{{"<file>", "cannot open config file " + path.string()}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

LoopConfig checked(LoopConfig cfg) {
  if (auto d = validate(cfg); !d.empty()) throw ConfigError(std::move(d));
  return cfg;
}

}  // namespace rroff
