#include "rroff/cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rroff/csv.hpp"

namespace rroff::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

namespace {

std::string fmt(double v) { return csv::format(v); }

class RunWriter {
 public:
  explicit RunWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void put(const std::string& name, const std::string& body) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << body;
    if (!out) throw std::runtime_error("write failed for " + (dir_ / name).string());
    files_.push_back({name, sha256_hex(body), body.size()});
  }

  const std::vector<WrittenFile>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<WrittenFile> files_;
};

template <class F>
std::string render(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

std::string coeff_name(const std::string& prefix, int index, bool sine) {
  return prefix + (sine ? ".s" : ".c") + std::to_string(index);
}

HarmonicSpectrum stage_ua_spectrum(const LoopConfig& cfg, const StageTrace& st, std::span<const int> indices) {
  const auto w = terminal_window(st.u_a, cfg.samples_per_rev, cfg.report.analysis_revolutions);
  return harmonic_spectrum(w, cfg.samples_per_rev, indices);
}

bool any_basic(const LoopConfig& cfg) {
  return std::any_of(cfg.stages.begin(), cfg.stages.end(),
                     [](const StageConfig& s) { return s.feedforward.variant == Variant::basic; });
}

std::string frozen_csv(const SimulationTrace& tr, int n) {
  std::ostringstream os;
  os << "stage,index,frozen_samples,frozen_revolutions\n";
  for (const auto& st : tr.stages)
    for (std::size_t i = 0; i < st.frozen_samples.size(); ++i)
      os << st.name << ',' << st.harmonics[i] << ',' << st.frozen_samples[i] << ','
         << fmt(static_cast<double>(st.frozen_samples[i]) / n) << '\n';
  return os.str();
}

json seeds_json(const LoopConfig& cfg) {
  const auto s = derive_seeds(cfg);
  return {{"master", cfg.seed.value_or(0)}, {"rro", s.rro}, {"nrro", s.nrro}, {"excitation", s.excitation}};
}

}  // namespace

std::string trace_csv(const SimulationTrace& tr, std::int64_t decimation) {
  std::ostringstream os;
  os << "sample,e,e_hat,e_tilde,r,nrro";
  for (const auto& st : tr.stages) os << ",u_e_" << st.name << ",u_a_" << st.name;
  os << '\n';
  for (std::int64_t k = 0; k < tr.samples; k += decimation) {
    const auto i = static_cast<std::size_t>(k);
    os << k << ',' << fmt(tr.e[i]) << ',' << fmt(tr.e_hat[i]) << ',' << fmt(tr.e_tilde[i]) << ',' << fmt(tr.r[i]) << ','
       << fmt(tr.nrro[i]);
    for (const auto& st : tr.stages) os << ',' << fmt(st.u_e[i]) << ',' << fmt(st.u_a[i]);
    os << '\n';
  }
  return os.str();
}

std::string ffwd_coeffs_csv(const SimulationTrace& tr) {
  std::ostringstream os;
  os << "sample,series,value\n";
  for (std::size_t t = 0; t < tr.snapshot_samples.size(); ++t)
    for (const auto& st : tr.stages) {
      const auto& d = st.theta_d[t];
      for (std::size_t i = 0; i < st.harmonics.size(); ++i) {
        os << tr.snapshot_samples[t] << ',' << coeff_name(st.name, st.harmonics[i], false) << ',' << fmt(d[2 * i])
           << '\n';
        os << tr.snapshot_samples[t] << ',' << coeff_name(st.name, st.harmonics[i], true) << ','
           << fmt(d[2 * i + 1]) << '\n';
      }
    }
  return os.str();
}

std::string estimate_csv(const SimulationTrace& tr) {
  std::vector<std::string> names;
  const auto& L = tr.layout;
  for (std::size_t j = 1; j <= L.na; ++j) names.push_back("a" + std::to_string(j));
  for (std::size_t s = 0; s < L.nb.size(); ++s)
    for (std::size_t j = 1; j <= L.nb[s]; ++j) names.push_back("b_" + tr.stages[s].name + std::to_string(j));
  for (const auto& st : tr.stages)
    for (int i : st.harmonics) {
      names.push_back(coeff_name("m", i, false));
      names.push_back(coeff_name("m", i, true));
    }
  std::ostringstream os;
  os << "sample,series,value\n";
  for (std::size_t t = 0; t < tr.snapshot_samples.size(); ++t)
    for (std::size_t j = 0; j < names.size(); ++j)
      os << tr.snapshot_samples[t] << ',' << names[j] << ',' << fmt(tr.theta[t][j]) << '\n';
  return os.str();
}

std::string ffwd_waveform_csv(const SimulationTrace& tr) {
  const int n = tr.samples_per_rev;
  std::ostringstream os;
  os << "k,series,value\n";
  const auto table = TrigTable::shared(n);
  for (const auto& st : tr.stages) {
    const auto& d = st.theta_d.back();
    for (int k = 0; k < n; ++k) {
      double u = 0.0;
      for (std::size_t i = 0; i < st.harmonics.size(); ++i) {
        const auto m = table->slot(st.harmonics[i], k);
        u += d[2 * i] * table->cos_slot(m) + d[2 * i + 1] * table->sin_slot(m);
      }
      os << k << ",u_a_" << st.name << ',' << fmt(u) << '\n';
    }
  }
  for (int k = 0; k < n; ++k) os << k << ",rro," << fmt(tr.rro_profile.sample(k)) << '\n';
  return os.str();
}

std::vector<WrittenFile> write_run(const fs::path& dir, const LoopConfig& cfg, const ExperimentResult& res,
                                   std::string_view command) {
  RunWriter w(dir);
  const auto& tr = res.trace;
  w.put("trace.csv", trace_csv(tr, cfg.output.trace_decimation));
  w.put("spectrum_before.csv", render([&](std::ostream& os) { res.before.write_csv(os); }));
  w.put("spectrum_after.csv", render([&](std::ostream& os) { res.after.write_csv(os); }));
  w.put("spectrum_floor.csv", render([&](std::ostream& os) { res.floor.write_csv(os); }));
  for (const auto& st : tr.stages)
    w.put("spectrum_u_a_" + st.name + ".csv",
          render([&](std::ostream& os) { stage_ua_spectrum(cfg, st, res.indices).write_csv(os); }));
  w.put("report.csv", render([&](std::ostream& os) { res.report.write_csv(os); }));
  w.put("ffwd_coeffs.csv", ffwd_coeffs_csv(tr));
  w.put("ffwd_waveform.csv", ffwd_waveform_csv(tr));
  w.put("estimate.csv", estimate_csv(tr));
  w.put("rro_profile.csv", render([&](std::ostream& os) { tr.rro_profile.write_csv(os); }));
  if (any_basic(cfg)) w.put("frozen.csv", frozen_csv(tr, cfg.samples_per_rev));

  json files = json::array();
  for (const auto& f : w.files()) files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  const json manifest = {
      {"artifact", "rroff"},
      {"version", std::string(kVersion)},
      {"command", std::string(command)},
      {"config", config_to_json(cfg)},
      {"seeds", seeds_json(cfg)},
      {"summary",
       {{"bins", res.report.rows.size()},
        {"at_floor", res.report.count_at_floor},
        {"max_residual", res.report.max_residual},
        {"step_bound_checks", tr.step_bound_checks},
        {"step_bound_violations", tr.step_bound_violations}}},
      {"files", files},
  };
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  return w.files();
}

std::vector<TimingRow> benchmark_updates(std::span<const std::size_t> n_r_values, std::int64_t revolutions) {
  std::vector<TimingRow> rows;
  for (std::size_t n_r : n_r_values) {
    for (Variant v : {Variant::basic, Variant::improved}) {
      LoopConfig c;
      c.name = "timing";
      c.seed = 1;
      c.revolutions = revolutions;
      c.report.analysis_revolutions = 1;
      c.estimator.gain = {0.2, 0.0, 0.0};
      StageConfig s;
      s.name = "vcm";
      s.plant = {{1.4856, -0.81}, {0.5, 0.3}};
      for (std::size_t i = 1; i <= n_r; ++i) s.harmonics.push_back(static_cast<int>(i));
      s.excitation = {ExcitationKind::white, 0.3, {}};
      s.feedforward.variant = v;
      s.feedforward.alpha = 0.0005;
      c.stages.push_back(s);
      RunOptions o;
      o.measure_timing = true;
      const auto tr = run_episode(c, o);
      const auto& st = tr.stages[0];
      rows.push_back({n_r, v, st.adapt_calls ? st.adapt_ns_total / static_cast<double>(st.adapt_calls) : 0.0,
                      st.adapt_calls});
    }
  }
  return rows;
}

namespace {

struct Common {
  std::string config_path;
  std::string preset_name;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> revolutions;
  std::string variant;
  bool table = false;
};

void add_common(CLI::App* cmd, Common& c) {
  auto* cfg = cmd->add_option("--config", c.config_path, "JSON config or run manifest");
  auto* pre = cmd->add_option("--preset", c.preset_name, "built-in scenario (see `rroff presets`)");
  cfg->excludes(pre);
  cmd->add_option("--out", c.out, "output directory (default: $RROFF_OUT_ROOT/<name> or runs/<name>)");
  cmd->add_option("--seed-override", c.seed, "replace the master seed");
  cmd->add_option("--revolutions-override", c.revolutions, "replace the episode length");
  cmd->add_option("--variant", c.variant, "force every stage to basic|improved")
      ->check(CLI::IsMember({"basic", "improved"}));
  cmd->add_flag("--table", c.table, "print the full per-harmonic table");
}

LoopConfig resolve(const Common& c) {
  if (c.config_path.empty() && c.preset_name.empty())
    throw ConfigError(std::vector<Diagnostic>{{"--config", "one of --config or --preset is required"}});
  LoopConfig cfg = c.config_path.empty() ? preset(c.preset_name) : load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.revolutions) {
    cfg.revolutions = *c.revolutions;
    cfg.report.analysis_revolutions = std::min(cfg.report.analysis_revolutions, cfg.revolutions);
  }
  if (!c.variant.empty())
    for (auto& s : cfg.stages) s.feedforward.variant = parse_variant(c.variant);
  return checked(std::move(cfg));
}

fs::path out_dir(const Common& c, const LoopConfig& cfg, std::string_view suffix = {}) {
  if (!c.out.empty()) return c.out;
  const char* root = std::getenv("RROFF_OUT_ROOT");
  return fs::path(root && *root ? root : "runs") / (cfg.name + std::string(suffix));
}

void print_summary(const LoopConfig& cfg, const ExperimentResult& r, bool table) {
  if (table || r.report.rows.size() <= 20) {
    std::cout << r.report.to_table();
  } else {
    std::printf("max residual %.6e, worst %.2f dB, %zu/%zu at floor\n", r.report.max_residual, r.report.worst_db,
                r.report.count_at_floor, r.report.rows.size());
  }
  if (cfg.check_invariants)
    std::printf("step-size bound: %lld violations in %lld samples\n",
                static_cast<long long>(r.trace.step_bound_violations), static_cast<long long>(r.trace.step_bound_checks));
}

int cmd_simulate(const Common& c) {
  const auto cfg = resolve(c);
  const auto res = run_experiment(cfg);
  const auto dir = out_dir(c, cfg);
  write_run(dir, cfg, res, "simulate");
  print_summary(cfg, res, c.table);
  std::cout << "wrote " << dir.string() << '\n';
  return ok;
}

int cmd_compare(const Common& c) {
  const auto base = resolve(c);
  auto with = [&](Variant v) {
    auto cfg = base;
    for (auto& s : cfg.stages) s.feedforward.variant = v;
    return cfg;
  };
  const auto cfg_b = with(Variant::basic);
  const auto cfg_i = with(Variant::improved);
  RunOptions timed;
  timed.measure_timing = true;
  auto fut = std::async(std::launch::async, [&] { return run_experiment(cfg_b, timed); });
  const auto res_i = run_experiment(cfg_i, timed);
  const auto res_b = fut.get();

  const auto dir = out_dir(c, base, "_compare");
  write_run(dir / "basic", cfg_b, res_b, "compare");
  write_run(dir / "improved", cfg_i, res_i, "compare");
  RunWriter w(dir);

  std::ostringstream rep;
  rep << "index,before,after_basic,after_improved,floor,db_basic,db_improved,at_floor_basic,at_floor_improved\n";
  for (std::size_t b = 0; b < res_i.report.rows.size(); ++b) {
    const auto& rb = res_b.report.rows[b];
    const auto& ri = res_i.report.rows[b];
    rep << ri.index << ',' << fmt(ri.before) << ',' << fmt(rb.after) << ',' << fmt(ri.after) << ',' << fmt(ri.floor)
        << ',' << fmt(rb.db) << ',' << fmt(ri.db) << ',' << (rb.at_floor ? 1 : 0) << ',' << (ri.at_floor ? 1 : 0)
        << '\n';
  }
  w.put("compare_report.csv", rep.str());

  std::ostringstream td;
  td << "stage,coefficient,basic,improved,difference\n";
  double max_diff = 0.0;
  for (std::size_t s = 0; s < res_i.trace.stages.size(); ++s) {
    const auto& sb = res_b.trace.stages[s];
    const auto& si = res_i.trace.stages[s];
    const auto& db = sb.theta_d.back();
    const auto& di = si.theta_d.back();
    for (std::size_t j = 0; j < di.size(); ++j) {
      const double diff = db[j] - di[j];
      max_diff = std::max(max_diff, std::abs(diff));
      td << si.name << ',' << coeff_name("d", si.harmonics[j / 2], j % 2 == 1) << ',' << fmt(db[j]) << ','
         << fmt(di[j]) << ',' << fmt(diff) << '\n';
    }
  }
  w.put("theta_d_compare.csv", td.str());
  w.put("frozen.csv", frozen_csv(res_b.trace, base.samples_per_rev));

  const std::size_t sizes[] = {10, 58, 173};
  const auto bench = benchmark_updates(sizes);
  // Wall-clock figures differ run to run, so they stay out of the CSV set.
  {
    std::ofstream t(dir / "timing.txt");
    t << "# per-sample theta_D update cost (ns), wall clock\n";
    t << "source        variant   n_r   updates  ns_per_update\n";
    for (const auto* r : {&res_b, &res_i})
      for (const auto& st : r->trace.stages) {
        char line[160];
        std::snprintf(line, sizeof line, "run:%-8s %-9s %5zu %9lld %14.1f\n", st.name.c_str(),
                      std::string(to_string(r == &res_b ? Variant::basic : Variant::improved)).c_str(),
                      st.harmonics.size(), static_cast<long long>(st.adapt_calls),
                      st.adapt_calls ? st.adapt_ns_total / static_cast<double>(st.adapt_calls) : 0.0);
        t << line;
      }
    for (const auto& row : bench) {
      char line[160];
      std::snprintf(line, sizeof line, "bench         %-9s %5zu %9lld %14.1f\n",
                    std::string(to_string(row.variant)).c_str(), row.n_r, static_cast<long long>(row.updates),
                    row.ns_per_update);
      t << line;
    }
  }

  std::printf("%7s %13s %13s %13s %13s %s\n", "index", "before", "basic", "improved", "floor", "at-floor b/i");
  if (c.table || res_i.report.rows.size() <= 20)
    for (std::size_t b = 0; b < res_i.report.rows.size(); ++b) {
      const auto& rb = res_b.report.rows[b];
      const auto& ri = res_i.report.rows[b];
      std::printf("%7d %13.6e %13.6e %13.6e %13.6e %s/%s\n", ri.index, ri.before, rb.after, ri.after, ri.floor,
                  rb.at_floor ? "yes" : "no", ri.at_floor ? "yes" : "no");
    }
  std::printf("at floor: basic %zu/%zu, improved %zu/%zu\n", res_b.report.count_at_floor, res_b.report.rows.size(),
              res_i.report.count_at_floor, res_i.report.rows.size());
  std::printf("terminal theta_D max |basic - improved| = %.3e (%s 1e-2)\n", max_diff,
              max_diff <= 1e-2 ? "within" : "exceeds");
  std::int64_t longest = 0;
  std::size_t ever = 0;
  for (const auto& st : res_b.trace.stages)
    for (auto f : st.frozen_samples) {
      longest = std::max(longest, f);
      if (f > 0) ++ever;
    }
  std::printf("basic variant: %zu harmonics frozen at some point, longest %.2f revolutions\n", ever,
              static_cast<double>(longest) / base.samples_per_rev);
  for (const auto& row : bench)
    std::printf("update cost n_r=%zu %s: %.1f ns\n", row.n_r, std::string(to_string(row.variant)).c_str(),
                row.ns_per_update);
  std::cout << "wrote " << dir.string() << '\n';
  return ok;
}

struct SpectrumArgs {
  std::string trace;
  std::string column = "e";
  int n_per_rev = 0;
  std::string indices;
  std::string out;
  std::int64_t last = 0;
};

int cmd_spectrum(const SpectrumArgs& a) {
  std::ifstream in(a.trace);
  if (!in) throw std::invalid_argument("cannot open trace " + a.trace);
  const auto table = csv::read(in);
  auto x = table.numeric_column(a.column);
  std::span<const double> sig(x);
  if (a.last > 0) sig = terminal_window(sig, a.n_per_rev, a.last);
  const auto idx = parse_index_ranges(a.indices);
  const auto spec = harmonic_spectrum(sig, a.n_per_rev, idx);
  if (a.out.empty()) {
    spec.write_csv(std::cout);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.out);
    spec.write_csv(out);
  }
  return ok;
}

void print_diagnostics(const ConfigError& e) {
  std::cerr << "config error:\n";
  for (const auto& d : e.diagnostics()) std::cerr << "  " << d.field << ": " << d.message << '\n';
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Adaptive feedforward cancellation of repeatable runout"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common sim, cmp;
  auto* simulate = app.add_subcommand("simulate", "run one scenario and write its artifacts");
  add_common(simulate, sim);
  auto* compare = app.add_subcommand("compare", "run basic and improved variants on identical seeds");
  add_common(compare, cmp);

  SpectrumArgs sp;
  auto* spectrum = app.add_subcommand("spectrum", "harmonic spectrum of one trace column");
  spectrum->add_option("--trace", sp.trace, "trace CSV")->required();
  spectrum->add_option("--column", sp.column, "column name")->capture_default_str();
  spectrum->add_option("--n-per-rev", sp.n_per_rev, "samples per revolution")->required();
  spectrum->add_option("--indices", sp.indices, "harmonics, e.g. 1-58,60")->required();
  spectrum->add_option("--last", sp.last, "analyse only the last N revolutions");
  spectrum->add_option("--out", sp.out, "output CSV (default stdout)");

  std::string dump;
  auto* presets = app.add_subcommand("presets", "list built-in scenarios or dump one as JSON");
  presets->add_option("--dump", dump, "preset to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*compare) return cmd_compare(cmp);
    if (*spectrum) return cmd_spectrum(sp);
    if (*presets) {
      if (!dump.empty()) {
        std::cout << config_to_json(preset(dump)).dump(2) << '\n';
      } else {
        for (const auto& n : preset_names()) std::printf("%-22s %s\n", n.c_str(), preset_summary(n).c_str());
      }
      return ok;
    }
  } catch (const ConfigError& e) {
    print_diagnostics(e);
    return config_error;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return numeric_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
  return failure;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> owned;
  owned.reserve(args.size() + 1);
  owned.emplace_back("rroff");
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : owned) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(owned.size()), argv.data());
}

}  // namespace rroff::cli
