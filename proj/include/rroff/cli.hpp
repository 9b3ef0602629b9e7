#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rroff/config.hpp"
#include "rroff/experiment.hpp"

namespace rroff::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int { ok = 0, failure = 1, config_error = 2, numeric_error = 3 };

std::string sha256_hex(std::string_view bytes);

struct WrittenFile {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

// Writes the full artifact set of one experiment into `dir` plus manifest.json
// listing every file with its digest. Returns the inventory in write order.
std::vector<WrittenFile> write_run(const std::filesystem::path& dir, const LoopConfig& cfg,
                                   const ExperimentResult& result, std::string_view command);

// CSV bodies, exposed for tests.
std::string trace_csv(const SimulationTrace& tr, std::int64_t decimation);
std::string ffwd_coeffs_csv(const SimulationTrace& tr);
std::string ffwd_waveform_csv(const SimulationTrace& tr);
std::string estimate_csv(const SimulationTrace& tr);

// Per-update wall time of the theta_D path for a synthetic single-stage loop
// with harmonics 1..n_r.
struct TimingRow {
  std::size_t n_r = 0;
  Variant variant = Variant::improved;
  double ns_per_update = 0.0;
  std::int64_t updates = 0;
};
std::vector<TimingRow> benchmark_updates(std::span<const std::size_t> n_r_values, std::int64_t revolutions = 20);

// Entry point shared by the rroff executable and the CLI tests.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace rroff::cli
