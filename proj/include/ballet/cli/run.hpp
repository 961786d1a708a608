#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ballet/bench/trial.hpp"

namespace ballet::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitRuntime = 2,
  kExitPartial = 3,
};

struct RunManifest {
  std::string config_path;
  std::string out_dir = "results";
  int jobs = 1;
  bool overwrite = false;
  std::uint64_t seed_offset = 0;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

std::string trace_csv(const bench::TrialTrace& trace);
std::string summary_csv(const bench::Summary& summary);

/// Parses a trace CSV written by trace_csv. The config hash is not stored
/// in the file and is left empty.
bench::TrialTrace parse_trace_csv(const std::string& text);
bench::Summary parse_summary_csv(const std::string& text);

std::string trace_filename(const bench::ExperimentConfig& config,
                           std::uint64_t seed);
std::string summary_filename(const bench::ExperimentConfig& config);

/// Runs every (config, seed) trial and writes trace and summary CSVs under
/// manifest.out_dir. Errors go to `err` as single machine-readable lines.
int run(const RunManifest& manifest, std::ostream& log, std::ostream& err);

/// Same, with configs already parsed.
int run(const std::vector<bench::ExperimentConfig>& configs,
        const RunManifest& manifest, std::ostream& log, std::ostream& err);

/// Seven families with their allowed scopes, one per line.
std::string list_methods();

}  // namespace ballet::cli
