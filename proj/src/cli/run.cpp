#include "ballet/cli/run.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "ballet/cli/config.hpp"
#include "ballet/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ballet::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTraceHeader =
    "trial_seed,t,phase,chosen_index,observed_y,best_y,simple_regret,"
    "roi_ratio,roi_threshold,width_global,width_roi,width_intersect";

constexpr const char* kSummaryHeader =
    "t,phase,n,simple_regret_mean,simple_regret_se,roi_ratio_mean,"
    "roi_ratio_se,width_global_mean,width_global_se,width_roi_mean,"
    "width_roi_se,width_intersect_mean,width_intersect_se";

const char* phase_name(bench::Phase p) {
  return p == bench::Phase::Warmup ? "warmup" : "step";
}

bench::Phase parse_phase(const std::string& s) {
  if (s == "warmup") return bench::Phase::Warmup;
  if (s == "step") return bench::Phase::Step;
  throw InputError("unknown phase '" + s + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("bad number '" + s + "'");
  }
  return v;
}

template <class Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("bad integer '" + s + "'");
  }
  return v;
}

std::vector<std::vector<std::string>> rows_of(const std::string& text,
                                              const char* header,
                                              std::size_t columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw InputError("unexpected CSV header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) throw InputError("ragged CSV row");
    rows.push_back(std::move(cells));
  }
  return rows;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

void error_line(std::ostream& err, const char* kind, int code,
                const std::string& extra, const std::string& message) {
  err << "error kind=" << kind << " code=" << code;
  if (!extra.empty()) err << ' ' << extra;
  err << " message=" << quoted(message) << '\n';
}

struct Job {
  std::size_t config = 0;
  std::uint64_t seed = 0;
};

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string trace_csv(const bench::TrialTrace& trace) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const bench::TraceRecord& r : trace.records) {
    out << trace.seed << ',' << r.t << ',' << phase_name(r.phase) << ','
        << r.chosen << ',' << format_double(r.observed_y) << ','
        << format_double(r.best_y) << ',' << format_double(r.simple_regret)
        << ',' << format_double(r.roi_ratio) << ','
        << format_double(r.roi_threshold) << ','
        << format_double(r.width_global) << ',' << format_double(r.width_roi)
        << ',' << format_double(r.width_intersect) << '\n';
  }
  return out.str();
}

std::string summary_csv(const bench::Summary& summary) {
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  for (const bench::SummaryRow& r : summary.rows) {
    out << r.t << ',' << phase_name(r.phase) << ',' << r.n;
    for (const bench::MeanSe* m :
         {&r.simple_regret, &r.roi_ratio, &r.width_global, &r.width_roi,
          &r.width_intersect}) {
      out << ',' << format_double(m->mean) << ',' << format_double(m->se);
    }
    out << '\n';
  }
  return out.str();
}

bench::TrialTrace parse_trace_csv(const std::string& text) {
  bench::TrialTrace trace;
  bool first = true;
  for (const auto& c : rows_of(text, kTraceHeader, 12)) {
    const auto seed = parse_int<std::uint64_t>(c[0]);
    if (first) {
      trace.seed = seed;
      first = false;
    } else if (seed != trace.seed) {
      throw InputError("trace CSV mixes seeds");
    }
    bench::TraceRecord r;
    r.t = parse_int<long>(c[1]);
    r.phase = parse_phase(c[2]);
    r.chosen = parse_int<Index>(c[3]);
    r.observed_y = parse_double(c[4]);
    r.best_y = parse_double(c[5]);
    r.simple_regret = parse_double(c[6]);
    r.roi_ratio = parse_double(c[7]);
    r.roi_threshold = parse_double(c[8]);
    r.width_global = parse_double(c[9]);
    r.width_roi = parse_double(c[10]);
    r.width_intersect = parse_double(c[11]);
    trace.records.push_back(r);
  }
  return trace;
}

bench::Summary parse_summary_csv(const std::string& text) {
  bench::Summary summary;
  for (const auto& c : rows_of(text, kSummaryHeader, 13)) {
    bench::SummaryRow r;
    r.t = parse_int<long>(c[0]);
    r.phase = parse_phase(c[1]);
    r.n = parse_int<std::size_t>(c[2]);
    std::size_t k = 3;
    for (bench::MeanSe* m : {&r.simple_regret, &r.roi_ratio, &r.width_global,
                             &r.width_roi, &r.width_intersect}) {
      m->mean = parse_double(c[k++]);
      m->se = parse_double(c[k++]);
    }
    summary.rows.push_back(r);
  }
  return summary;
}

std::string trace_filename(const bench::ExperimentConfig& config,
                           std::uint64_t seed) {
  return config.name + ".seed" + std::to_string(seed) + ".trace.csv";
}

std::string summary_filename(const bench::ExperimentConfig& config) {
  return config.name + ".summary.csv";
}

std::string list_methods() {
  std::ostringstream out;
  for (const Family f : kAllFamilies) {
    out << to_string(f) << ':';
    const auto scopes = allowed_scopes(f);
    for (std::size_t i = 0; i < scopes.size(); ++i) {
      out << (i ? "," : " ") << to_string(scopes[i]);
    }
    out << '\n';
  }
  return out.str();
}

int run(const RunManifest& manifest, std::ostream& log, std::ostream& err) {
  std::vector<bench::ExperimentConfig> configs;
  try {
    configs = parse_config(manifest.config_path);
  } catch (const ConfigError& e) {
    error_line(err, "config", kExitConfig,
               e.key().empty() ? "" : "key=" + e.key(), e.what());
    return kExitConfig;
  } catch (const InputError& e) {
    error_line(err, "config", kExitConfig, "", e.what());
    return kExitConfig;
  }
  return run(configs, manifest, log, err);
}

int run(const std::vector<bench::ExperimentConfig>& raw_configs,
        const RunManifest& manifest, std::ostream& log, std::ostream& err) {
  if (raw_configs.empty()) {
    error_line(err, "config", kExitConfig, "", "no experiments");
    return kExitConfig;
  }
  if (manifest.jobs < 1) {
    error_line(err, "config", kExitConfig, "key=jobs", "--jobs must be >= 1");
    return kExitConfig;
  }

  std::vector<bench::ExperimentConfig> configs = raw_configs;
  for (auto& c : configs) {
    for (auto& s : c.seeds) s += manifest.seed_offset;
  }

  const fs::path out_dir(manifest.out_dir);
  std::vector<Job> jobs;
  std::vector<fs::path> targets;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    targets.push_back(out_dir / summary_filename(configs[i]));
    for (const std::uint64_t s : configs[i].seeds) {
      jobs.push_back({i, s});
      targets.push_back(out_dir / trace_filename(configs[i], s));
    }
  }

  try {
    fs::create_directories(out_dir);
    if (!manifest.overwrite) {
      for (const fs::path& p : targets) {
        if (fs::exists(p)) {
          error_line(err, "io", kExitRuntime, "path=" + p.string(),
                     "output exists; pass --overwrite to replace it");
          return kExitRuntime;
        }
      }
    }
  } catch (const fs::filesystem_error& e) {
    error_line(err, "io", kExitRuntime, "", e.what());
    return kExitRuntime;
  }

  // Tabular pools are read once per config; synthetic pools depend on the
  // seed and are built inside each trial.
  std::vector<std::optional<CandidatePool>> pools(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (configs[i].objective.kind != bench::ObjectiveKind::Tabular) continue;
    try {
      pools[i] = bench::load_pool_csv(configs[i].objective.path);
    } catch (const InputError& e) {
      error_line(err, "config", kExitConfig, "key=path", e.what());
      return kExitConfig;
    }
  }

  std::vector<std::optional<bench::TrialTrace>> results(jobs.size());
  std::vector<std::string> failures(jobs.size());
  const long n_jobs = static_cast<long>(jobs.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(manifest.jobs)
  for (long j = 0; j < n_jobs; ++j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    const bench::ExperimentConfig& config = configs[job.config];
    try {
      bench::TrialTrace trace =
          pools[job.config]
              ? bench::run_trial(config, *pools[job.config], job.seed)
              : bench::run_trial(config, job.seed);
      write_atomic(out_dir / trace_filename(config, job.seed),
                   trace_csv(trace));
      results[static_cast<std::size_t>(j)] = std::move(trace);
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(j)] = e.what();
    }
  }

  std::size_t failed = 0;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (failures[j].empty()) continue;
    ++failed;
    error_line(err, "trial", kExitPartial,
               "config=" + configs[jobs[j].config].name +
                   " seed=" + std::to_string(jobs[j].seed),
               failures[j]);
  }

  try {
    for (std::size_t i = 0; i < configs.size(); ++i) {
      std::vector<bench::TrialTrace> ok;
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].config == i && results[j]) ok.push_back(*results[j]);
      }
      if (ok.empty()) continue;
      write_atomic(out_dir / summary_filename(configs[i]),
                   summary_csv(bench::aggregate(ok)));
      log << configs[i].name << ": " << ok.size() << "/"
          << configs[i].seeds.size() << " trials\n";
    }
  } catch (const std::exception& e) {
    error_line(err, "io", kExitRuntime, "", e.what());
    return kExitRuntime;
  }

  if (failed == 0) return kExitOk;
  return failed == jobs.size() ? kExitRuntime : kExitPartial;
}

}  // namespace ballet::cli
