#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ballet/bench/objectives.hpp"
#include "ballet/core/step.hpp"

namespace ballet::bench {

enum class KernelFamily { Rbf, Linear };

struct ExperimentConfig {
  std::string name = "experiment";
  ObjectiveSpec objective;
  AcquisitionSpec acquisition;
  KernelFamily kernel = KernelFamily::Rbf;
  long horizon = 40;
  int n_warmup = 10;
  std::vector<std::uint64_t> seeds;
  double delta = 0.2;
  double beta_sqrt_filter = 0.2;
  bool filter_with_schedule = false;
  double beta_trace = 2.0;
  int refit_interval = 1;
  /// 0 selects default_pool_size(objective).
  Index pool_size = 0;
  IntersectionMode intersection = IntersectionMode::PerStep;
  gp::HyperoptBudget hyperopt;
  bool standardize = true;
};

/// Throws InputError naming the offending field.
void validate(const ExperimentConfig& config);

Index effective_pool_size(const ExperimentConfig& config);

/// Everything but the seeds; traces of one config share it.
std::string config_hash(const ExperimentConfig& config);

BalletConfig to_ballet_config(const ExperimentConfig& config, Index dim);

enum class Phase { Warmup, Step };

struct TraceRecord {
  long t = 0;
  Phase phase = Phase::Step;
  Index chosen = -1;
  double observed_y = 0.0;
  double best_y = 0.0;
  /// f_star minus the best true label selected so far.
  double simple_regret = 0.0;
  double roi_ratio = 1.0;
  double roi_threshold = 0.0;
  double width_global = 0.0;
  double width_roi = 0.0;
  double width_intersect = 0.0;
};

struct TrialTrace {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<Index> warmup_indices;
  /// One warm-up summary row, then one row per step.
  std::vector<TraceRecord> records;
};

/// Pool generation is seeded from `seed` too, so a trial is a pure function
/// of (config, seed).
TrialTrace run_trial(const ExperimentConfig& config, std::uint64_t seed);

/// Same, on an already built pool (which must carry labels).
TrialTrace run_trial(const ExperimentConfig& config, const CandidatePool& pool,
                     std::uint64_t seed);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

struct SummaryRow {
  long t = 0;
  Phase phase = Phase::Step;
  std::size_t n = 0;
  MeanSe simple_regret;
  MeanSe roi_ratio;
  MeanSe width_global;
  MeanSe width_roi;
  MeanSe width_intersect;
};

struct Summary {
  std::string config_hash;
  std::vector<SummaryRow> rows;
};

/// Per-iteration mean and standard error (sample std / sqrt(n), 0 for a
/// single trace). Traces are folded in seed order, so the input order does
/// not matter.
Summary aggregate(std::span<const TrialTrace> traces);

}  // namespace ballet::bench
