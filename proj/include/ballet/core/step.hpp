#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ballet/core/acquisition.hpp"
#include "ballet/core/bounds.hpp"
#include "ballet/gp/hyperopt.hpp"

namespace ballet {

struct BalletConfig {
  AcquisitionSpec acquisition;
  /// beta^{1/2} used only for the superlevel-set filter.
  double beta_sqrt_filter = 0.2;
  /// Replace beta_sqrt_filter by sqrt(beta_schedule(t, |D|, delta)).
  bool filter_with_schedule = false;
  double delta = 0.2;
  /// beta (not its root) for the f* interval-width diagnostics.
  double beta_trace = 2.0;
  /// Hyperparameters are re-optimized when (t - 1) % refit_interval == 0.
  int refit_interval = 1;
  IntersectionMode intersection = IntersectionMode::PerStep;
  gp::Hyperparams initial_hyper;
  gp::HyperoptBudget hyperopt;
  bool standardize = true;
  /// Joint Thompson draws use at most this many candidates.
  Index ts_sample_cap = 2000;
};

void validate(const BalletConfig& config);

/// Independent random streams within one trial, keyed by (seed, t, stream),
/// so one consumer never shifts another's draws.
enum class Stream : std::uint64_t {
  Warmup = 1,
  GlobalHyper = 2,
  RoiHyper = 3,
  Acquisition = 4,
  Noise = 5,
  Pool = 6,
};

gp::Rng stream_rng(std::uint64_t seed, long t, Stream stream);

struct BalletState {
  const CandidatePool* pool = nullptr;
  std::uint64_t seed = 0;
  /// Number of completed adaptive steps.
  long t = 0;
  std::vector<Observation> selected;

  gp::Hyperparams global_hyper;
  gp::Hyperparams roi_hyper;
  gp::Model global_model;
  gp::Model roi_model;
  /// ROI model reuses the global model: either the ROI holds every
  /// observation or it holds fewer than two.
  bool roi_shares_global = true;
  RegionOfInterest roi;

  /// Global posterior at every pool index (position == pool index).
  gp::PosteriorSummary global_post;
  /// ROI posterior at roi.indices.
  gp::PosteriorSummary roi_post;
  std::optional<IntersectedBounds> historical;
  bool hyperopt_failed = false;
};

/// Starts from warm-up observations (at least one, distinct indices).
BalletState make_state(const CandidatePool& pool,
                       std::vector<Observation> warmup,
                       const BalletConfig& config, std::uint64_t seed);

/// Refits both GPs and the ROI for iteration state.t + 1.
void update_models(BalletState& state, const BalletConfig& config);

struct ScoredCandidates {
  std::vector<Index> eligible;
  std::vector<double> scores;
};

/// Scores the candidates eligible under `spec.scope` that have not been
/// selected yet. Requires update_models to have run. Throws PoolExhausted
/// when nothing is eligible.
ScoredCandidates acquisition_scores(const BalletState& state,
                                    const BalletConfig& config,
                                    const AcquisitionSpec& spec,
                                    gp::Rng& rng);

/// Width of the interval for f*: max UCB - max LCB over the scope's index
/// set, clamped at 0.
double ci_width_estimate(const BalletState& state, Scope scope,
                         double beta_sqrt);

struct StepDiagnostics {
  long t = 0;
  Index chosen = -1;
  double y = 0.0;
  double roi_ratio = 1.0;
  double roi_threshold = 0.0;
  double width_global = 0.0;
  double width_roi = 0.0;
  double width_intersect = 0.0;
  bool roi_shares_global = false;
  /// The ROI had no unselected candidates; the step fell back to the
  /// global scope.
  bool roi_exhausted = false;
};

using Observer = std::function<double(Index)>;

/// One iteration: fit, filter, partition, fit ROI GP, score, select, observe.
StepDiagnostics ballet_step(BalletState& state, const BalletConfig& config,
                            const Observer& observe);

}  // namespace ballet
