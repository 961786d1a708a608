#include "ballet/core/step.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "ballet/errors.hpp"

namespace ballet {

namespace {

struct TrainingSet {
  gp::Matrix x;
  gp::Vector y;
};

TrainingSet training_set(const CandidatePool& pool,
                         std::span<const Observation> obs) {
  std::vector<Index> idx;
  idx.reserve(obs.size());
  gp::Vector y(static_cast<Index>(obs.size()));
  for (std::size_t i = 0; i < obs.size(); ++i) {
    idx.push_back(obs[i].index);
    y[static_cast<Index>(i)] = obs[i].y;
  }
  return {gather_rows(pool.features, idx), std::move(y)};
}

gp::PosteriorSummary subset(const gp::PosteriorSummary& full,
                            std::span<const Index> indices) {
  gp::PosteriorSummary out{gp::Vector(static_cast<Index>(indices.size())),
                           gp::Vector(static_cast<Index>(indices.size()))};
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.mean[static_cast<Index>(k)] = full.mean[indices[k]];
    out.std[static_cast<Index>(k)] = full.std[indices[k]];
  }
  return out;
}

gp::Hyperparams fit_hyper(const TrainingSet& data, const gp::Hyperparams& init,
                          const BalletConfig& config, gp::Rng rng,
                          bool& failed) {
  if (data.y.size() < 2 || config.hyperopt.restarts <= 0) return init;
  const gp::Vector targets =
      config.standardize ? gp::standardize_targets(data.y).z : data.y;
  const gp::HyperoptResult res =
      gp::optimize_hyperparams(data.x, targets, init, config.hyperopt, rng);
  if (res.failed) {
    failed = true;
    return init;
  }
  return res.hyper;
}

double width_of(const gp::Vector& lcb, const gp::Vector& ucb) {
  if (lcb.size() == 0) return 0.0;
  return std::max(ucb.maxCoeff() - lcb.maxCoeff(), 0.0);
}

std::vector<Index> unselected(const std::vector<Index>& candidates,
                              const std::vector<char>& taken) {
  std::vector<Index> out;
  out.reserve(candidates.size());
  for (Index i : candidates) {
    if (!taken[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

}  // namespace

void validate(const BalletConfig& config) {
  validate(config.acquisition);
  gp::validate(config.initial_hyper);
  if (!(config.beta_sqrt_filter >= 0.0)) {
    throw InputError("beta_sqrt_filter must be >= 0");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw InputError("delta must lie in (0, 1)");
  }
  if (!(config.beta_trace >= 0.0)) throw InputError("beta_trace must be >= 0");
  if (config.refit_interval < 1) throw InputError("refit_interval must be >= 1");
  if (config.ts_sample_cap < 1) throw InputError("ts_sample_cap must be >= 1");
}

gp::Rng stream_rng(std::uint64_t seed, long t, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t),
                    static_cast<std::uint32_t>(stream)};
  return gp::Rng(seq);
}

BalletState make_state(const CandidatePool& pool,
                       std::vector<Observation> warmup,
                       const BalletConfig& config, std::uint64_t seed) {
  validate(config);
  if (warmup.empty()) throw InputError("make_state: need a warm-up observation");
  std::unordered_set<Index> seen;
  for (const Observation& o : warmup) {
    if (o.index < 0 || o.index >= pool.size()) {
      throw InputError("make_state: warm-up index out of range");
    }
    if (!seen.insert(o.index).second) {
      throw InputError("make_state: duplicate warm-up index " +
                       std::to_string(o.index));
    }
  }
  BalletState state;
  state.pool = &pool;
  state.seed = seed;
  state.selected = std::move(warmup);
  state.global_hyper = config.initial_hyper;
  state.roi_hyper = config.initial_hyper;
  return state;
}

void update_models(BalletState& state, const BalletConfig& config) {
  const CandidatePool& pool = *state.pool;
  const long t = state.t + 1;
  const bool refit = (t - 1) % config.refit_interval == 0;
  const gp::FitOptions fit_opts{config.standardize};

  const TrainingSet all = training_set(pool, state.selected);
  if (refit) {
    state.global_hyper =
        fit_hyper(all, state.global_hyper, config,
                  stream_rng(state.seed, t, Stream::GlobalHyper),
                  state.hyperopt_failed);
  }
  state.global_model = gp::fit_posterior(all.x, all.y, state.global_hyper,
                                         fit_opts);
  state.global_post = gp::posterior_mean_var(state.global_model, pool.features);

  const double beta_filter =
      config.filter_with_schedule
          ? std::sqrt(beta_schedule(t, pool.size(), config.delta))
          : config.beta_sqrt_filter;
  const ConfidenceBounds global_bounds = confidence_bounds(
      state.global_post, iota_indices(pool.size()), beta_filter);
  state.roi = filter_roi(global_bounds);

  const std::vector<Observation> inside =
      partition_observations(state.selected, state.roi);
  state.roi_shares_global =
      inside.size() == state.selected.size() || inside.size() < 2;
  if (state.roi_shares_global) {
    state.roi_model = state.global_model;
    state.roi_hyper = state.global_hyper;
    state.roi_post = subset(state.global_post, state.roi.indices);
  } else {
    const TrainingSet local = training_set(pool, inside);
    if (refit) {
      state.roi_hyper =
          fit_hyper(local, state.global_hyper, config,
                    stream_rng(state.seed, t, Stream::RoiHyper),
                    state.hyperopt_failed);
    }
    state.roi_model =
        gp::fit_posterior(local.x, local.y, state.roi_hyper, fit_opts);
    state.roi_post = gp::posterior_mean_var(
        state.roi_model, gather_rows(pool.features, state.roi.indices));
  }

  if (config.intersection == IntersectionMode::Historical) {
    const double b = config.acquisition.beta_sqrt_acq;
    const IntersectedBounds step = intersect_bounds(
        confidence_bounds(subset(state.global_post, state.roi.indices),
                          state.roi.indices, b, ModelTag::Global),
        confidence_bounds(state.roi_post, state.roi.indices, b, ModelTag::Roi),
        state.roi);
    state.historical = state.historical
                           ? intersect_bounds_historical(*state.historical, step)
                           : step;
    state.historical->mode = IntersectionMode::Historical;
  } else {
    state.historical.reset();
  }
}

ScoredCandidates acquisition_scores(const BalletState& state,
                                    const BalletConfig& config,
                                    const AcquisitionSpec& raw_spec,
                                    gp::Rng& rng) {
  validate(raw_spec);
  const AcquisitionSpec spec = canonical(raw_spec);
  const CandidatePool& pool = *state.pool;

  std::vector<char> taken(static_cast<std::size_t>(pool.size()), 0);
  double best_y = -std::numeric_limits<double>::infinity();
  for (const Observation& o : state.selected) {
    taken[static_cast<std::size_t>(o.index)] = 1;
    best_y = std::max(best_y, o.y);
  }

  ScoredCandidates out;
  out.eligible = spec.scope == Scope::Global
                     ? unselected(iota_indices(pool.size()), taken)
                     : unselected(state.roi.indices, taken);
  if (out.eligible.empty()) {
    throw PoolExhausted("no unselected candidates in scope " +
                        std::string(to_string(spec.scope)));
  }

  // Mean/std of the scoped model at each eligible candidate.
  const std::size_t m = out.eligible.size();
  gp::PosteriorSummary post{gp::Vector(static_cast<Index>(m)),
                            gp::Vector(static_cast<Index>(m))};
  std::vector<Index> roi_pos(m, -1);
  for (std::size_t k = 0; k < m; ++k) {
    const Index idx = out.eligible[k];
    if (spec.scope == Scope::Global) {
      post.mean[static_cast<Index>(k)] = state.global_post.mean[idx];
      post.std[static_cast<Index>(k)] = state.global_post.std[idx];
    } else {
      const auto it = std::lower_bound(state.roi.indices.begin(),
                                       state.roi.indices.end(), idx);
      const Index p = static_cast<Index>(it - state.roi.indices.begin());
      roi_pos[k] = p;
      post.mean[static_cast<Index>(k)] = state.roi_post.mean[p];
      post.std[static_cast<Index>(k)] = state.roi_post.std[p];
    }
  }

  const double b = spec.beta_sqrt_acq;
  out.scores.resize(m);
  switch (spec.family) {
    case Family::CIWidth:
    case Family::UCB: {
      const bool width = spec.family == Family::CIWidth;
      if (spec.scope != Scope::Intersect) {
        for (std::size_t k = 0; k < m; ++k) {
          const double mu = post.mean[static_cast<Index>(k)];
          const double sd = post.std[static_cast<Index>(k)];
          out.scores[k] = width ? (mu + b * sd) - (mu - b * sd) : mu + b * sd;
        }
        break;
      }
      for (std::size_t k = 0; k < m; ++k) {
        const Index idx = out.eligible[k];
        const Index p = roi_pos[k];
        double lo = 0.0, hi = 0.0;
        bool empty = false;
        if (state.historical && b == config.acquisition.beta_sqrt_acq) {
          lo = state.historical->lcb[p];
          hi = state.historical->ucb[p];
          empty = state.historical->empty[static_cast<std::size_t>(p)];
        } else {
          const double gm = state.global_post.mean[idx];
          const double gs = state.global_post.std[idx];
          const double rm = state.roi_post.mean[p];
          const double rs = state.roi_post.std[p];
          lo = std::max(gm - b * gs, rm - b * rs);
          hi = std::min(gm + b * gs, rm + b * rs);
          empty = hi < lo;
        }
        out.scores[k] = width ? (empty ? 0.0 : hi - lo) : hi;
      }
      break;
    }
    case Family::EI:
      for (std::size_t k = 0; k < m; ++k) {
        out.scores[k] = expected_improvement(post.mean[static_cast<Index>(k)],
                                             post.std[static_cast<Index>(k)],
                                             best_y);
      }
      break;
    case Family::TS: {
      if (static_cast<Index>(m) > config.ts_sample_cap) {
        std::vector<Index> keep(m);
        std::iota(keep.begin(), keep.end(), Index{0});
        std::shuffle(keep.begin(), keep.end(), rng);
        keep.resize(static_cast<std::size_t>(config.ts_sample_cap));
        std::sort(keep.begin(), keep.end());
        std::vector<Index> sub;
        sub.reserve(keep.size());
        for (Index k : keep) sub.push_back(out.eligible[static_cast<std::size_t>(k)]);
        out.eligible = std::move(sub);
      }
      const gp::Model& model = spec.scope == Scope::Global ? state.global_model
                                                           : state.roi_model;
      const gp::Vector draw = gp::sample_posterior(
          model, gather_rows(pool.features, out.eligible), rng);
      out.scores.assign(draw.data(), draw.data() + draw.size());
      break;
    }
    case Family::ICI:
    case Family::RCI:
    case Family::RTS:
      break;  // removed by canonical()
  }
  return out;
}

double ci_width_estimate(const BalletState& state, Scope scope,
                         double beta_sqrt) {
  const auto& g = state.global_post;
  switch (scope) {
    case Scope::Global:
      return width_of(g.mean - beta_sqrt * g.std, g.mean + beta_sqrt * g.std);
    case Scope::Roi: {
      const auto& r = state.roi_post;
      return width_of(r.mean - beta_sqrt * r.std, r.mean + beta_sqrt * r.std);
    }
    case Scope::Intersect: {
      const gp::PosteriorSummary gs = subset(g, state.roi.indices);
      const auto& r = state.roi_post;
      const gp::Vector lcb = (gs.mean - beta_sqrt * gs.std)
                                 .cwiseMax(r.mean - beta_sqrt * r.std);
      const gp::Vector ucb = (gs.mean + beta_sqrt * gs.std)
                                 .cwiseMin(r.mean + beta_sqrt * r.std);
      return width_of(lcb, ucb);
    }
  }
  return 0.0;
}

StepDiagnostics ballet_step(BalletState& state, const BalletConfig& config,
                            const Observer& observe) {
  if (state.selected.empty()) {
    throw InputError("ballet_step: state needs at least one observation");
  }
  const long t = state.t + 1;
  StepDiagnostics diag;
  diag.t = t;
  try {
    update_models(state, config);

    gp::Rng rng = stream_rng(state.seed, t, Stream::Acquisition);
    ScoredCandidates scored;
    try {
      scored = acquisition_scores(state, config, config.acquisition, rng);
    } catch (const PoolExhausted&) {
      if (canonical(config.acquisition).scope == Scope::Global) throw;
      AcquisitionSpec wide = canonical(config.acquisition);
      wide.scope = Scope::Global;
      scored = acquisition_scores(state, config, wide, rng);
      diag.roi_exhausted = true;
    }
    diag.chosen = select_next(scored.scores, scored.eligible);
  } catch (const NumericalError& e) {
    std::ostringstream msg;
    msg << "iteration " << t << ": " << e.what();
    throw NumericalError(msg.str(), e.final_jitter());
  }

  diag.y = observe(diag.chosen);
  state.selected.push_back({diag.chosen, diag.y});
  state.t = t;

  const double trace_b = std::sqrt(config.beta_trace);
  diag.roi_ratio = state.roi.ratio;
  diag.roi_threshold = state.roi.threshold;
  diag.width_global = ci_width_estimate(state, Scope::Global, trace_b);
  diag.width_roi = ci_width_estimate(state, Scope::Roi, trace_b);
  diag.width_intersect = ci_width_estimate(state, Scope::Intersect, trace_b);
  diag.roi_shares_global = state.roi_shares_global;
  return diag;
}

}  // namespace ballet
