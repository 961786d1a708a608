#include "ballet/bench/trial.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <limits>
#include <random>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace ballet::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  const double n = static_cast<double>(v.size());
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

}  // namespace

void validate(const ExperimentConfig& config) {
  const auto fail = [&](const std::string& field, const std::string& why) {
    throw InputError(config.name + ": " + field + ": " + why);
  };
  validate(config.acquisition);
  if (config.horizon < 0) fail("T", "must be >= 0");
  if (config.n_warmup < 1) fail("n_warmup", "must be >= 1");
  if (config.seeds.empty()) fail("seeds", "must not be empty");
  if (std::set<std::uint64_t>(config.seeds.begin(), config.seeds.end())
          .size() != config.seeds.size()) {
    fail("seeds", "duplicate seed");
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) fail("delta", "must lie in (0, 1)");
  if (!(config.beta_sqrt_filter >= 0.0)) fail("beta_sqrt_filter", "must be >= 0");
  if (!(config.beta_trace >= 0.0)) fail("beta_trace", "must be >= 0");
  if (config.refit_interval < 1) fail("refit_interval", "must be >= 1");
  if (!(config.objective.noise_std >= 0.0)) fail("noise_std", "must be >= 0");
  if (config.hyperopt.restarts < 0 || config.hyperopt.sweeps < 0) {
    fail("hyperopt", "budget must be >= 0");
  }
  if (config.objective.kind == ObjectiveKind::Tabular) {
    if (config.objective.path.empty()) fail("path", "required for tabular");
  } else {
    const Index n = effective_pool_size(config);
    if (n < config.n_warmup + config.horizon) {
      fail("pool_size", "insufficient pool size " + std::to_string(n) +
                            " for " + std::to_string(config.n_warmup) +
                            " warm-up points and T=" +
                            std::to_string(config.horizon));
    }
  }
}

Index effective_pool_size(const ExperimentConfig& config) {
  return config.pool_size > 0 ? config.pool_size
                              : default_pool_size(config.objective);
}

std::string config_hash(const ExperimentConfig& c) {
  std::ostringstream s;
  s << "objective=" << objective_name(c.objective) << ";dim=" << c.objective.dim
    << ";path=" << c.objective.path
    << ";noise_std=" << shortest(c.objective.noise_std)
    << ";method=" << method_name(c.acquisition)
    << ";beta_sqrt_acq=" << shortest(c.acquisition.beta_sqrt_acq)
    << ";kernel=" << (c.kernel == KernelFamily::Rbf ? "rbf" : "linear")
    << ";T=" << c.horizon << ";n_warmup=" << c.n_warmup
    << ";delta=" << shortest(c.delta)
    << ";beta_sqrt_filter=" << shortest(c.beta_sqrt_filter)
    << ";filter_schedule=" << c.filter_with_schedule
    << ";beta_trace=" << shortest(c.beta_trace)
    << ";refit_interval=" << c.refit_interval
    << ";pool_size=" << effective_pool_size(c) << ";intersection="
    << (c.intersection == IntersectionMode::PerStep ? "per_step" : "historical")
    << ";restarts=" << c.hyperopt.restarts << ";sweeps=" << c.hyperopt.sweeps
    << ";standardize=" << c.standardize;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(s.str())));
  return buf;
}

BalletConfig to_ballet_config(const ExperimentConfig& c, Index dim) {
  BalletConfig b;
  b.acquisition = c.acquisition;
  b.beta_sqrt_filter = c.beta_sqrt_filter;
  b.filter_with_schedule = c.filter_with_schedule;
  b.delta = c.delta;
  b.beta_trace = c.beta_trace;
  b.refit_interval = c.refit_interval;
  b.intersection = c.intersection;
  b.hyperopt = c.hyperopt;
  b.standardize = c.standardize;
  if (c.kernel == KernelFamily::Rbf) {
    // Starting lengthscale grows like the typical pairwise distance.
    b.initial_hyper.kernel =
        gp::RbfKernel{1.0, 0.2 * std::sqrt(static_cast<double>(dim))};
  } else {
    b.initial_hyper.kernel = gp::LinearKernel{1.0, 1.0};
  }
  b.initial_hyper.noise_variance = 1e-2;
  return b;
}

TrialTrace run_trial(const ExperimentConfig& config, std::uint64_t seed) {
  validate(config);
  gp::Rng rng = stream_rng(seed, 0, Stream::Pool);
  const CandidatePool pool =
      generate_pool(config.objective, effective_pool_size(config), rng);
  return run_trial(config, pool, seed);
}

TrialTrace run_trial(const ExperimentConfig& config, const CandidatePool& pool,
                     std::uint64_t seed) {
  validate(config);
  if (!pool.labels) throw InputError("run_trial: pool has no labels");
  if (pool.size() < config.n_warmup + config.horizon) {
    throw InputError("run_trial: insufficient pool size " +
                     std::to_string(pool.size()));
  }
  const gp::Vector& labels = *pool.labels;

  TrialTrace trace;
  trace.seed = seed;
  trace.config_hash = config_hash(config);

  gp::Rng noise_rng = stream_rng(seed, 0, Stream::Noise);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double noise_std = config.objective.noise_std;
  const auto observe = [&](Index i) {
    const double y = labels[i];
    return noise_std > 0.0 ? y + noise_std * normal(noise_rng) : y;
  };

  gp::Rng warm_rng = stream_rng(seed, 0, Stream::Warmup);
  const std::vector<Index> all = iota_indices(pool.size());
  std::sample(all.begin(), all.end(), std::back_inserter(trace.warmup_indices),
              config.n_warmup, warm_rng);

  std::vector<Observation> warmup;
  double best_y = -std::numeric_limits<double>::infinity();
  double best_label = -std::numeric_limits<double>::infinity();
  Index best_index = -1;
  for (Index i : trace.warmup_indices) {
    const double y = observe(i);
    warmup.push_back({i, y});
    if (y > best_y) {
      best_y = y;
      best_index = i;
    }
    best_label = std::max(best_label, labels[i]);
  }
  trace.records.push_back({0, Phase::Warmup, best_index, best_y, best_y,
                           pool.f_star - best_label, 1.0, kNaN, kNaN, kNaN,
                           kNaN});

  const BalletConfig bconfig = to_ballet_config(config, pool.dim());
  BalletState state = make_state(pool, std::move(warmup), bconfig, seed);
  for (long t = 1; t <= config.horizon; ++t) {
    const StepDiagnostics d = ballet_step(state, bconfig, observe);
    best_y = std::max(best_y, d.y);
    best_label = std::max(best_label, labels[d.chosen]);
    trace.records.push_back({t, Phase::Step, d.chosen, d.y, best_y,
                             pool.f_star - best_label, d.roi_ratio,
                             d.roi_threshold, d.width_global, d.width_roi,
                             d.width_intersect});
  }
  return trace;
}

Summary aggregate(std::span<const TrialTrace> traces) {
  if (traces.empty()) throw InputError("aggregate: no traces");
  std::vector<const TrialTrace*> sorted;
  for (const TrialTrace& t : traces) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [](const TrialTrace* a, const TrialTrace* b) {
              return a->seed < b->seed;
            });
  const TrialTrace& first = *sorted.front();
  for (const TrialTrace* t : sorted) {
    if (t->config_hash != first.config_hash) {
      throw InputError("aggregate: traces come from different configs");
    }
    if (t->records.size() != first.records.size()) {
      throw InputError("aggregate: traces have different horizons");
    }
  }

  Summary out;
  out.config_hash = first.config_hash;
  for (std::size_t r = 0; r < first.records.size(); ++r) {
    std::vector<double> regret, ratio, wg, wr, wi;
    for (const TrialTrace* t : sorted) {
      const TraceRecord& rec = t->records[r];
      regret.push_back(rec.simple_regret);
      ratio.push_back(rec.roi_ratio);
      wg.push_back(rec.width_global);
      wr.push_back(rec.width_roi);
      wi.push_back(rec.width_intersect);
    }
    SummaryRow row;
    row.t = first.records[r].t;
    row.phase = first.records[r].phase;
    row.n = sorted.size();
    row.simple_regret = mean_se(regret);
    row.roi_ratio = mean_se(ratio);
    row.width_global = mean_se(wg);
    row.width_roi = mean_se(wr);
    row.width_intersect = mean_se(wi);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace ballet::bench
