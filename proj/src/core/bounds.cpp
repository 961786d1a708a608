#include "ballet/core/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ballet/errors.hpp"

namespace ballet {

namespace {

Index position_of(const std::vector<Index>& sorted, Index pool_index,
                  const char* where) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), pool_index);
  if (it == sorted.end() || *it != pool_index) {
    throw InputError(std::string(where) + ": pool index " +
                     std::to_string(pool_index) + " not covered");
  }
  return static_cast<Index>(it - sorted.begin());
}

void check_sorted(const std::vector<Index>& v, const char* where) {
  if (!std::is_sorted(v.begin(), v.end()) ||
      std::adjacent_find(v.begin(), v.end()) != v.end()) {
    throw InputError(std::string(where) + ": indices must be sorted and unique");
  }
}

}  // namespace

bool RegionOfInterest::contains(Index i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

double IntersectedBounds::width(Index pos) const {
  return empty[static_cast<std::size_t>(pos)] ? 0.0 : ucb[pos] - lcb[pos];
}

double beta_schedule(long t, Index pool_size, double delta) {
  if (t < 1) throw InputError("beta_schedule: t must be >= 1");
  if (pool_size < 1) throw InputError("beta_schedule: pool_size must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InputError("beta_schedule: delta must lie in (0, 1)");
  }
  const double td = static_cast<double>(t);
  const double pi_t = std::numbers::pi * std::numbers::pi * td * td / 6.0;
  return 2.0 * std::log(2.0 * static_cast<double>(pool_size) * pi_t / delta);
}

ConfidenceBounds confidence_bounds(const gp::PosteriorSummary& posterior,
                                   std::vector<Index> indices,
                                   double beta_sqrt, ModelTag model) {
  if (!(beta_sqrt >= 0.0)) throw InputError("beta_sqrt must be >= 0");
  if (posterior.mean.size() != static_cast<Index>(indices.size())) {
    throw InputError("confidence_bounds: posterior and index set disagree");
  }
  check_sorted(indices, "confidence_bounds");
  ConfidenceBounds out;
  out.indices = std::move(indices);
  out.lcb = posterior.mean - beta_sqrt * posterior.std;
  out.ucb = posterior.mean + beta_sqrt * posterior.std;
  out.beta_sqrt = beta_sqrt;
  out.model = model;
  return out;
}

ConfidenceBounds confidence_bounds(const gp::Model& model,
                                   const CandidatePool& pool,
                                   std::vector<Index> indices,
                                   double beta_sqrt, ModelTag model_tag) {
  const gp::PosteriorSummary post =
      gp::posterior_mean_var(model, gather_rows(pool.features, indices));
  return confidence_bounds(post, std::move(indices), beta_sqrt, model_tag);
}

RegionOfInterest filter_roi(const ConfidenceBounds& global_bounds) {
  if (global_bounds.size() == 0) throw InputError("filter_roi: empty bounds");
  RegionOfInterest roi;
  roi.threshold = global_bounds.lcb.maxCoeff();
  for (Index i = 0; i < global_bounds.size(); ++i) {
    if (global_bounds.ucb[i] >= roi.threshold) {
      roi.indices.push_back(global_bounds.indices[static_cast<std::size_t>(i)]);
    }
  }
  roi.ratio = static_cast<double>(roi.indices.size()) /
              static_cast<double>(global_bounds.size());
  return roi;
}

std::vector<Observation> partition_observations(
    std::span<const Observation> selected, const RegionOfInterest& roi) {
  std::vector<Observation> out;
  for (const Observation& obs : selected) {
    if (roi.contains(obs.index)) out.push_back(obs);
  }
  return out;
}

IntersectedBounds intersect_bounds(const ConfidenceBounds& global_bounds,
                                   const ConfidenceBounds& roi_bounds,
                                   const RegionOfInterest& roi) {
  const Index m = static_cast<Index>(roi.indices.size());
  IntersectedBounds out;
  out.indices = roi.indices;
  out.lcb.resize(m);
  out.ucb.resize(m);
  out.empty.assign(static_cast<std::size_t>(m), false);
  out.mode = IntersectionMode::PerStep;
  for (Index k = 0; k < m; ++k) {
    const Index idx = roi.indices[static_cast<std::size_t>(k)];
    const Index g = position_of(global_bounds.indices, idx, "intersect_bounds");
    const Index r = position_of(roi_bounds.indices, idx, "intersect_bounds");
    out.lcb[k] = std::max(global_bounds.lcb[g], roi_bounds.lcb[r]);
    out.ucb[k] = std::min(global_bounds.ucb[g], roi_bounds.ucb[r]);
    out.empty[static_cast<std::size_t>(k)] = out.ucb[k] < out.lcb[k];
  }
  return out;
}

IntersectedBounds intersect_bounds_historical(const IntersectedBounds& prev,
                                              const IntersectedBounds& step) {
  IntersectedBounds out = step;
  out.mode = IntersectionMode::Historical;
  for (Index k = 0; k < step.size(); ++k) {
    const Index idx = step.indices[static_cast<std::size_t>(k)];
    const auto it =
        std::lower_bound(prev.indices.begin(), prev.indices.end(), idx);
    if (it == prev.indices.end() || *it != idx) continue;
    const Index p = static_cast<Index>(it - prev.indices.begin());
    out.lcb[k] = std::max(prev.lcb[p], step.lcb[k]);
    out.ucb[k] = std::min(prev.ucb[p], step.ucb[k]);
    out.empty[static_cast<std::size_t>(k)] =
        prev.empty[static_cast<std::size_t>(p)] || out.ucb[k] < out.lcb[k];
  }
  return out;
}

}  // namespace ballet
