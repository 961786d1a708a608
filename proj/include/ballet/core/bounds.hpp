#pragma once

#include <span>
#include <vector>

#include "ballet/core/pool.hpp"
#include "ballet/gp/model.hpp"

namespace ballet {

enum class ModelTag { Global, Roi };

/// Point-wise [lcb, ucb] = mean -/+ beta_sqrt * std over a sorted set of
/// pool indices.
struct ConfidenceBounds {
  std::vector<Index> indices;
  gp::Vector lcb;
  gp::Vector ucb;
  double beta_sqrt = 0.0;
  ModelTag model = ModelTag::Global;

  Index size() const { return static_cast<Index>(indices.size()); }
};

/// Superlevel set of the global bounds: every pool index whose UCB reaches
/// the largest LCB.
struct RegionOfInterest {
  std::vector<Index> indices;  // sorted
  double threshold = 0.0;
  double ratio = 1.0;

  bool contains(Index i) const;
};

struct Observation {
  Index index = 0;
  double y = 0.0;
};

enum class IntersectionMode { PerStep, Historical };

/// Intersection of several confidence intervals. Entries whose raw
/// intersection is empty keep their raw (crossed) bounds, are flagged in
/// `empty`, and report width 0.
struct IntersectedBounds {
  std::vector<Index> indices;
  gp::Vector lcb;
  gp::Vector ucb;
  std::vector<bool> empty;
  IntersectionMode mode = IntersectionMode::PerStep;

  Index size() const { return static_cast<Index>(indices.size()); }
  double width(Index pos) const;
};

/// 2 log(2 |D| pi_t / delta) with pi_t = pi^2 t^2 / 6.
double beta_schedule(long t, Index pool_size, double delta);

ConfidenceBounds confidence_bounds(const gp::PosteriorSummary& posterior,
                                   std::vector<Index> indices,
                                   double beta_sqrt,
                                   ModelTag model = ModelTag::Global);

/// Queries `model` at the pool rows in `indices`.
ConfidenceBounds confidence_bounds(const gp::Model& model,
                                   const CandidatePool& pool,
                                   std::vector<Index> indices,
                                   double beta_sqrt,
                                   ModelTag model_tag = ModelTag::Global);

/// `global_bounds` must cover every pool index.
RegionOfInterest filter_roi(const ConfidenceBounds& global_bounds);

/// Observations whose pool index lies in the ROI, in their original order.
std::vector<Observation> partition_observations(
    std::span<const Observation> selected, const RegionOfInterest& roi);

/// Per-step intersection on the ROI indices. `global_bounds` and
/// `roi_bounds` must both contain every ROI index.
IntersectedBounds intersect_bounds(const ConfidenceBounds& global_bounds,
                                   const ConfidenceBounds& roi_bounds,
                                   const RegionOfInterest& roi);

/// Running intersection. The result lives on `step.indices`: indices absent
/// from `prev` start fresh, indices absent from `step` are dropped.
IntersectedBounds intersect_bounds_historical(const IntersectedBounds& prev,
                                              const IntersectedBounds& step);

}  // namespace ballet
