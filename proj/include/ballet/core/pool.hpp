#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ballet/gp/kernel.hpp"

namespace ballet {

using Index = Eigen::Index;

/// The finite discretization of the search space: one candidate per row.
struct CandidatePool {
  gp::Matrix features;
  /// Precomputed objective values, when known.
  std::optional<gp::Vector> labels;
  std::string name;
  /// max(labels) when labels are present, NaN otherwise.
  double f_star = 0.0;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
};

/// Validates N >= 1, d >= 1 and label length, and fills in f_star.
CandidatePool make_pool(gp::Matrix features, std::optional<gp::Vector> labels,
                        std::string name);

/// Feature rows at the given pool indices.
gp::Matrix gather_rows(const gp::Matrix& m, std::span<const Index> indices);

/// 0, 1, ..., n - 1.
std::vector<Index> iota_indices(Index n);

}  // namespace ballet
