#include "ballet/core/pool.hpp"

#include <limits>
#include <numeric>

#include "ballet/errors.hpp"

namespace ballet {

CandidatePool make_pool(gp::Matrix features, std::optional<gp::Vector> labels,
                        std::string name) {
  if (features.rows() < 1 || features.cols() < 1) {
    throw InputError("candidate pool '" + name + "' needs N >= 1 and d >= 1");
  }
  if (labels && labels->size() != features.rows()) {
    throw InputError("candidate pool '" + name + "': " +
                     std::to_string(labels->size()) + " labels for " +
                     std::to_string(features.rows()) + " rows");
  }
  CandidatePool pool;
  pool.f_star = labels ? labels->maxCoeff()
                       : std::numeric_limits<double>::quiet_NaN();
  pool.features = std::move(features);
  pool.labels = std::move(labels);
  pool.name = std::move(name);
  return pool;
}

gp::Matrix gather_rows(const gp::Matrix& m, std::span<const Index> indices) {
  gp::Matrix out(static_cast<Index>(indices.size()), m.cols());
  for (Index i = 0; i < out.rows(); ++i) out.row(i) = m.row(indices[i]);
  return out;
}

std::vector<Index> iota_indices(Index n) {
  std::vector<Index> out(static_cast<std::size_t>(n));
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

}  // namespace ballet
