#pragma once

#include <cstddef>
#include <string>

#include "ballet/core/pool.hpp"
#include "ballet/errors.hpp"
#include "ballet/gp/model.hpp"

namespace ballet::bench {

enum class ObjectiveKind { Toy1D, HdboSum, Tabular };

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::Toy1D;
  /// Dimension of HdboSum.
  Index dim = 200;
  /// Candidate-pool CSV for Tabular.
  std::string path;
  /// Std of Gaussian noise added to every observation.
  double noise_std = 0.0;
};

std::string objective_name(const ObjectiveSpec& spec);

/// sin(64 |x|^4) - (x - 0.2)^2 on [-1, 1].
double toy1d_eval(double x);

/// sum_i exp(x_i) over a 200-dimensional input.
double hdbo_eval(const gp::Vector& x);

/// Default pool size when a config leaves it unset.
Index default_pool_size(const ObjectiveSpec& spec);

/// Toy1D: uniform grid on [-1, 1]. HdboSum: i.i.d. standard normal rows.
/// Tabular: loads spec.path and ignores pool_size.
CandidatePool generate_pool(const ObjectiveSpec& spec, Index pool_size,
                            gp::Rng& rng);

/// Malformed candidate-pool file. `row` is the 1-based line number in the
/// file (the header is row 1); 0 when the problem is not tied to a row.
class PoolFormatError : public InputError {
 public:
  PoolFormatError(const std::string& what, std::size_t row, std::size_t column)
      : InputError(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Header row, then numeric rows; the last column is the label.
CandidatePool load_pool_csv(const std::string& path);

}  // namespace ballet::bench
