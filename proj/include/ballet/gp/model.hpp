#pragma once

#include <Eigen/Dense>
#include <random>

#include "ballet/gp/kernel.hpp"

namespace ballet::gp {

using Rng = std::mt19937_64;

/// Observation noise never goes below this; it keeps interpolation of
/// duplicated or very close points non-singular.
inline constexpr double kNoiseFloor = 1e-6;

struct Hyperparams {
  KernelSpec kernel = RbfKernel{};
  double noise_variance = 1e-2;
};

void validate(const Hyperparams& hyper);

struct FitOptions {
  /// z-score the targets before fitting when there are at least two of them.
  bool standardize = false;
};

/// Result of a Cholesky factorization that may have needed diagonal jitter.
struct JitteredCholesky {
  Matrix lower;
  double jitter = 0.0;
};

/// Factorizes `a`, first as is, then with jitter 1e-8 * base, escalating by
/// 10x up to 1e-2 * base. `base` defaults to the mean of the diagonal.
/// Throws NumericalError reporting the final jitter if every attempt fails.
JitteredCholesky robust_cholesky(const Matrix& a, double base = -1.0);

struct Standardized {
  Vector z;
  double shift = 0.0;
  double scale = 1.0;
};

/// Shift by the mean, divide by the sample standard deviation. Fewer than
/// two targets, or constant targets, leave scale at 1.
Standardized standardize_targets(const Vector& y);

struct PosteriorSummary {
  Vector mean;
  Vector std;
};

/// Exact GP posterior conditioned on (train_inputs, train_targets).
/// Immutable once built; safe to query from several threads.
class Model {
 public:
  const Matrix& train_inputs() const { return x_; }
  /// Targets as passed to fit_posterior (original scale).
  const Vector& train_targets() const { return y_; }
  const Hyperparams& hyperparams() const { return hyper_; }
  /// Lower factor of K + (noise + jitter) I, in standardized units.
  const Matrix& chol_factor() const { return chol_; }
  const Vector& alpha() const { return alpha_; }
  double shift() const { return shift_; }
  double scale() const { return scale_; }
  double jitter() const { return jitter_; }
  Eigen::Index size() const { return x_.rows(); }
  Eigen::Index dim() const { return x_.cols(); }

 private:
  friend Model fit_posterior(const Matrix&, const Vector&, const Hyperparams&,
                             FitOptions);

  Matrix x_;
  Vector y_;
  Hyperparams hyper_;
  Matrix chol_;
  Vector alpha_;
  double shift_ = 0.0;
  double scale_ = 1.0;
  double jitter_ = 0.0;
};

/// n = 0 is allowed and yields the prior.
Model fit_posterior(const Matrix& x, const Vector& y, const Hyperparams& hyper,
                    FitOptions options = {});

/// Point-wise posterior mean and standard deviation in the original target
/// scale. Query points are processed in parallel.
PosteriorSummary posterior_mean_var(const Model& model, const Matrix& xq);

Matrix posterior_cov(const Model& model, const Matrix& xq);

/// 0.5 y'(K + s I)^-1 y + 0.5 log|K + s I| + (n/2) log(2 pi).
double neg_log_marginal_likelihood(const Matrix& x, const Vector& y,
                                   const Hyperparams& hyper);

/// One joint draw mean + L z at the query points.
Vector sample_posterior(const Model& model, const Matrix& xq, Rng& rng);

}  // namespace ballet::gp
