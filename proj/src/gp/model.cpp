#include "ballet/gp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "ballet/errors.hpp"

namespace ballet::gp {

namespace {

constexpr double kJitterStart = 1e-8;
constexpr double kJitterStop = 1e-2;

void check_query(const Model& model, const Matrix& xq, const char* where) {
  if (xq.rows() > 0 && xq.cols() != model.dim()) {
    std::ostringstream msg;
    msg << where << ": query has " << xq.cols() << " columns, model expects "
        << model.dim();
    throw InputError(msg.str());
  }
}

Matrix whitened_cross(const Model& model, const Matrix& xq) {
  const Matrix cross =
      kernel_matrix(model.hyperparams().kernel, model.train_inputs(), xq);
  return model.chol_factor().triangularView<Eigen::Lower>().solve(cross);
}

}  // namespace

void validate(const Hyperparams& hyper) {
  validate(hyper.kernel);
  if (!(hyper.noise_variance >= kNoiseFloor)) {
    throw InputError("noise_variance must be >= " +
                     std::to_string(kNoiseFloor));
  }
}

JitteredCholesky robust_cholesky(const Matrix& a, double base) {
  if (a.rows() == 0) return {Matrix(0, 0), 0.0};
  if (base <= 0.0) base = a.diagonal().mean();
  if (!(base > 0.0) || !std::isfinite(base)) base = 1.0;

  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};

  double jitter = kJitterStart * base;
  const double stop = kJitterStop * base * (1.0 + 1e-12);
  Matrix shifted = a;
  for (; jitter <= stop; jitter *= 10.0) {
    shifted.diagonal() = a.diagonal().array() + jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
  }
  std::ostringstream msg;
  msg << "cholesky failed after jitter escalation (final jitter "
      << jitter / 10.0 << ")";
  throw NumericalError(msg.str(), jitter / 10.0);
}

Standardized standardize_targets(const Vector& y) {
  Standardized out{y, 0.0, 1.0};
  const auto n = y.size();
  if (n < 2) return out;
  out.shift = y.mean();
  const double ss = (y.array() - out.shift).square().sum();
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd > 0.0 && std::isfinite(sd)) out.scale = sd;
  out.z = (y.array() - out.shift) / out.scale;
  return out;
}

Model fit_posterior(const Matrix& x, const Vector& y, const Hyperparams& hyper,
                    FitOptions options) {
  validate(hyper);
  if (x.rows() != y.size()) {
    throw InputError("fit_posterior: " + std::to_string(x.rows()) +
                     " inputs but " + std::to_string(y.size()) + " targets");
  }
  Model model;
  model.x_ = x;
  model.y_ = y;
  model.hyper_ = hyper;

  Vector targets = y;
  if (options.standardize && y.size() >= 2) {
    Standardized s = standardize_targets(y);
    targets = std::move(s.z);
    model.shift_ = s.shift;
    model.scale_ = s.scale;
  }

  Matrix gram = kernel_matrix(hyper.kernel, x, x);
  gram.diagonal().array() += hyper.noise_variance;
  JitteredCholesky chol = robust_cholesky(gram);
  model.chol_ = std::move(chol.lower);
  model.jitter_ = chol.jitter;
  model.alpha_ = model.chol_.triangularView<Eigen::Lower>().solve(targets);
  model.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(
      model.alpha_);
  return model;
}

PosteriorSummary posterior_mean_var(const Model& model, const Matrix& xq) {
  check_query(model, xq, "posterior_mean_var");
  const Eigen::Index m = xq.rows();
  const Matrix cross =
      kernel_matrix(model.hyperparams().kernel, model.train_inputs(), xq);
  const Vector prior_var = kernel_diag(model.hyperparams().kernel, xq);
  const auto lower = model.chol_factor().triangularView<Eigen::Lower>();

  PosteriorSummary out{Vector(m), Vector(m)};
#pragma omp parallel for schedule(static) if (m * model.size() > 4096)
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mu = cross.col(j).dot(model.alpha());
    const Vector v = lower.solve(cross.col(j));
    const double var = std::max(prior_var[j] - v.squaredNorm(), 0.0);
    out.mean[j] = model.shift() + model.scale() * mu;
    out.std[j] = model.scale() * std::sqrt(var);
  }
  return out;
}

Matrix posterior_cov(const Model& model, const Matrix& xq) {
  check_query(model, xq, "posterior_cov");
  const Matrix v = whitened_cross(model, xq);
  Matrix cov = kernel_matrix(model.hyperparams().kernel, xq, xq);
  cov.noalias() -= v.transpose() * v;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return cov * (model.scale() * model.scale());
}

double neg_log_marginal_likelihood(const Matrix& x, const Vector& y,
                                   const Hyperparams& hyper) {
  if (y.size() < 1) throw InputError("neg_log_marginal_likelihood: n >= 1");
  const Model model = fit_posterior(x, y, hyper, FitOptions{false});
  const double n = static_cast<double>(y.size());
  const double quad = 0.5 * y.dot(model.alpha());
  const double half_logdet =
      model.chol_factor().diagonal().array().log().sum();
  return quad + half_logdet + 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Vector sample_posterior(const Model& model, const Matrix& xq, Rng& rng) {
  if (xq.rows() < 1) throw InputError("sample_posterior: need m >= 1");
  const Matrix cov = posterior_cov(model, xq);
  const Vector mean = posterior_mean_var(model, xq).mean;
  // Jitter is scaled by the prior variance: roundoff in a nearly singular
  // posterior covariance is relative to the prior, not the posterior.
  const double prior_scale = kernel_diag(model.hyperparams().kernel, xq).mean() *
                             model.scale() * model.scale();
  const JitteredCholesky chol = robust_cholesky(cov, prior_scale);

  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(xq.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return mean + chol.lower.triangularView<Eigen::Lower>() * z;
}

}  // namespace ballet::gp
