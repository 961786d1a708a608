#pragma once

#include <Eigen/Dense>
#include <variant>

namespace ballet::gp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowRef = Eigen::Ref<const Eigen::RowVectorXd>;

/// Squared exponential: outputscale * exp(-|x - x'|^2 / (2 lengthscale^2)).
struct RbfKernel {
  double outputscale = 1.0;
  double lengthscale = 1.0;
};

/// Dot product with an additive bias: variance * <x, x'> + bias_variance.
struct LinearKernel {
  double variance = 1.0;
  double bias_variance = 0.0;
};

using KernelSpec = std::variant<RbfKernel, LinearKernel>;

/// Throws InputError if a parameter is outside its domain.
void validate(const KernelSpec& spec);

double kernel_eval(const KernelSpec& spec, RowRef x, RowRef x2);

/// k(x, x) for every row of `x`.
Vector kernel_diag(const KernelSpec& spec, const Matrix& x);

/// Gram matrix between the rows of `a` and `b`. Rows of the result are
/// filled in parallel; each entry is computed independently, so the
/// result does not depend on the thread count.
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b);

}  // namespace ballet::gp
