#include "ballet/gp/kernel.hpp"

#include <cmath>
#include <string>

#include "ballet/errors.hpp"

namespace ballet::gp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double squared_distance(RowRef x, RowRef x2) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double d = x[k] - x2[k];
    acc += d * d;
  }
  return acc;
}

double eval_unchecked(const KernelSpec& spec, RowRef x, RowRef x2) {
  return std::visit(
      Overloaded{
          [&](const RbfKernel& k) {
            return k.outputscale *
                   std::exp(-squared_distance(x, x2) /
                            (2.0 * k.lengthscale * k.lengthscale));
          },
          [&](const LinearKernel& k) {
            return k.variance * x.dot(x2) + k.bias_variance;
          },
      },
      spec);
}

}  // namespace

void validate(const KernelSpec& spec) {
  std::visit(Overloaded{
                 [](const RbfKernel& k) {
                   if (!(k.outputscale > 0.0) || !(k.lengthscale > 0.0)) {
                     throw InputError(
                         "rbf kernel: outputscale and lengthscale must be "
                         "positive");
                   }
                 },
                 [](const LinearKernel& k) {
                   if (!(k.variance > 0.0) || !(k.bias_variance >= 0.0)) {
                     throw InputError(
                         "linear kernel: variance must be positive and "
                         "bias_variance non-negative");
                   }
                 },
             },
             spec);
}

double kernel_eval(const KernelSpec& spec, RowRef x, RowRef x2) {
  if (x.size() != x2.size()) {
    throw InputError("kernel_eval: dimension mismatch (" +
                     std::to_string(x.size()) + " vs " +
                     std::to_string(x2.size()) + ")");
  }
  return eval_unchecked(spec, x, x2);
}

Vector kernel_diag(const KernelSpec& spec, const Matrix& x) {
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = eval_unchecked(spec, x.row(i), x.row(i));
  }
  return out;
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols() && a.rows() > 0 && b.rows() > 0) {
    throw InputError("kernel_matrix: column count mismatch (" +
                     std::to_string(a.cols()) + " vs " +
                     std::to_string(b.cols()) + ")");
  }
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.rows();
  Matrix out(n, m);
  // Row-major access pattern on a and b is cheaper with local copies.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      ar = a, br = b;
#pragma omp parallel for schedule(static) if (n * m > 4096)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) = eval_unchecked(spec, ar.row(i), br.row(j));
    }
  }
  return out;
}

}  // namespace ballet::gp
