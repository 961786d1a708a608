#include "ballet/reference/serial.hpp"

#include <cmath>

namespace ballet::reference {

gp::Matrix kernel_matrix(const gp::KernelSpec& spec, const gp::Matrix& a,
                         const gp::Matrix& b) {
  gp::Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      out(i, j) = gp::kernel_eval(spec, a.row(i), b.row(j));
    }
  }
  return out;
}

gp::PosteriorSummary posterior_mean_var(const gp::Model& model,
                                        const gp::Matrix& xq) {
  const auto& kernel = model.hyperparams().kernel;
  const gp::Matrix cross = reference::kernel_matrix(kernel, model.train_inputs(), xq);
  const gp::Matrix v =
      model.chol_factor().triangularView<Eigen::Lower>().solve(cross);
  gp::Vector prior(xq.rows());
  for (Eigen::Index j = 0; j < xq.rows(); ++j) {
    prior[j] = gp::kernel_eval(kernel, xq.row(j), xq.row(j));
  }
  const gp::Vector var =
      (prior - v.colwise().squaredNorm().transpose()).cwiseMax(0.0);
  gp::PosteriorSummary out;
  out.mean = model.shift() +
             model.scale() * (cross.transpose() * model.alpha()).array();
  out.std = model.scale() * var.array().sqrt();
  return out;
}

}  // namespace ballet::reference
