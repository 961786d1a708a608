#pragma once

// Single-threaded reference versions of the parallel kernels. They take a
// different computational route (whole-matrix Eigen operations, no OpenMP)
// and are kept for equivalence tests and benchmarks.

#include "ballet/gp/model.hpp"

namespace ballet::reference {

gp::Matrix kernel_matrix(const gp::KernelSpec& spec, const gp::Matrix& a,
                         const gp::Matrix& b);

gp::PosteriorSummary posterior_mean_var(const gp::Model& model,
                                        const gp::Matrix& xq);

}  // namespace ballet::reference
