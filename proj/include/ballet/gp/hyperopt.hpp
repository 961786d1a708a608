#pragma once

#include "ballet/gp/model.hpp"

namespace ballet::gp {

/// Search bounds in natural units; the search itself runs in log space.
struct HyperBounds {
  double lengthscale_lo = 1e-3, lengthscale_hi = 1e3;
  double outputscale_lo = 1e-4, outputscale_hi = 1e4;
  double noise_lo = 1e-6, noise_hi = 1e1;
};

struct HyperoptBudget {
  /// Number of starting points. The first start is `init`; the rest are
  /// random log-space perturbations of it. Zero disables the search.
  int restarts = 8;
  /// Coordinate sweeps per start.
  int sweeps = 25;
};

struct HyperoptResult {
  Hyperparams hyper;
  double nll = 0.0;
  /// Set when no candidate (including init) could be factorized.
  bool failed = false;
  int evaluations = 0;
};

/// Derivative-free multi-start coordinate descent on the negative log
/// marginal likelihood. The returned NLL never exceeds NLL(init), and the
/// result depends only on the data, `init`, `budget` and the state of `rng`.
HyperoptResult optimize_hyperparams(const Matrix& x, const Vector& y,
                                    const Hyperparams& init,
                                    const HyperoptBudget& budget, Rng& rng,
                                    const HyperBounds& bounds = {});

}  // namespace ballet::gp
