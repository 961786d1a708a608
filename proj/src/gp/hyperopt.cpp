#include "ballet/gp/hyperopt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <type_traits>

#include "ballet/errors.hpp"

namespace ballet::gp {

namespace {

constexpr int kParams = 3;
using Theta = std::array<double, kParams>;

constexpr double kInitialStep = 1.0;
constexpr double kMaxStep = 4.0;
constexpr double kMinStep = 1e-3;
constexpr double kRestartSpread = 2.0;

struct Box {
  Theta lo;
  Theta hi;
};

Box make_box(const HyperBounds& b, const Hyperparams& init) {
  const bool rbf = std::holds_alternative<RbfKernel>(init.kernel);
  // Linear kernels reuse the outputscale range for both variances.
  Box box;
  box.lo = {std::log(b.outputscale_lo),
            rbf ? std::log(b.lengthscale_lo) : std::log(b.outputscale_lo),
            std::log(b.noise_lo)};
  box.hi = {std::log(b.outputscale_hi),
            rbf ? std::log(b.lengthscale_hi) : std::log(b.outputscale_hi),
            std::log(b.noise_hi)};
  return box;
}

double safe_log(double v, double lo) {
  return v > 0.0 ? std::log(v) : lo;
}

Theta to_theta(const Hyperparams& h, const Box& box) {
  Theta t{};
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, RbfKernel>) {
          t[0] = safe_log(k.outputscale, box.lo[0]);
          t[1] = safe_log(k.lengthscale, box.lo[1]);
        } else {
          t[0] = safe_log(k.variance, box.lo[0]);
          t[1] = safe_log(k.bias_variance, box.lo[1]);
        }
      },
      h.kernel);
  t[2] = safe_log(h.noise_variance, box.lo[2]);
  for (int i = 0; i < kParams; ++i) t[i] = std::clamp(t[i], box.lo[i], box.hi[i]);
  return t;
}

Hyperparams from_theta(const Theta& t, const Hyperparams& like) {
  Hyperparams h = like;
  if (std::holds_alternative<RbfKernel>(like.kernel)) {
    h.kernel = RbfKernel{std::exp(t[0]), std::exp(t[1])};
  } else {
    h.kernel = LinearKernel{std::exp(t[0]), std::exp(t[1])};
  }
  h.noise_variance = std::max(std::exp(t[2]), kNoiseFloor);
  return h;
}

class Objective {
 public:
  Objective(const Matrix& x, const Vector& y) : x_(x), y_(y) {}

  double operator()(const Hyperparams& h) {
    ++evaluations;
    try {
      const double v = neg_log_marginal_likelihood(x_, y_, h);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    } catch (const InputError&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  int evaluations = 0;

 private:
  const Matrix& x_;
  const Vector& y_;
};

}  // namespace

HyperoptResult optimize_hyperparams(const Matrix& x, const Vector& y,
                                    const Hyperparams& init,
                                    const HyperoptBudget& budget, Rng& rng,
                                    const HyperBounds& bounds) {
  if (x.rows() != y.size()) {
    throw InputError("optimize_hyperparams: inputs and targets disagree");
  }
  HyperoptResult result{init, std::numeric_limits<double>::infinity(), false,
                        0};
  if (budget.restarts <= 0) return result;
  if (y.size() < 2) throw InputError("optimize_hyperparams: need n >= 2");

  Objective nll(x, y);
  result.nll = nll(init);

  const Box box = make_box(bounds, init);
  const Theta origin = to_theta(init, box);
  std::uniform_real_distribution<double> jitter(-kRestartSpread,
                                                kRestartSpread);

  for (int start = 0; start < budget.restarts; ++start) {
    Theta theta = origin;
    if (start > 0) {
      for (int i = 0; i < kParams; ++i) {
        theta[i] = std::clamp(theta[i] + jitter(rng), box.lo[i], box.hi[i]);
      }
    }
    double value = nll(from_theta(theta, init));
    Theta step;
    step.fill(kInitialStep);

    for (int sweep = 0; sweep < budget.sweeps; ++sweep) {
      for (int k = 0; k < kParams; ++k) {
        bool improved = false;
        for (const double dir : {1.0, -1.0}) {
          Theta cand = theta;
          cand[k] = std::clamp(theta[k] + dir * step[k], box.lo[k], box.hi[k]);
          if (cand[k] == theta[k]) continue;
          const double v = nll(from_theta(cand, init));
          if (v < value) {
            value = v;
            theta = cand;
            improved = true;
            break;
          }
        }
        step[k] = improved ? std::min(step[k] * 2.0, kMaxStep) : step[k] * 0.5;
      }
      if (*std::max_element(step.begin(), step.end()) < kMinStep) break;
    }

    if (value < result.nll) {
      result.nll = value;
      result.hyper = from_theta(theta, init);
    }
  }
  result.evaluations = nll.evaluations;
  result.failed = !std::isfinite(result.nll);
  return result;
}

}  // namespace ballet::gp
