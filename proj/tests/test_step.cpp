#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "ballet/bench/objectives.hpp"
#include "ballet/core/step.hpp"
#include "ballet/errors.hpp"

using namespace ballet;

namespace {

CandidatePool toy_pool(Index n) {
  gp::Matrix x(n, 1);
  gp::Vector y(n);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = bench::toy1d_eval(x(i, 0));
  }
  return make_pool(std::move(x), std::move(y), "toy");
}

BalletConfig toy_config(const char* method) {
  BalletConfig c;
  c.acquisition = parse_method(method);
  c.initial_hyper = {gp::RbfKernel{1.0, 0.2}, 1e-2};
  c.hyperopt = {2, 8};
  return c;
}

std::vector<Observation> warmup(const CandidatePool& pool,
                                std::initializer_list<Index> idx) {
  std::vector<Observation> out;
  for (Index i : idx) out.push_back({i, (*pool.labels)[i]});
  return out;
}

Observer labels_of(const CandidatePool& pool) {
  return [&pool](Index i) { return (*pool.labels)[i]; };
}

const std::initializer_list<Index> kWarm = {13, 47, 71, 90, 102, 130, 155, 171, 188, 196};

std::vector<Index> run_steps(const CandidatePool& pool, const BalletConfig& c,
                             int steps, std::uint64_t seed = 7) {
  BalletState s = make_state(pool, warmup(pool, kWarm), c, seed);
  std::vector<Index> chosen;
  for (int i = 0; i < steps; ++i) {
    chosen.push_back(ballet_step(s, c, labels_of(pool)).chosen);
  }
  return chosen;
}

}  // namespace

TEST_CASE("make_state validates warm-up data") {
  const CandidatePool pool = toy_pool(20);
  const BalletConfig c = toy_config("ICI");
  CHECK_THROWS_AS(make_state(pool, {}, c, 1), InputError);
  CHECK_THROWS_AS(make_state(pool, warmup(pool, {1, 1}), c, 1), InputError);
  CHECK_THROWS_AS(make_state(pool, {{20, 0.0}}, c, 1), InputError);
  BalletConfig bad = c;
  bad.refit_interval = 0;
  CHECK_THROWS_AS(make_state(pool, warmup(pool, {1}), bad, 1), InputError);
  bad = c;
  bad.acquisition = {Family::ICI, Scope::Roi};
  CHECK_THROWS_AS(make_state(pool, warmup(pool, {1}), bad, 1), InputError);
}

TEST_CASE("random streams are keyed by seed, step and stream") {
  auto draw = [](gp::Rng r) { return r(); };
  CHECK(draw(stream_rng(3, 1, Stream::Acquisition)) ==
        draw(stream_rng(3, 1, Stream::Acquisition)));
  CHECK(draw(stream_rng(3, 1, Stream::Acquisition)) !=
        draw(stream_rng(3, 2, Stream::Acquisition)));
  CHECK(draw(stream_rng(3, 1, Stream::Acquisition)) !=
        draw(stream_rng(3, 1, Stream::Noise)));
  CHECK(draw(stream_rng(3, 1, Stream::Acquisition)) !=
        draw(stream_rng(4, 1, Stream::Acquisition)));
  CHECK(draw(stream_rng(1ULL << 32, 1, Stream::Pool)) !=
        draw(stream_rng(0, 1, Stream::Pool)));
}

TEST_CASE("identical config and seed give identical selections") {
  const CandidatePool pool = toy_pool(200);
  for (const char* m : {"ICI", "RTS", "TS:Global", "EI:ROI"}) {
    const BalletConfig c = toy_config(m);
    CHECK(run_steps(pool, c, 6) == run_steps(pool, c, 6));
  }
}

TEST_CASE("selection validity") {
  const CandidatePool pool = toy_pool(200);
  for (const char* m : {"ICI", "RCI", "RTS", "UCB:ROI", "UCB:Intersect",
                        "EI:ROI", "CIWidth:Intersect"}) {
    CAPTURE(m);
    const BalletConfig c = toy_config(m);
    BalletState s = make_state(pool, warmup(pool, kWarm), c, 3);
    for (int i = 0; i < 15; ++i) {
      std::vector<Index> before;
      for (const auto& o : s.selected) before.push_back(o.index);
      const StepDiagnostics d = ballet_step(s, c, labels_of(pool));
      CHECK(std::find(before.begin(), before.end(), d.chosen) == before.end());
      if (!d.roi_exhausted) CHECK(s.roi.contains(d.chosen));
      CHECK(d.roi_ratio > 0.0);
      CHECK(d.roi_ratio <= 1.0);
      CHECK(d.t == i + 1);
      CHECK(s.t == i + 1);
      CHECK(s.selected.size() == before.size() + 1);
    }
  }
}

TEST_CASE("one ICI step on the toy grid selects inside the ROI") {
  const CandidatePool pool = toy_pool(1000);
  const BalletConfig c = toy_config("ICI");
  BalletState s = make_state(
      pool, warmup(pool, {31, 120, 298, 377, 455, 512, 640, 711, 868, 955}), c,
      11);
  const StepDiagnostics d = ballet_step(s, c, labels_of(pool));
  CHECK_FALSE(d.roi_exhausted);
  CHECK(s.roi.contains(d.chosen));
  CHECK(s.roi.ratio < 1.0);
}

TEST_CASE("vacuous filter reduces to the global model") {
  const CandidatePool pool = toy_pool(150);
  BalletConfig c = toy_config("ICI");
  c.beta_sqrt_filter = 1e6;
  BalletState s = make_state(pool, warmup(pool, {3, 40, 77, 120}), c, 2);
  update_models(s, c);
  CHECK(s.roi.ratio == 1.0);
  CHECK(s.roi_shares_global);
  CHECK(s.roi_post.mean == s.global_post.mean);
  CHECK(s.roi_post.std == s.global_post.std);
}

TEST_CASE("scope degeneracy of interval-width scores") {
  const CandidatePool pool = toy_pool(150);
  BalletConfig c = toy_config("ICI");
  c.beta_sqrt_filter = 1e6;
  BalletState s = make_state(pool, warmup(pool, {3, 40, 77, 120}), c, 2);
  update_models(s, c);
  gp::Rng rng(0);
  const auto ici = acquisition_scores(s, c, parse_method("ICI"), rng);
  const auto rci = acquisition_scores(s, c, parse_method("RCI"), rng);
  const auto glob = acquisition_scores(s, c, parse_method("CIWidth:Global"), rng);
  REQUIRE(ici.eligible == rci.eligible);
  REQUIRE(ici.eligible == glob.eligible);
  for (std::size_t k = 0; k < ici.scores.size(); ++k) {
    CHECK(std::abs(ici.scores[k] - rci.scores[k]) <= 1e-10);
    CHECK(std::abs(ici.scores[k] - glob.scores[k]) <= 1e-10);
  }
}

TEST_CASE("ICI equals RCI when ROI bounds equal global bounds") {
  const CandidatePool pool = toy_pool(120);
  BalletConfig c = toy_config("ICI");
  BalletState s = make_state(pool, warmup(pool, {5, 50, 90}), c, 9);
  update_models(s, c);
  // Force the ROI posterior to the global one on the ROI indices.
  for (std::size_t k = 0; k < s.roi.indices.size(); ++k) {
    s.roi_post.mean[static_cast<Index>(k)] = s.global_post.mean[s.roi.indices[k]];
    s.roi_post.std[static_cast<Index>(k)] = s.global_post.std[s.roi.indices[k]];
  }
  gp::Rng rng(0);
  const auto ici = acquisition_scores(s, c, parse_method("ICI"), rng);
  const auto rci = acquisition_scores(s, c, parse_method("RCI"), rng);
  REQUIRE(ici.eligible == rci.eligible);
  for (std::size_t k = 0; k < ici.scores.size(); ++k) {
    CHECK(ici.scores[k] == rci.scores[k]);
  }
}

TEST_CASE("acquisition score forms") {
  const CandidatePool pool = toy_pool(120);
  BalletConfig c = toy_config("UCB:Global");
  c.beta_sqrt_filter = 2.0;
  BalletState s = make_state(pool, warmup(pool, {5, 50, 90, 110}), c, 9);
  update_models(s, c);
  gp::Rng rng(1);
  const double b = c.acquisition.beta_sqrt_acq;
  const auto ucb = acquisition_scores(s, c, parse_method("UCB:Global"), rng);
  CHECK(ucb.eligible.size() == 116);
  double best_y = -1e300;
  for (const auto& o : s.selected) best_y = std::max(best_y, o.y);
  const auto ei = acquisition_scores(s, c, parse_method("EI:Global"), rng);
  for (std::size_t k = 0; k < ucb.eligible.size(); ++k) {
    const Index i = ucb.eligible[k];
    CHECK(ucb.scores[k] == doctest::Approx(s.global_post.mean[i] +
                                           b * s.global_post.std[i])
                               .epsilon(1e-14));
    CHECK(ei.scores[k] >= 0.0);
    CHECK(ei.scores[k] == expected_improvement(s.global_post.mean[i],
                                               s.global_post.std[i], best_y));
  }
  const auto ici_ucb = acquisition_scores(s, c, parse_method("UCB:Intersect"), rng);
  for (std::size_t k = 0; k < ici_ucb.eligible.size(); ++k) {
    const Index i = ici_ucb.eligible[k];
    CHECK(ici_ucb.scores[k] <= s.global_post.mean[i] + b * s.global_post.std[i] + 1e-12);
  }
}

TEST_CASE("Thompson sampling respects the candidate cap") {
  const CandidatePool pool = toy_pool(120);
  BalletConfig c = toy_config("TS:Global");
  c.ts_sample_cap = 5;
  BalletState s = make_state(pool, warmup(pool, {5, 50, 90}), c, 9);
  update_models(s, c);
  gp::Rng a(4), b(4);
  const auto ts = acquisition_scores(s, c, c.acquisition, a);
  CHECK(ts.eligible.size() == 5);
  CHECK(ts.scores.size() == 5);
  CHECK(std::is_sorted(ts.eligible.begin(), ts.eligible.end()));
  CHECK(acquisition_scores(s, c, c.acquisition, b).scores == ts.scores);
}

TEST_CASE("exhausted pools") {
  const CandidatePool pool = toy_pool(4);
  BalletConfig c = toy_config("UCB:Global");
  BalletState s = make_state(pool, warmup(pool, {0, 1, 2, 3}), c, 1);
  CHECK_THROWS_AS(ballet_step(s, c, labels_of(pool)), PoolExhausted);

  SUBCASE("an exhausted ROI falls back to the whole pool") {
    const CandidatePool big = toy_pool(60);
    BalletConfig z = toy_config("ICI");
    z.beta_sqrt_filter = 0.0;
    z.hyperopt.restarts = 0;
    z.initial_hyper = {gp::RbfKernel{1.0, 0.02}, gp::kNoiseFloor};
    BalletState st = make_state(big, warmup(big, {10, 30, 50}), z, 1);
    update_models(st, z);
    // With a tiny lengthscale the mean peaks at the best observation.
    REQUIRE(st.roi.indices.size() == 1);
    REQUIRE((st.roi.indices[0] == 10 || st.roi.indices[0] == 30 ||
             st.roi.indices[0] == 50));
    st.t = 0;
    const StepDiagnostics d = ballet_step(st, z, labels_of(big));
    CHECK(d.roi_exhausted);
    CHECK(d.chosen != 10);
    CHECK(d.chosen != 30);
    CHECK(d.chosen != 50);
  }
}

TEST_CASE("f* interval widths") {
  const CandidatePool pool = toy_pool(300);
  const BalletConfig c = toy_config("ICI");
  BalletState s = make_state(pool, warmup(pool, kWarm), c, 5);
  for (int i = 0; i < 8; ++i) {
    ballet_step(s, c, labels_of(pool));
    for (Scope sc : {Scope::Global, Scope::Roi, Scope::Intersect}) {
      CHECK(ci_width_estimate(s, sc, 0.0) == 0.0);
      CHECK(ci_width_estimate(s, sc, 1.0) >= 0.0);
    }
    // Global interval restricted to the ROI index set.
    const double b = std::sqrt(2.0);
    double gu = -1e300, gl = -1e300;
    for (Index idx : s.roi.indices) {
      gu = std::max(gu, s.global_post.mean[idx] + b * s.global_post.std[idx]);
      gl = std::max(gl, s.global_post.mean[idx] - b * s.global_post.std[idx]);
    }
    const double w_int = ci_width_estimate(s, Scope::Intersect, b);
    CHECK(w_int <= std::max(gu - gl, 0.0) + 1e-12);
    CHECK(w_int <= ci_width_estimate(s, Scope::Roi, b) + 1e-12);
  }
}

TEST_CASE("step diagnostics report widths at the trace beta") {
  const CandidatePool pool = toy_pool(200);
  BalletConfig c = toy_config("RCI");
  c.beta_trace = 4.0;
  BalletState s = make_state(pool, warmup(pool, kWarm), c, 5);
  const StepDiagnostics d = ballet_step(s, c, labels_of(pool));
  CHECK(d.width_global == ci_width_estimate(s, Scope::Global, 2.0));
  CHECK(d.width_roi == ci_width_estimate(s, Scope::Roi, 2.0));
  CHECK(d.width_intersect == ci_width_estimate(s, Scope::Intersect, 2.0));
  CHECK(d.roi_threshold == s.roi.threshold);
  CHECK(d.y == (*pool.labels)[d.chosen]);
}

TEST_CASE("historical intervals shrink while an index stays in the ROI") {
  const CandidatePool pool = toy_pool(300);
  BalletConfig c = toy_config("ICI");
  c.intersection = IntersectionMode::Historical;
  BalletState s = make_state(pool, warmup(pool, kWarm), c, 8);
  std::map<Index, double> last;
  for (int i = 0; i < 12; ++i) {
    ballet_step(s, c, labels_of(pool));
    REQUIRE(s.historical.has_value());
    CHECK(s.historical->indices == s.roi.indices);
    std::map<Index, double> now;
    for (Index k = 0; k < s.historical->size(); ++k) {
      const Index idx = s.historical->indices[static_cast<std::size_t>(k)];
      now[idx] = s.historical->width(k);
      if (const auto it = last.find(idx); it != last.end()) {
        CHECK(now[idx] <= it->second + 1e-15);
      }
    }
    last = std::move(now);
  }
}

TEST_CASE("refit cadence") {
  const CandidatePool pool = toy_pool(200);
  BalletConfig c = toy_config("RCI");
  c.refit_interval = 3;
  BalletState s = make_state(pool, warmup(pool, kWarm), c, 6);
  std::vector<double> ls;
  for (int i = 0; i < 6; ++i) {
    ballet_step(s, c, labels_of(pool));
    ls.push_back(std::get<gp::RbfKernel>(s.global_hyper.kernel).lengthscale);
  }
  CHECK(ls[1] == ls[0]);
  CHECK(ls[2] == ls[0]);
  CHECK(ls[4] == ls[3]);
  CHECK(ls[5] == ls[3]);
}

TEST_CASE("zero-restart budget keeps the initial hyperparameters") {
  const CandidatePool pool = toy_pool(100);
  BalletConfig c = toy_config("ICI");
  c.hyperopt.restarts = 0;
  BalletState s = make_state(pool, warmup(pool, {4, 40, 80}), c, 6);
  ballet_step(s, c, labels_of(pool));
  const auto& k = std::get<gp::RbfKernel>(s.global_hyper.kernel);
  CHECK(k.lengthscale == 0.2);
  CHECK(s.global_hyper.noise_variance == 1e-2);
}
