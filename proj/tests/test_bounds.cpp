#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ballet/core/acquisition.hpp"
#include "ballet/core/bounds.hpp"
#include "ballet/errors.hpp"

using namespace ballet;
using gp::Vector;

namespace {

gp::PosteriorSummary summary(std::vector<double> mean, std::vector<double> sd) {
  gp::PosteriorSummary p;
  p.mean = Eigen::Map<Vector>(mean.data(), static_cast<Index>(mean.size()));
  p.std = Eigen::Map<Vector>(sd.data(), static_cast<Index>(sd.size()));
  return p;
}

ConfidenceBounds interval(std::vector<Index> idx, std::vector<double> lo,
                          std::vector<double> hi) {
  ConfidenceBounds b;
  b.indices = std::move(idx);
  b.lcb = Eigen::Map<Vector>(lo.data(), static_cast<Index>(lo.size()));
  b.ucb = Eigen::Map<Vector>(hi.data(), static_cast<Index>(hi.size()));
  return b;
}

IntersectedBounds as_step(const ConfidenceBounds& b) {
  IntersectedBounds s;
  s.indices = b.indices;
  s.lcb = b.lcb;
  s.ucb = b.ucb;
  s.empty.assign(b.indices.size(), false);
  for (Index k = 0; k < b.size(); ++k) {
    s.empty[static_cast<std::size_t>(k)] = b.ucb[k] < b.lcb[k];
  }
  return s;
}

gp::PosteriorSummary random_summary(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u(0.0, 2.0);
  gp::PosteriorSummary p;
  p.mean.resize(n);
  p.std.resize(n);
  for (Index i = 0; i < n; ++i) {
    p.mean[i] = normal(rng);
    p.std[i] = u(rng);
  }
  return p;
}

}  // namespace

TEST_CASE("beta schedule values") {
  CHECK(beta_schedule(1, 100, 0.2) ==
        doctest::Approx(14.810911162905764).epsilon(1e-12));
  CHECK(std::sqrt(beta_schedule(1, 100, 0.2)) ==
        doctest::Approx(3.8484946619302676).epsilon(1e-12));
  for (long t : {1L, 3L, 17L}) {
    CHECK(beta_schedule(2 * t, 50, 0.3) - beta_schedule(t, 50, 0.3) ==
          doctest::Approx(2.772588722239781).epsilon(1e-12));
  }
  const double pi_t = std::numbers::pi * std::numbers::pi * 9.0 / 6.0;
  CHECK(beta_schedule(3, 40, 0.5) ==
        doctest::Approx(2.0 * std::log(2.0 * 40.0 * pi_t / 0.5)).epsilon(1e-14));
}

TEST_CASE("beta schedule rejects domain violations") {
  CHECK_THROWS_AS(beta_schedule(0, 10, 0.2), InputError);
  CHECK_THROWS_AS(beta_schedule(1, 0, 0.2), InputError);
  CHECK_THROWS_AS(beta_schedule(1, 10, 0.0), InputError);
  CHECK_THROWS_AS(beta_schedule(1, 10, 1.0), InputError);
}

TEST_CASE("beta schedule monotonicity over a 10x10x5 grid") {
  const double deltas[] = {0.05, 0.1, 0.2, 0.5, 0.9};
  for (long t = 1; t <= 10; ++t) {
    for (Index n = 1; n <= 10; ++n) {
      const Index size = n * 37;
      for (int k = 0; k < 5; ++k) {
        const double b = beta_schedule(t, size, deltas[k]);
        CHECK(beta_schedule(t + 1, size, deltas[k]) > b);
        CHECK(beta_schedule(t, size + 1, deltas[k]) > b);
        if (k + 1 < 5) CHECK(beta_schedule(t, size, deltas[k + 1]) < b);
      }
    }
  }
}

TEST_CASE("confidence bounds") {
  const auto p = summary({1.0, -0.5}, {0.1, 0.3});
  SUBCASE("zero beta collapses onto the mean") {
    const auto b = confidence_bounds(p, {0, 1}, 0.0);
    CHECK(b.lcb == p.mean);
    CHECK(b.ucb == p.mean);
  }
  SUBCASE("hand arithmetic") {
    const auto b = confidence_bounds(p, {0, 1}, 1.0);
    CHECK(b.lcb[0] == doctest::Approx(0.9));
    CHECK(b.ucb[0] == doctest::Approx(1.1));
  }
  SUBCASE("prior model has width 4 at beta_sqrt 2") {
    gp::Model prior = gp::fit_posterior(gp::Matrix(0, 1), Vector(0),
                                        {gp::RbfKernel{1.0, 0.3}, 0.1});
    gp::Matrix x(5, 1);
    x << -1, -0.5, 0, 0.5, 1;
    const CandidatePool pool = make_pool(x, std::nullopt, "grid");
    const auto b = confidence_bounds(prior, pool, iota_indices(5), 2.0);
    for (Index i = 0; i < 5; ++i) {
      CHECK(b.ucb[i] - b.lcb[i] == doctest::Approx(4.0).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(confidence_bounds(p, {0, 1}, -1.0), InputError);
  CHECK_THROWS_AS(confidence_bounds(p, {1, 0}, 1.0), InputError);
  CHECK_THROWS_AS(confidence_bounds(p, {0}, 1.0), InputError);
}

TEST_CASE("superlevel-set filter") {
  SUBCASE("hand example") {
    const auto b = confidence_bounds(summary({1.0, 0.0}, {0.1, 0.1}), {0, 1}, 1.0);
    const auto roi = filter_roi(b);
    CHECK(roi.threshold == doctest::Approx(0.9));
    CHECK(roi.indices == std::vector<Index>{0});
    CHECK(roi.ratio == 0.5);
    CHECK(roi.contains(0));
    CHECK_FALSE(roi.contains(1));
  }
  SUBCASE("vacuous filter keeps the whole pool") {
    const auto b = confidence_bounds(summary({1.0, 0.0, -2.0}, {1.0, 1.0, 1.0}),
                                     {0, 1, 2}, 10.0);
    const auto roi = filter_roi(b);
    CHECK(roi.indices.size() == 3);
    CHECK(roi.ratio == 1.0);
  }
  SUBCASE("zero beta keeps the argmax set") {
    const auto b = confidence_bounds(summary({0.3, 0.7, 0.7, -1.0}, {1, 1, 1, 1}),
                                     {0, 1, 2, 3}, 0.0);
    CHECK(filter_roi(b).indices == std::vector<Index>{1, 2});
  }
}

TEST_CASE("observation partition") {
  RegionOfInterest roi;
  roi.indices = {7, 9};
  const std::vector<Observation> s = {{3, 0.1}, {7, 0.2}};
  const auto sub = partition_observations(s, roi);
  REQUIRE(sub.size() == 1);
  CHECK(sub[0].index == 7);
  CHECK(sub[0].y == 0.2);

  roi.indices = {3, 7};
  const auto all = partition_observations(s, roi);
  REQUIRE(all.size() == 2);
  CHECK(all[0].index == 3);
  CHECK(all[1].index == 7);

  roi.indices = {100};
  CHECK(partition_observations(s, roi).empty());
}

TEST_CASE("per-step intersection") {
  RegionOfInterest roi;
  roi.indices = {0, 1};
  const auto g = interval({0, 1}, {0.0, 0.0}, {2.0, 1.0});
  const auto r = interval({0, 1}, {1.0, 2.0}, {3.0, 3.0});
  const auto x = intersect_bounds(g, r, roi);
  CHECK(x.lcb[0] == 1.0);
  CHECK(x.ucb[0] == 2.0);
  CHECK_FALSE(x.empty[0]);
  CHECK(x.width(0) == 1.0);
  CHECK(x.empty[1]);
  CHECK(x.width(1) == 0.0);

  const auto same = intersect_bounds(g, g, roi);
  CHECK(same.lcb == g.lcb);
  CHECK(same.ucb == g.ucb);

  RegionOfInterest wider;
  wider.indices = {0, 5};
  CHECK_THROWS_AS(intersect_bounds(g, r, wider), InputError);
}

TEST_CASE("historical intersection") {
  const auto prev = as_step(interval({1, 2}, {0.0, 0.0}, {3.0, 1.0}));
  const auto step = as_step(interval({1, 2}, {1.0, 2.0}, {4.0, 3.0}));
  const auto h = intersect_bounds_historical(prev, step);
  CHECK(h.mode == IntersectionMode::Historical);
  CHECK(h.lcb[0] == 1.0);
  CHECK(h.ucb[0] == 3.0);
  CHECK(h.empty[1]);
  CHECK(h.width(1) == 0.0);

  const auto idem = intersect_bounds_historical(prev, prev);
  CHECK(idem.lcb == prev.lcb);
  CHECK(idem.ucb == prev.ucb);

  SUBCASE("domain change drops and restarts history") {
    const auto moved = as_step(interval({2, 5}, {-5.0, -5.0}, {5.0, 5.0}));
    const auto m = intersect_bounds_historical(prev, moved);
    CHECK(m.indices == std::vector<Index>{2, 5});
    CHECK(m.lcb[0] == 0.0);
    CHECK(m.ucb[0] == 1.0);
    CHECK(m.lcb[1] == -5.0);
    CHECK(m.ucb[1] == 5.0);
  }
  SUBCASE("empty flag is sticky") {
    const auto wide = as_step(interval({1, 2}, {-9.0, -9.0}, {9.0, 9.0}));
    const auto again = intersect_bounds_historical(h, wide);
    CHECK(again.empty[1]);
    CHECK(again.width(1) == 0.0);
  }
}

TEST_CASE("historical widths match a fold-left oracle over 50 steps") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const Index n = 12;
  const auto idx = iota_indices(n);
  std::vector<double> lo(n, -1e300), hi(n, 1e300);
  std::optional<IntersectedBounds> run;
  std::vector<double> last_width(n, 1e300);
  for (int step = 0; step < 50; ++step) {
    std::vector<double> l(n), h(n);
    for (Index i = 0; i < n; ++i) {
      const double c = normal(rng), w = u(rng);
      l[i] = c - w;
      h[i] = c + w;
      lo[i] = std::max(lo[i], l[i]);
      hi[i] = std::min(hi[i], h[i]);
    }
    const auto s = as_step(interval(idx, l, h));
    run = run ? intersect_bounds_historical(*run, s) : s;
    for (Index i = 0; i < n; ++i) {
      const double want = hi[i] < lo[i] ? 0.0 : hi[i] - lo[i];
      CHECK(run->width(i) == doctest::Approx(want).epsilon(1e-15));
      CHECK(run->width(i) <= last_width[i]);
      last_width[i] = run->width(i);
    }
  }
}

TEST_CASE("interval algebra over 1000 randomized cases") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> size(1, 40);
  std::uniform_real_distribution<double> beta(0.0, 3.0);
  for (int c = 0; c < 1000; ++c) {
    const Index n = size(rng);
    const auto post = random_summary(rng, n);
    double b1 = beta(rng), b2 = beta(rng);
    if (b1 > b2) std::swap(b1, b2);
    const auto idx = iota_indices(n);
    const auto roi1 = filter_roi(confidence_bounds(post, idx, b1));
    const auto roi2 = filter_roi(confidence_bounds(post, idx, b2));
    REQUIRE_FALSE(roi1.indices.empty());
    CHECK(std::includes(roi2.indices.begin(), roi2.indices.end(),
                        roi1.indices.begin(), roi1.indices.end()));
    CHECK(roi1.ratio > 0.0);
    CHECK(roi1.ratio <= 1.0);

    // ROI model posterior on the ROI indices.
    const auto roi_post = random_summary(rng, static_cast<Index>(roi2.indices.size()));
    const auto global_b = confidence_bounds(post, idx, b2);
    const auto roi_b = confidence_bounds(roi_post, roi2.indices, b2, ModelTag::Roi);
    const auto x = intersect_bounds(global_b, roi_b, roi2);
    for (Index k = 0; k < x.size(); ++k) {
      const Index i = x.indices[static_cast<std::size_t>(k)];
      const double wg = global_b.ucb[i] - global_b.lcb[i];
      const double wr = roi_b.ucb[k] - roi_b.lcb[k];
      CHECK(x.width(k) <= std::min(wg, wr) + 1e-12);
      CHECK(x.width(k) >= 0.0);
      if (!x.empty[static_cast<std::size_t>(k)]) {
        CHECK(x.lcb[k] >= global_b.lcb[i]);
        CHECK(x.ucb[k] <= global_b.ucb[i]);
        CHECK(x.lcb[k] >= roi_b.lcb[k]);
        CHECK(x.ucb[k] <= roi_b.ucb[k]);
      }
    }
  }
}

TEST_CASE("expected improvement") {
  CHECK(expected_improvement(0.5, 1.0, 0.5) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(expected_improvement(0.0, 0.0, 1.0) == 0.0);
  CHECK(expected_improvement(2.0, 0.0, 1.0) == 0.0);
  // Far above the incumbent EI tends to mean - best.
  CHECK(expected_improvement(10.0, 0.1, 0.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(expected_improvement(0.0, 1.0, 0.5) > 0.0);
  CHECK(expected_improvement(0.0, 1.0, 0.5) < expected_improvement(0.0, 2.0, 0.5));
}

TEST_CASE("select_next tie-breaking") {
  const std::vector<double> s = {0.2, 0.9, 0.9};
  const std::vector<Index> e = {4, 7, 9};
  CHECK(select_next(s, e) == 7);
  const std::vector<double> rev_s = {0.9, 0.9, 0.2};
  const std::vector<Index> rev_e = {9, 7, 4};
  CHECK(select_next(rev_s, rev_e) == 7);
  const std::vector<double> one = {-3.0};
  const std::vector<Index> one_i = {12};
  CHECK(select_next(one, one_i) == 12);
  const std::vector<double> flat = {1.0, 1.0, 1.0};
  const std::vector<Index> flat_i = {5, 2, 8};
  CHECK(select_next(flat, flat_i) == 2);
  CHECK_THROWS_AS(select_next(std::vector<double>{}, std::vector<Index>{}),
                  InputError);
}

TEST_CASE("acquisition specs") {
  SUBCASE("defaults and aliases") {
    CHECK(parse_method("ici").scope == Scope::Intersect);
    CHECK(parse_method("RCI").scope == Scope::Roi);
    CHECK(parse_method("rts").family == Family::RTS);
    CHECK(parse_method("ucb").scope == Scope::Global);
    CHECK(parse_method("CIWidth:roi").scope == Scope::Roi);
    const auto c = canonical(parse_method("ICI"));
    CHECK(c.family == Family::CIWidth);
    CHECK(c.scope == Scope::Intersect);
    CHECK(canonical(parse_method("RTS")).family == Family::TS);
  }
  SUBCASE("contradictory pairs are rejected") {
    CHECK_THROWS_AS(parse_method("ICI:ROI"), InputError);
    CHECK_THROWS_AS(parse_method("RCI:Global"), InputError);
    CHECK_THROWS_AS(parse_method("TS:Intersect"), InputError);
    CHECK_THROWS_AS(parse_method("EI:Intersect"), InputError);
    CHECK_THROWS_AS(parse_method("PI"), InputError);
    CHECK_THROWS_AS(parse_method("UCB:nowhere"), InputError);
  }
  SUBCASE("every allowed pair round-trips through its name") {
    int count = 0;
    for (const Family f : kAllFamilies) {
      for (const Scope s : allowed_scopes(f)) {
        AcquisitionSpec spec{f, s};
        CHECK_NOTHROW(validate(spec));
        const auto back = parse_method(method_name(spec));
        CHECK(back.family == f);
        CHECK(back.scope == s);
        ++count;
      }
      for (const Scope s : {Scope::Global, Scope::Roi, Scope::Intersect}) {
        const auto allowed = allowed_scopes(f);
        if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
          CHECK_THROWS_AS(validate(AcquisitionSpec{f, s}), InputError);
        }
      }
    }
    CHECK(count == 13);
  }
  CHECK_THROWS_AS(validate(AcquisitionSpec{Family::UCB, Scope::Global, -1.0}),
                  InputError);
}
