#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support.hpp"
#include "drivestyle/calibration.hpp"
#include "drivestyle/errors.hpp"
#include "drivestyle/pairs.hpp"
#include "drivestyle/synth.hpp"

using namespace drivestyle;
using testing_support::simulated_pair;

namespace {

std::vector<CarFollowingPair> clean_cluster(const IdmParams& p, int count) {
  std::vector<CarFollowingPair> pairs;
  for (int i = 0; i < count; ++i) {
    const double base = 10.0 + i;
    const double period = 12.0 + 2.0 * i;
    auto leader = [=](double t) { return base + 2.0 * std::sin(2.0 * M_PI * t / period + i); };
    pairs.push_back(simulated_pair(p, leader, 25.0, equilibrium_gap(p, leader(0.0)), leader(0.0), 2 * i + 2, 2 * i + 1));
  }
  return pairs;
}

std::vector<CarFollowingPair> planted_pairs(int style) {
  SynthOptions o;
  o.seed = 3;
  const auto corpus = generate_corpus(o);
  std::vector<CarFollowingPair> pairs;
  for (const auto& p : extract_pairs(corpus.samples)) {
    if (corpus.planted[static_cast<std::size_t>((p.follower_id - 2) / 2)] == style) pairs.push_back(p);
  }
  return pairs;
}

}  // namespace

TEST_CASE("a single pair averages to its own RMSE") {
  const auto pairs = clean_cluster(kReferenceTimid, 1);
  const auto start = evaluation_start(pairs[0]);
  CHECK(start == kDefaultAnchorSamples);
  const auto m = mean_rmse(kLiteratureParams, pairs);
  CHECK(m.used == 1);
  CHECK(m.value == rmse_5s(kLiteratureParams, pairs[0], start).rmse);
}

TEST_CASE("short pairs fall back to the first sample or are excluded") {
  auto pairs = clean_cluster(kReferenceNeutral, 2);
  pairs[0].samples.resize(160);
  pairs[1].samples.resize(40);
  CHECK(evaluation_start(pairs[0]) == 0);
  const auto m = mean_rmse(kReferenceNeutral, pairs);
  CHECK(m.used == 1);
  CHECK(m.excluded == 1);
}

TEST_CASE("generating parameters have zero error") {
  const auto pairs = clean_cluster(kReferenceNeutral, 5);
  CHECK(mean_rmse(kReferenceNeutral, pairs).value < 1e-9);
}

TEST_CASE("collapsed bounds return the point") {
  const auto pairs = clean_cluster(kReferenceNeutral, 1);
  ParamBounds b;
  b.lo = b.hi = to_array(kReferenceAggressive);
  CalibrateOptions opts;
  opts.budget = 200;
  const auto r = calibrate(make_problem(pairs, b), opts);
  CHECK(r.params == kReferenceAggressive);
}

TEST_CASE("bounds validation") {
  ParamBounds b;
  b.lo[1] = 5.0;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  CHECK_THROWS_AS(make_problem(std::vector<CarFollowingPair>{}, ParamBounds{}), DataError);
}

TEST_CASE("recovers the neutral prototype from clean data") {
  const auto pairs = clean_cluster(kReferenceNeutral, 8);
  CalibrateOptions opts;
  opts.seed = 4;
  const auto r = calibrate(make_problem(pairs), opts);
  CHECK(r.objective_value < 0.05);
  CHECK(r.evaluations <= opts.budget);
  CHECK(std::abs(r.params.t_headway - kReferenceNeutral.t_headway) <= 0.2 * kReferenceNeutral.t_headway);
  CHECK(std::abs(r.params.d_min - kReferenceNeutral.d_min) <= 0.2 * kReferenceNeutral.d_min);
  for (std::size_t i = 0; i < kCalibratedParams; ++i) {
    CHECK(to_array(r.params)[i] >= ParamBounds{}.lo[i]);
    CHECK(to_array(r.params)[i] <= ParamBounds{}.hi[i]);
  }
}

TEST_CASE("timid prototype beats the literature values on timid traffic") {
  const auto pairs = planted_pairs(2);
  REQUIRE(pairs.size() >= 3);
  CHECK(mean_rmse(kReferenceTimid, pairs).value <= mean_rmse(kLiteratureParams, pairs).value);
}

TEST_CASE("calibration is reproducible across worker counts") {
  const auto pairs = planted_pairs(0);
  const auto problem = make_problem(pairs);
  CalibrateOptions a;
  a.budget = 1500;
  a.seed = 9;
  a.workers = 1;
  CalibrateOptions b = a;
  b.workers = 3;
  const auto ra = calibrate(problem, a);
  const auto rb = calibrate(problem, b);
  CHECK(ra.params == rb.params);
  CHECK(ra.objective_value == rb.objective_value);
  CHECK(ra.evaluations == rb.evaluations);

  const auto back = calibration_from_json(calibration_to_json(ra));
  CHECK(back.params == ra.params);
  CHECK(back.objective_value == ra.objective_value);
}

TEST_CASE("published prototypes are labelled by content") {
  const std::vector<IdmParams> rows{kReferenceNeutral, kReferenceAggressive, kReferenceTimid};
  const auto names = label_styles(rows);
  CHECK(names == std::vector<std::string>{kStyleNeutral, kStyleAggressive, kStyleTimid});

  const std::vector<IdmParams> permuted{kReferenceTimid, kReferenceNeutral, kReferenceAggressive};
  CHECK(label_styles(permuted) == std::vector<std::string>{kStyleTimid, kStyleNeutral, kStyleAggressive});
}

TEST_CASE("identical prototypes cannot be labelled") {
  const std::vector<IdmParams> rows{kReferenceNeutral, kReferenceNeutral};
  CHECK_THROWS_AS(label_styles(rows), DataError);
  const std::vector<IdmParams> single{kReferenceNeutral};
  CHECK(label_styles(single) == std::vector<std::string>{kStyleNeutral});
}
