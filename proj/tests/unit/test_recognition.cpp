#include <doctest.h>

#include <cmath>

#include "../support.hpp"
#include "drivestyle/errors.hpp"
#include "drivestyle/features.hpp"
#include "drivestyle/recognition.hpp"
#include "drivestyle/rng.hpp"

using namespace drivestyle;
using namespace testing_support;

TEST_CASE("accumulating windows") {
  const auto pair = simulated_pair(kReferenceNeutral, oscillating, 5.0, 15.0, 12.0);
  const auto one = frames_of(pair, 0, 1);
  const ObservationWindow w1 = accumulate(ObservationWindow{}, one);
  CHECK(w1.size() == 1);
  CHECK(w1.t_dur() == doctest::Approx(0.1));

  const auto first = frames_of(pair, 0, 10);
  const auto second = frames_of(pair, 10, 20);
  const ObservationWindow w2 = accumulate(accumulate(ObservationWindow{}, first), second);
  CHECK(w2.size() == 20);
  CHECK(w2.t_dur() == doctest::Approx(2.0));

  const auto skipped = frames_of(pair, 21, 25);
  CHECK_THROWS_AS(accumulate(w2, skipped), DataError);
  const auto overlap = frames_of(pair, 19, 25);
  CHECK_THROWS_AS(accumulate(w2, overlap), DataError);
}

TEST_CASE("window validation") {
  const auto pair = simulated_pair(kReferenceNeutral, oscillating, 2.0, 15.0, 12.0);
  auto frames = frames_of(pair, 0, 5);
  frames[2].gap = 0.0;
  CHECK_THROWS_AS(ObservationWindow{frames}, DataError);
  frames = frames_of(pair, 0, 5);
  frames[3].follower.speed = -0.5;
  CHECK_THROWS_AS(ObservationWindow{frames}, DataError);
  CHECK_THROWS_AS(ObservationWindow::from_pair(pair, 21), DataError);
}

TEST_CASE("noise-free aggressive driving is recognised by likelihood") {
  const StyleLibrary lib = reference_library();
  const auto pair = simulated_pair(kReferenceAggressive, oscillating, 10.0, 14.0, 12.0);
  const auto w = ObservationWindow::from_pair(pair, 20);
  const auto out = recognize_m2(lib, w);
  CHECK(out.cluster == 1);
  CHECK(out.params == kReferenceAggressive);
  const double best = -20.0 * std::log(std::sqrt(2.0 * M_PI) * lib.sigma_default);
  CHECK(out.score == doctest::Approx(best).epsilon(1e-9));
  for (double s : out.per_cluster_scores) CHECK(s <= out.score);
}

TEST_CASE("a single observation is enough for both methods") {
  const StyleLibrary lib = reference_library();
  const auto pair = simulated_pair(kReferenceTimid, oscillating, 3.0, 30.0, 12.0);
  const auto w = ObservationWindow::from_pair(pair, 1);
  const auto m1 = recognize_m1(lib, w);
  const auto m2 = recognize_m2(lib, w, 0.15);
  CHECK(m1.cluster >= 0);
  CHECK(m1.cluster < 3);
  CHECK(std::isfinite(m1.score));
  CHECK(std::isfinite(m2.score));
  CHECK_THROWS_AS(recognize_m2(lib, ObservationWindow{}, 0.15), DataError);
  CHECK_THROWS_AS(recognize_m2(lib, w, 0.0), ConfigError);
}

TEST_CASE("likelihood choice does not depend on sigma") {
  const StyleLibrary lib = reference_library();
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ObservedFrame> frames;
    const std::size_t n = 1 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = rng.uniform(0, 25);
      frames.push_back({0.1 * static_cast<double>(i), {0, v, rng.normal(0, 1)}, {0, rng.uniform(0, 25), 0}, rng.uniform(1, 60)});
    }
    const ObservationWindow w(frames);
    const int reference = recognize_m2(lib, w, 0.15).cluster;
    for (double sigma : {0.01, 0.05, 0.1, 0.2, 1.0, 10.0}) CHECK(recognize_m2(lib, w, sigma).cluster == reference);
  }
}

TEST_CASE("identical accelerations fall to the lowest cluster") {
  StyleLibrary lib = reference_library();
  // Same except the comfortable deceleration, which drops out when v = v_L.
  IdmParams a = kReferenceNeutral, b = kReferenceNeutral, c = kReferenceNeutral;
  b.b_comf = 2.5;
  c.b_comf = 0.7;
  lib.prototypes = {a, b, c};
  std::vector<ObservedFrame> frames;
  for (int i = 0; i < 20; ++i) frames.push_back({0.1 * i, {0, 10.0 + 0.1 * i, 0.2}, {0, 10.0 + 0.1 * i, 0}, 15.0});
  const auto out = recognize_m2(lib, ObservationWindow(frames), 0.15);
  CHECK(out.cluster == 0);
  CHECK(out.per_cluster_scores[0] == out.per_cluster_scores[1]);
  CHECK(out.per_cluster_scores[1] == out.per_cluster_scores[2]);
}

TEST_CASE("growing a window equals recognising it fresh") {
  const StyleLibrary lib = reference_library();
  const auto pair = simulated_pair(kReferenceTimid, oscillating, 8.0, 28.0, 12.0);
  ObservationWindow grown;
  for (std::size_t i = 0; i < 60; i += 7) {
    grown = accumulate(grown, frames_of(pair, i, std::min<std::size_t>(i + 7, 60)));
    const auto fresh = ObservationWindow::from_pair(pair, grown.size());
    const auto a = recognize_m2(lib, grown, 0.15);
    const auto b = recognize_m2(lib, fresh, 0.15);
    CHECK(a.cluster == b.cluster);
    CHECK(a.per_cluster_scores == b.per_cluster_scores);
    CHECK(recognize_m1(lib, grown).per_cluster_scores == recognize_m1(lib, fresh).per_cluster_scores);
  }
}

TEST_CASE("nearest centroid agrees with the offline labels") {
  const auto& offline = synthetic_offline();
  const auto& pairs = offline.data.split.offline_pairs;
  for (std::size_t i = 0; i < offline.clustered.size(); ++i) {
    const auto w = ObservationWindow::from_pair(pairs[offline.clustered[i]], 150);
    const auto out = recognize_m1(offline.library, w);
    CHECK(out.cluster == offline.library.kmeans.labels[i]);
    CHECK(out.params == offline.library.prototypes[static_cast<std::size_t>(out.cluster)]);
  }
}

TEST_CASE("a point on a centroid is at distance zero") {
  // Only the kept coordinates matter, so a point with the centroid's
  // coordinates and nothing in the discarded axes projects exactly onto it.
  const StyleLibrary& lib = synthetic_offline().library;
  for (int c = 0; c < lib.clusters(); ++c) {
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(kFeatureCount);
    coords.head(lib.pca.n_kept) = lib.kmeans.centroids.row(c).transpose();
    const Eigen::VectorXd z = reconstruct(lib.pca, coords);
    CHECK(assign(lib.kmeans, project(lib.pca, z)) == c);
    CHECK((project(lib.pca, z) - lib.kmeans.centroids.row(c).transpose()).norm() < 1e-9);
  }
}

TEST_CASE("nearest centroid ignores a rigid time shift") {
  const StyleLibrary& lib = synthetic_offline().library;
  const auto pair = simulated_pair(kReferenceNeutral, oscillating, 6.0, 15.0, 12.0);
  const ObservationWindow base(frames_of(pair, 0, 40));
  auto shifted_frames = frames_of(pair, 0, 40, 1234.5);
  for (auto& f : shifted_frames) {
    f.follower.position += 500.0;
    f.leader.position += 500.0;
  }
  const ObservationWindow shifted(shifted_frames);
  const auto a = recognize_m1(lib, base);
  const auto b = recognize_m1(lib, shifted);
  CHECK(a.cluster == b.cluster);
  CHECK(a.per_cluster_scores == b.per_cluster_scores);
}

TEST_CASE("prediction delegates to the simulator") {
  const StyleLibrary lib = reference_library();
  RecognitionOutcome forced;
  forced.cluster = 0;
  forced.params = lib.aggregate;
  const auto pair = simulated_pair(kReferenceNeutral, oscillating, 8.0, 15.0, 12.0);
  const auto window = prediction_window(pair, 10);
  const Rollout a = predict_trajectory(lib, forced, window.initial, window.leader_track);
  const Rollout b = simulate(lib.aggregate, window.initial, window.leader_track, 50);
  CHECK(a.positions == b.positions);
  CHECK(a.speeds == b.speeds);

  RecognitionOutcome neutral;
  neutral.cluster = 0;
  neutral.params = kReferenceNeutral;
  const double v = 12.0, s = equilibrium_gap(kReferenceNeutral, v);
  std::vector<LeaderState> track;
  for (int k = 0; k <= 50; ++k) track.push_back({s + 4.5 + v * 0.1 * k, v, 4.5});
  const Rollout r = predict_trajectory(lib, neutral, {0.0, v}, track);
  for (double speed : r.speeds) CHECK(speed == doctest::Approx(v).epsilon(1e-9));
}

TEST_CASE("outcome JSON") {
  const StyleLibrary lib = reference_library();
  const auto pair = simulated_pair(kReferenceAggressive, oscillating, 3.0, 14.0, 12.0);
  const auto j = outcome_to_json(recognize_m2(lib, ObservationWindow::from_pair(pair, 20)));
  CHECK(j.at("method") == "m2");
  CHECK(j.at("style") == "relatively aggressive");
  CHECK(j.at("scores").size() == 3);
}
