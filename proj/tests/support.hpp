#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "drivestyle/idm.hpp"
#include "drivestyle/trajectory.hpp"

namespace testing_support {

using namespace drivestyle;

inline constexpr double kCarLength = 4.5;

// Follower simulated with `p` behind a leader that follows `leader_speed(t)`.
// Gaps are net gaps (front bumper of the leader minus its length).
inline CarFollowingPair simulated_pair(const IdmParams& p, const std::function<double(double)>& leader_speed,
                                       double seconds, double initial_gap, double follower_speed,
                                       VehicleId follower_id = 2, VehicleId leader_id = 1, FrameIndex first_frame = 0) {
  const std::size_t n = samples_for(seconds);
  std::vector<LeaderState> track(n);
  double x = initial_gap + kCarLength;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = leader_speed(static_cast<double>(k) * kSampleDt);
    if (k > 0) x += 0.5 * (track[k - 1].speed + v) * kSampleDt;
    track[k] = {x, v, kCarLength};
  }
  const Rollout r = simulate(p, {0.0, follower_speed}, track, n - 1);

  CarFollowingPair pair;
  pair.follower_id = follower_id;
  pair.leader_id = leader_id;
  pair.lane_id = 1;
  for (std::size_t k = 0; k < n; ++k) {
    PairFrame f;
    f.follower.vehicle_id = follower_id;
    f.follower.frame = first_frame + static_cast<FrameIndex>(k);
    f.follower.time = static_cast<double>(f.follower.frame) * kSampleDt;
    f.follower.position = r.positions[k];
    f.follower.speed = r.speeds[k];
    f.follower.acceleration = k < r.accelerations.size() ? r.accelerations[k] : r.accelerations.back();
    f.follower.lane_id = 1;
    f.follower.leader_id = leader_id;
    f.follower.gap = track[k].position - kCarLength - r.positions[k];
    f.follower.length = kCarLength;
    f.leader.vehicle_id = leader_id;
    f.leader.frame = f.follower.frame;
    f.leader.time = f.follower.time;
    f.leader.position = track[k].position;
    f.leader.speed = track[k].speed;
    f.leader.lane_id = 1;
    f.leader.length = kCarLength;
    if (k > 0) f.leader.acceleration = (track[k].speed - track[k - 1].speed) / kSampleDt;
    pair.samples.push_back(f);
  }
  return pair;
}

inline double oscillating(double t) { return 12.0 + 1.5 * std::sin(2.0 * M_PI * t / 20.0); }

// All samples of a pair, leader rows first, as ingestion would return them.
inline std::vector<TrajectorySample> flatten(const std::vector<CarFollowingPair>& pairs) {
  std::vector<TrajectorySample> out;
  for (const auto& p : pairs) {
    for (const auto& f : p.samples) out.push_back(f.leader);
    for (const auto& f : p.samples) out.push_back(f.follower);
  }
  return out;
}

}  // namespace testing_support

#include "drivestyle/config.hpp"
#include "drivestyle/pipeline.hpp"
#include "drivestyle/synth.hpp"

namespace testing_support {

// Offline run over the default synthetic corpus, computed once per binary.
inline const OfflineResult& synthetic_offline() {
  static const OfflineResult result = [] {
    const SynthCorpus corpus = generate_corpus();
    PipelineConfig config;
    config.ingest.units = LengthUnit::kMeters;
    return run_offline(corpus.samples, config, "synthetic");
  }();
  return result;
}

// The learned library with the published prototypes swapped in, so the
// likelihood tests know exactly which parameter sets compete.
inline StyleLibrary reference_library() {
  StyleLibrary lib = synthetic_offline().library;
  lib.prototypes = {kReferenceNeutral, kReferenceAggressive, kReferenceTimid};
  lib.style_names = {"neutral", "relatively aggressive", "timid"};
  return lib;
}

inline std::vector<ObservedFrame> frames_of(const CarFollowingPair& pair, std::size_t from, std::size_t to,
                                            double t0 = 0.0) {
  std::vector<ObservedFrame> out;
  for (std::size_t i = from; i < to; ++i) {
    const auto& f = pair.samples[i];
    out.push_back({t0 + static_cast<double>(i) * kSampleDt,
                   {f.follower.position, f.follower.speed, f.follower.acceleration},
                   {f.leader.position, f.leader.speed, f.leader.acceleration},
                   f.follower.gap});
  }
  return out;
}

}  // namespace testing_support
