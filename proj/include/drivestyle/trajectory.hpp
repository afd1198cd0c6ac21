#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace drivestyle {

/// Sampling interval of the trajectory data (10 Hz).
inline constexpr double kSampleDt = 0.1;

/// Samples per second at the native rate.
inline constexpr std::size_t kSamplesPerSecond = 10;

using VehicleId = std::int64_t;
using FrameIndex = std::int64_t;

/// Converts a duration in seconds to a whole number of 10 Hz samples.
std::size_t samples_for(double seconds);

/// One 10 Hz observation of a vehicle, in SI units.
struct TrajectorySample {
  VehicleId vehicle_id = 0;
  FrameIndex frame = 0;
  double time = 0.0;          // s
  double position = 0.0;      // m, longitudinal
  double speed = 0.0;         // m/s
  double acceleration = 0.0;  // m/s^2
  int lane_id = 0;
  std::optional<VehicleId> leader_id;
  double gap = 0.0;  // m, net gap to the leader; meaningful only with leader_id
  std::optional<double> length;  // m

  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

/// Follower and leader observed at the same frame.
struct PairFrame {
  TrajectorySample follower;
  TrajectorySample leader;

  /// Distance between the two position references not counted as gap
  /// (the leader length under the front-bumper convention).
  double standoff() const { return leader.position - follower.position - follower.gap; }

  friend bool operator==(const PairFrame&, const PairFrame&) = default;
};

/// A maximal leader-follower episode without lane change or interference.
struct CarFollowingPair {
  VehicleId follower_id = 0;
  VehicleId leader_id = 0;
  int lane_id = 0;
  std::vector<PairFrame> samples;

  FrameIndex start_frame() const { return samples.empty() ? 0 : samples.front().follower.frame; }
  double duration() const { return static_cast<double>(samples.size()) * kSampleDt; }

  friend bool operator==(const CarFollowingPair&, const CarFollowingPair&) = default;
};

/// Canonical ordering of pairs: follower, then start frame, then leader.
bool pair_order(const CarFollowingPair& a, const CarFollowingPair& b);

struct DatasetSplit {
  std::vector<CarFollowingPair> offline_pairs;
  std::vector<CarFollowingPair> online_pairs;
  std::uint64_t seed = 0;
};

}  // namespace drivestyle
