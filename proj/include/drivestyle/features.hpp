#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "drivestyle/trajectory.hpp"

namespace drivestyle {

inline constexpr std::size_t kFeatureCount = 13;

/// Positions of the characteristic indicators X1..X13.
enum FeatureIndex : std::size_t {
  kMaxSpeed = 0,
  kMeanSpeed,
  kStdSpeed,
  kMaxAccel,
  kMinAccel,
  kMeanAccel,
  kStdAccel,
  kMaxGap,
  kMinGap,
  kMeanGap,
  kStdGap,
  kMeanSpeedDiff,
  kStdSpeedDiff,
};

/// "X1" .. "X13".
std::string feature_symbol(std::size_t index);

/// The 13 driving-style indicators of one car-following window.
struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Follower/leader kinematics at one instant, the only inputs the indicators need.
struct KinematicFrame {
  double speed = 0.0;
  double acceleration = 0.0;
  double leader_speed = 0.0;
  double gap = 0.0;
};

/// Indicators over an arbitrary window. Standard deviations use the n-1
/// convention and are 0 for fewer than two frames.
FeatureVector compute_features(std::span<const KinematicFrame> frames);

inline constexpr double kDefaultFeatureWindow = 15.0;

/// Indicators over the first `window` seconds of the pair.
FeatureVector extract_features(const CarFollowingPair& pair, double window = kDefaultFeatureWindow);

/// Per-dimension z-score parameters.
struct Standardizer {
  std::array<double, kFeatureCount> means{};
  std::array<double, kFeatureCount> stds{};
};

/// Mean and sample standard deviation per dimension; zero variance is rejected.
Standardizer fit_standardizer(std::span<const FeatureVector> features);

std::array<double, kFeatureCount> standardize(const Standardizer& s, const FeatureVector& f);
FeatureVector unstandardize(const Standardizer& s, const std::array<double, kFeatureCount>& z);

/// Writes a CSV with a X1..X13 header, one row per vector.
void write_features_csv(std::ostream& out, std::span<const FeatureVector> features);

}  // namespace drivestyle
