#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivestyle/idm.hpp"
#include "drivestyle/style_library.hpp"
#include "drivestyle/trajectory.hpp"

namespace drivestyle {

struct VehicleKinematics {
  double position = 0.0;
  double speed = 0.0;
  double acceleration = 0.0;
};

/// One observed instant of a follower and its leader.
struct ObservedFrame {
  double t = 0.0;
  VehicleKinematics follower;
  VehicleKinematics leader;
  double gap = 0.0;
};

/// Contiguous 10 Hz observations of one vehicle, oldest first.
class ObservationWindow {
 public:
  ObservationWindow() = default;
  /// Validates contiguity, non-negative speeds and positive gaps.
  explicit ObservationWindow(std::vector<ObservedFrame> frames);

  /// The first `samples` frames of a pair.
  static ObservationWindow from_pair(const CarFollowingPair& pair, std::size_t samples);

  std::span<const ObservedFrame> frames() const { return frames_; }
  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  /// n samples cover n * 0.1 s.
  double t_dur() const { return static_cast<double>(frames_.size()) * kSampleDt; }
  const ObservedFrame& back() const { return frames_.back(); }

 private:
  friend ObservationWindow accumulate(ObservationWindow existing, std::span<const ObservedFrame> new_samples);
  std::vector<ObservedFrame> frames_;
};

/// Appends samples that continue the window at 0.1 s spacing; gaps or
/// overlaps throw DataError.
ObservationWindow accumulate(ObservationWindow existing, std::span<const ObservedFrame> new_samples);

enum class RecognitionMethod { kNearestCentroid, kLikelihood };

struct RecognitionOutcome {
  RecognitionMethod method = RecognitionMethod::kLikelihood;
  int cluster = 0;
  std::string style_name;
  /// Distance to the centroid (nearest centroid) or log-likelihood.
  double score = 0.0;
  IdmParams params;
  std::vector<double> per_cluster_scores;
};

/// Features over the whole window, standardized and projected with the
/// offline models, then the nearest centroid.
RecognitionOutcome recognize_m1(const StyleLibrary& lib, const ObservationWindow& window);

/// Prototype with the largest local log-likelihood of the observed
/// accelerations; ties go to the lower cluster index.
RecognitionOutcome recognize_m2(const StyleLibrary& lib, const ObservationWindow& window, double sigma);
RecognitionOutcome recognize_m2(const StyleLibrary& lib, const ObservationWindow& window);

/// Simulates the recognised parameter set from the current state.
Rollout predict_trajectory(const StyleLibrary& lib, const RecognitionOutcome& outcome, FollowerState current,
                           std::span<const LeaderState> leader_track, double horizon = kPredictionHorizon);

/// Kinematic frames (for the indicators) and acceleration observations (for
/// the likelihood) of a window.
std::vector<KinematicFrame> kinematic_frames(const ObservationWindow& window);
std::vector<AccelerationObservation> acceleration_observations(const ObservationWindow& window);

nlohmann::json outcome_to_json(const RecognitionOutcome& outcome);

}  // namespace drivestyle
