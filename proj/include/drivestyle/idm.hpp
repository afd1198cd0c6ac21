#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivestyle/trajectory.hpp"

namespace drivestyle {

/// Intelligent Driver Model parameters. Only the first five are calibrated.
struct IdmParams {
  double v_star = 0.0;     // desired velocity, m/s
  double t_headway = 0.0;  // desired time headway, s
  double d_min = 0.0;      // minimum spacing, m
  double a_max = 0.0;      // maximum acceleration, m/s^2
  double b_comf = 0.0;     // comfortable deceleration, m/s^2
  double delta = 4.0;      // free-drive exponent

  /// Throws DataError unless the calibrated fields are strictly positive.
  void validate() const;

  friend bool operator==(const IdmParams&, const IdmParams&) = default;
};

inline constexpr double kIdmDelta = 4.0;

/// Parameter values recommended in the car-following literature.
inline constexpr IdmParams kLiteratureParams{33.3, 2.0, 1.6, 0.73, 1.67, kIdmDelta};

/// Published per-style prototypes (clusters 0..2) and the single-cluster
/// aggregate estimate from the I-80 study.
inline constexpr IdmParams kReferenceNeutral{34.7, 1.0, 2.9, 0.5, 1.5, kIdmDelta};
inline constexpr IdmParams kReferenceAggressive{35.0, 1.0, 0.1, 0.4, 1.5, kIdmDelta};
inline constexpr IdmParams kReferenceTimid{18.5, 1.9, 4.5, 0.4, 1.4, kIdmDelta};
inline constexpr IdmParams kReferenceAggregate{19.0, 1.0, 0.3, 0.4, 1.4, kIdmDelta};

nlohmann::json params_to_json(const IdmParams& p);
IdmParams params_from_json(const nlohmann::json& j);

/// Instantaneous car-following situation.
struct CfState {
  double v = 0.0;         // follower speed
  double v_leader = 0.0;  // leader speed
  double gap = 0.0;       // net gap, > 0
};

/// d* = d_min + max(0, v T + v (v - v_L) / (2 sqrt(a_max b_comf))).
double desired_gap(const IdmParams& p, const CfState& s);

/// a = a_max [1 - (v/v*)^delta - (d*/d)^2].
double idm_acceleration(const IdmParams& p, const CfState& s);

/// Gap at which a follower at speed v behind a leader at the same speed does
/// not accelerate. Requires v < v*.
double equilibrium_gap(const IdmParams& p, double v);

struct LeaderState {
  double position = 0.0;
  double speed = 0.0;
  /// Position offset not counted as gap (leader length, front-bumper frame).
  double standoff = 0.0;
};

struct FollowerState {
  double position = 0.0;
  double speed = 0.0;
};

/// Follower trajectory produced by `simulate`. Index 0 is the initial state.
struct Rollout {
  std::vector<double> positions;
  std::vector<double> speeds;
  /// Acceleration applied during each step (size = steps).
  std::vector<double> accelerations;
  bool collided = false;
};

inline constexpr double kMinSimulationGap = 0.01;

/// Ballistic update over `steps` steps of `dt`:
///   v' = max(0, v + a dt),  x' = x + (v + v') dt / 2,
/// with the gap recomputed each step from the leader track (entry k is the
/// leader at step k). Gaps at or below zero are floored at 0.01 m and flag a
/// collision.
Rollout simulate(const IdmParams& p, FollowerState initial, std::span<const LeaderState> leader_track,
                 std::size_t steps, double dt = kSampleDt);

inline constexpr double kPredictionHorizon = 5.0;

/// Error comparison instants: the five whole seconds, or every frame.
enum class RmseMode { kWholeSeconds, kAllFrames };

struct PredictionResult {
  std::vector<double> predicted_positions;
  std::vector<double> observed_positions;
  double rmse = 0.0;
  bool collided = false;
};

/// Leader track and observed follower positions over [start, start + horizon].
struct PredictionWindow {
  FollowerState initial;
  std::vector<LeaderState> leader_track;  // steps + 1 entries
  std::vector<double> observed_positions;  // steps + 1 entries, index 0 = start
};

/// Cuts a prediction window out of a pair. Throws DataError when the pair
/// does not extend `horizon` seconds beyond `start`.
PredictionWindow prediction_window(const CarFollowingPair& pair, std::size_t start,
                                   double horizon = kPredictionHorizon);

/// Simulates the window and scores it.
PredictionResult score_prediction(const IdmParams& p, const PredictionWindow& window,
                                  RmseMode mode = RmseMode::kWholeSeconds);

/// S = sqrt(mean over comparison instants of (predicted - observed)^2) for
/// the prediction starting at sample `start` of the pair.
PredictionResult rmse_5s(const IdmParams& p, const CarFollowingPair& pair, std::size_t start,
                         RmseMode mode = RmseMode::kWholeSeconds);

struct NoiseModel {
  double sigma = 0.15;  // m/s^2
};

/// Observed state and acceleration at one data point.
struct AccelerationObservation {
  CfState state;
  double acceleration = 0.0;
};

/// Sum over points of (a_observed - a_IDM(observed state))^2.
double squared_residual_sum(const IdmParams& p, std::span<const AccelerationObservation> points);

/// Gaussian log-likelihood of the observed accelerations:
///   L = sum_i ln( exp(-r_i^2 / (2 sigma^2)) / (sqrt(2 pi) sigma) ),
/// with every residual taken at the observed state, no rollout.
double log_likelihood(const IdmParams& p, NoiseModel noise, std::span<const AccelerationObservation> points);

/// L from a precomputed residual sum over n points.
double log_likelihood_from_residuals(double squared_residuals, std::size_t n, NoiseModel noise);

}  // namespace drivestyle
