#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivestyle/idm.hpp"
#include "drivestyle/trajectory.hpp"

namespace drivestyle {

inline constexpr std::size_t kCalibratedParams = 5;

/// Box constraints on (v*, T, d_min, a_max, b_comf). lo == hi pins a parameter.
struct ParamBounds {
  std::array<double, kCalibratedParams> lo{5.0, 0.3, 0.05, 0.1, 0.5};
  std::array<double, kCalibratedParams> hi{45.0, 4.0, 10.0, 4.0, 5.0};

  void validate() const;
  bool contains(const IdmParams& p) const;
};

std::array<double, kCalibratedParams> to_array(const IdmParams& p);
IdmParams from_array(const std::array<double, kCalibratedParams>& x, double delta = kIdmDelta);

/// Name of calibrated parameter i ("v_star", "t_headway", ...).
const char* param_name(std::size_t i);

/// Evaluation windows start after the feature window when the pair is long
/// enough, otherwise at the first sample.
inline constexpr std::size_t kDefaultAnchorSamples = 150;

std::size_t evaluation_start(const CarFollowingPair& pair, std::size_t anchor_samples = kDefaultAnchorSamples);

/// One calibration cluster, reduced to its prediction windows.
struct CalibrationProblem {
  std::vector<PredictionWindow> windows;
  ParamBounds bounds;
  RmseMode mode = RmseMode::kWholeSeconds;
  /// Pairs dropped because they could not host a 5 s window.
  std::size_t excluded = 0;
};

CalibrationProblem make_problem(std::span<const CarFollowingPair> pairs, const ParamBounds& bounds = {},
                                RmseMode mode = RmseMode::kWholeSeconds,
                                std::size_t anchor_samples = kDefaultAnchorSamples);

struct MeanRmse {
  double value = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;
};

/// Arithmetic mean of the 5 s prediction RMSE over the windows, summed in order.
double mean_rmse(const IdmParams& p, std::span<const PredictionWindow> windows,
                 RmseMode mode = RmseMode::kWholeSeconds);

/// Mean over pairs; pairs too short for a window are excluded and counted.
MeanRmse mean_rmse(const IdmParams& p, std::span<const CarFollowingPair> pairs,
                   RmseMode mode = RmseMode::kWholeSeconds, std::size_t anchor_samples = kDefaultAnchorSamples);

struct CalibrateOptions {
  std::size_t budget = 8000;
  std::size_t starts = 16;
  /// Latin-hypercube samples drawn per start before the best ones seed the simplex runs.
  std::size_t samples_per_start = 4;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  double delta = kIdmDelta;
};

struct CalibrationResult {
  IdmParams params;
  double objective_value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  std::size_t pairs = 0;
  std::size_t excluded = 0;
  /// Names of parameters that ended on a bound.
  std::vector<std::string> bounds_hit;
};

/// Multi-start bounded Nelder-Mead on the mean RMSE. Latin-hypercube samples
/// of the box seed `starts` simplex searches, each with an equal share of the
/// remaining budget. The best evaluated point is returned.
CalibrationResult calibrate(const CalibrationProblem& problem, const CalibrateOptions& options = {});

/// Objective with one parameter moved by -rel and +rel of its value (clipped
/// to the bounds), the others held fixed.
struct ParamSensitivity {
  std::string name;
  double minus = 0.0;
  double plus = 0.0;
};

std::vector<ParamSensitivity> sensitivity(const CalibrationProblem& problem, const IdmParams& p, double rel = 0.1);

nlohmann::json calibration_to_json(const CalibrationResult& r);
CalibrationResult calibration_from_json(const nlohmann::json& j);

inline constexpr const char* kStyleTimid = "timid";
inline constexpr const char* kStyleNeutral = "neutral";
inline constexpr const char* kStyleAggressive = "relatively aggressive";

/// Names clusters from their parameters. The timid cluster wins a Borda count
/// over small v*, large T and large d_min; among the others the smallest
/// d_min is relatively aggressive and the rest are neutral. Ties throw.
std::vector<std::string> label_styles(std::span<const IdmParams> cluster_params);

}  // namespace drivestyle
