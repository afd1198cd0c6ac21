#include "drivestyle/recognition.hpp"

#include <cmath>
#include <limits>

#include "drivestyle/errors.hpp"
#include "drivestyle/features.hpp"

namespace drivestyle {

namespace {

constexpr double kContiguityTolerance = 1e-6;

void check_frame(const ObservedFrame& f) {
  if (!(f.follower.speed >= 0.0) || !(f.leader.speed >= 0.0)) throw DataError("observed speed must be non-negative");
  if (!(f.gap > 0.0)) throw DataError("observed gap must be positive (leader required at every frame)");
  if (!std::isfinite(f.follower.acceleration) || !std::isfinite(f.follower.position) || !std::isfinite(f.t)) {
    throw DataError("observation contains non-finite values");
  }
}

void check_step(double previous, double next) {
  if (std::abs(next - previous - kSampleDt) > kContiguityTolerance) {
    throw DataError("observations are not contiguous at 0.1 s (t=" + std::to_string(previous) + " then " +
                    std::to_string(next) + ")");
  }
}

}  // namespace

ObservationWindow::ObservationWindow(std::vector<ObservedFrame> frames) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    check_frame(frames[i]);
    if (i > 0) check_step(frames[i - 1].t, frames[i].t);
  }
  frames_ = std::move(frames);
}

ObservationWindow ObservationWindow::from_pair(const CarFollowingPair& pair, std::size_t samples) {
  if (samples > pair.samples.size()) throw DataError("observation window longer than the pair");
  std::vector<ObservedFrame> frames;
  frames.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto& f = pair.samples[i];
    // Time relative to the episode start.
    frames.push_back({static_cast<double>(i) * kSampleDt,
                      {f.follower.position, f.follower.speed, f.follower.acceleration},
                      {f.leader.position, f.leader.speed, f.leader.acceleration},
                      f.follower.gap});
  }
  return ObservationWindow(std::move(frames));
}

ObservationWindow accumulate(ObservationWindow existing, std::span<const ObservedFrame> new_samples) {
  double last = existing.empty() ? 0.0 : existing.back().t;
  bool have_last = !existing.empty();
  for (const auto& f : new_samples) {
    check_frame(f);
    if (have_last) check_step(last, f.t);
    last = f.t;
    have_last = true;
    existing.frames_.push_back(f);
  }
  return existing;
}

std::vector<KinematicFrame> kinematic_frames(const ObservationWindow& window) {
  std::vector<KinematicFrame> out;
  out.reserve(window.size());
  for (const auto& f : window.frames()) out.push_back({f.follower.speed, f.follower.acceleration, f.leader.speed, f.gap});
  return out;
}

std::vector<AccelerationObservation> acceleration_observations(const ObservationWindow& window) {
  std::vector<AccelerationObservation> out;
  out.reserve(window.size());
  for (const auto& f : window.frames()) out.push_back({{f.follower.speed, f.leader.speed, f.gap}, f.follower.acceleration});
  return out;
}

RecognitionOutcome recognize_m1(const StyleLibrary& lib, const ObservationWindow& window) {
  if (window.empty()) throw DataError("cannot recognise from an empty window");
  const auto frames = kinematic_frames(window);
  const auto z = standardize(lib.standardizer, compute_features(frames));
  const Eigen::VectorXd point = project(lib.pca, Eigen::Map<const Eigen::VectorXd>(z.data(), kFeatureCount));

  RecognitionOutcome out;
  out.method = RecognitionMethod::kNearestCentroid;
  out.cluster = assign(lib.kmeans, point);
  for (Eigen::Index c = 0; c < lib.kmeans.centroids.rows(); ++c) {
    out.per_cluster_scores.push_back((lib.kmeans.centroids.row(c).transpose() - point).norm());
  }
  out.score = out.per_cluster_scores[static_cast<std::size_t>(out.cluster)];
  out.params = lib.prototypes[static_cast<std::size_t>(out.cluster)];
  out.style_name = lib.style_names[static_cast<std::size_t>(out.cluster)];
  return out;
}

RecognitionOutcome recognize_m2(const StyleLibrary& lib, const ObservationWindow& window, double sigma) {
  if (window.empty()) throw DataError("cannot recognise from an empty window");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  const auto points = acceleration_observations(window);

  RecognitionOutcome out;
  out.method = RecognitionMethod::kLikelihood;
  // The argmax of L equals the argmin of the residual sum for every sigma;
  // selecting on the sums keeps the choice exactly sigma-invariant.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < lib.prototypes.size(); ++c) {
    const double residuals = squared_residual_sum(lib.prototypes[c], points);
    out.per_cluster_scores.push_back(log_likelihood_from_residuals(residuals, points.size(), {sigma}));
    if (residuals < best) {
      best = residuals;
      out.cluster = static_cast<int>(c);
    }
  }
  out.score = out.per_cluster_scores[static_cast<std::size_t>(out.cluster)];
  out.params = lib.prototypes[static_cast<std::size_t>(out.cluster)];
  out.style_name = lib.style_names[static_cast<std::size_t>(out.cluster)];
  return out;
}

RecognitionOutcome recognize_m2(const StyleLibrary& lib, const ObservationWindow& window) {
  return recognize_m2(lib, window, lib.sigma_default);
}

Rollout predict_trajectory(const StyleLibrary& lib, const RecognitionOutcome& outcome, FollowerState current,
                           std::span<const LeaderState> leader_track, double horizon) {
  if (outcome.cluster < 0 || outcome.cluster >= lib.clusters()) throw DataError("outcome cluster not in library");
  return simulate(outcome.params, current, leader_track, samples_for(horizon));
}

nlohmann::json outcome_to_json(const RecognitionOutcome& outcome) {
  return nlohmann::json{{"method", outcome.method == RecognitionMethod::kLikelihood ? "m2" : "m1"},
                        {"cluster", outcome.cluster},
                        {"style", outcome.style_name},
                        {"score", outcome.score},
                        {"scores", outcome.per_cluster_scores},
                        {"params", params_to_json(outcome.params)}};
}

}  // namespace drivestyle
