#include "drivestyle/idm.hpp"

#include <cmath>
#include <numbers>

#include "drivestyle/errors.hpp"

namespace drivestyle {

void IdmParams::validate() const {
  if (!(v_star > 0.0 && t_headway > 0.0 && d_min > 0.0 && a_max > 0.0 && b_comf > 0.0)) {
    throw DataError("IDM parameters must be strictly positive");
  }
  if (!(delta > 0.0)) throw DataError("IDM exponent must be positive");
}

nlohmann::json params_to_json(const IdmParams& p) {
  return nlohmann::json{{"v_star", p.v_star}, {"t_headway", p.t_headway}, {"d_min", p.d_min},
                        {"a_max", p.a_max},   {"b_comf", p.b_comf},       {"delta", p.delta}};
}

IdmParams params_from_json(const nlohmann::json& j) {
  try {
    IdmParams p;
    p.v_star = j.at("v_star").get<double>();
    p.t_headway = j.at("t_headway").get<double>();
    p.d_min = j.at("d_min").get<double>();
    p.a_max = j.at("a_max").get<double>();
    p.b_comf = j.at("b_comf").get<double>();
    p.delta = j.value("delta", kIdmDelta);
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed IDM parameter set: ") + e.what());
  }
}

double desired_gap(const IdmParams& p, const CfState& s) {
  const double dynamic = s.v * p.t_headway + s.v * (s.v - s.v_leader) / (2.0 * std::sqrt(p.a_max * p.b_comf));
  return p.d_min + std::max(0.0, dynamic);
}

double idm_acceleration(const IdmParams& p, const CfState& s) {
  const double ratio = desired_gap(p, s) / s.gap;
  const double x = s.v / p.v_star;
  const double free = p.delta == 4.0 ? (x * x) * (x * x) : std::pow(x, p.delta);
  return p.a_max * (1.0 - free - ratio * ratio);
}

double equilibrium_gap(const IdmParams& p, double v) {
  const double free = 1.0 - std::pow(v / p.v_star, p.delta);
  if (!(free > 0.0)) throw DataError("no equilibrium gap at or above the desired velocity");
  return (p.d_min + v * p.t_headway) / std::sqrt(free);
}

Rollout simulate(const IdmParams& p, FollowerState initial, std::span<const LeaderState> leader_track,
                 std::size_t steps, double dt) {
  if (leader_track.size() < steps) throw DataError("leader track shorter than the simulation horizon");
  Rollout out;
  out.positions.reserve(steps + 1);
  out.speeds.reserve(steps + 1);
  out.accelerations.reserve(steps);
  double x = initial.position;
  double v = std::max(0.0, initial.speed);
  out.positions.push_back(x);
  out.speeds.push_back(v);
  for (std::size_t k = 0; k < steps; ++k) {
    const LeaderState& leader = leader_track[k];
    double gap = leader.position - x - leader.standoff;
    if (gap <= 0.0) {
      gap = kMinSimulationGap;
      out.collided = true;
    }
    const double a = idm_acceleration(p, {v, leader.speed, gap});
    const double v_next = std::max(0.0, v + a * dt);
    x += (v + v_next) * dt / 2.0;
    v = v_next;
    out.accelerations.push_back(a);
    out.positions.push_back(x);
    out.speeds.push_back(v);
  }
  return out;
}

PredictionWindow prediction_window(const CarFollowingPair& pair, std::size_t start, double horizon) {
  const std::size_t steps = samples_for(horizon);
  if (start + steps >= pair.samples.size()) {
    throw DataError("pair (follower " + std::to_string(pair.follower_id) + ") lacks " + std::to_string(steps) +
                    " samples after start " + std::to_string(start));
  }
  PredictionWindow w;
  const auto& first = pair.samples[start].follower;
  w.initial = {first.position, first.speed};
  w.leader_track.reserve(steps + 1);
  w.observed_positions.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const PairFrame& f = pair.samples[start + k];
    w.leader_track.push_back({f.leader.position, f.leader.speed, f.standoff()});
    w.observed_positions.push_back(f.follower.position);
  }
  return w;
}

PredictionResult score_prediction(const IdmParams& p, const PredictionWindow& window, RmseMode mode) {
  if (window.observed_positions.empty()) throw DataError("empty prediction window");
  const std::size_t steps = window.observed_positions.size() - 1;
  const Rollout rollout = simulate(p, window.initial, window.leader_track, steps);

  PredictionResult result;
  result.collided = rollout.collided;
  const std::size_t stride = mode == RmseMode::kWholeSeconds ? kSamplesPerSecond : 1;
  double ss = 0.0;
  for (std::size_t k = stride; k <= steps; k += stride) {
    result.predicted_positions.push_back(rollout.positions[k]);
    result.observed_positions.push_back(window.observed_positions[k]);
    const double e = rollout.positions[k] - window.observed_positions[k];
    ss += e * e;
  }
  const std::size_t count = result.predicted_positions.size();
  result.rmse = count == 0 ? 0.0 : std::sqrt(ss / static_cast<double>(count));
  return result;
}

PredictionResult rmse_5s(const IdmParams& p, const CarFollowingPair& pair, std::size_t start, RmseMode mode) {
  return score_prediction(p, prediction_window(pair, start, kPredictionHorizon), mode);
}

double squared_residual_sum(const IdmParams& p, std::span<const AccelerationObservation> points) {
  double sum = 0.0;
  for (const auto& obs : points) {
    const double r = obs.acceleration - idm_acceleration(p, obs.state);
    sum += r * r;
  }
  return sum;
}

double log_likelihood_from_residuals(double squared_residuals, std::size_t n, NoiseModel noise) {
  if (!(noise.sigma > 0.0)) throw DataError("noise sigma must be positive");
  const double normalizer = std::log(std::sqrt(2.0 * std::numbers::pi) * noise.sigma);
  return -squared_residuals / (2.0 * noise.sigma * noise.sigma) - static_cast<double>(n) * normalizer;
}

double log_likelihood(const IdmParams& p, NoiseModel noise, std::span<const AccelerationObservation> points) {
  return log_likelihood_from_residuals(squared_residual_sum(p, points), points.size(), noise);
}

}  // namespace drivestyle
