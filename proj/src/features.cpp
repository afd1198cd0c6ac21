#include "drivestyle/features.hpp"

#include <algorithm>
#include <cmath>

#include "drivestyle/errors.hpp"
#include "drivestyle/text_format.hpp"

namespace drivestyle {

std::string feature_symbol(std::size_t index) { return "X" + std::to_string(index + 1); }

namespace {

struct Summary {
  double max = 0.0, min = 0.0, mean = 0.0, std = 0.0;
};

template <typename Get>
Summary summarize(std::span<const KinematicFrame> frames, Get get) {
  Summary s;
  const std::size_t n = frames.size();
  if (n == 0) return s;
  s.max = s.min = get(frames[0]);
  double sum = 0.0;
  for (const auto& f : frames) {
    const double x = get(f);
    s.max = std::max(s.max, x);
    s.min = std::min(s.min, x);
    sum += x;
  }
  s.mean = sum / static_cast<double>(n);
  // Mean is clamped into [min, max] so rounding never breaks the ordering.
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (n >= 2) {
    double ss = 0.0;
    for (const auto& f : frames) {
      const double d = get(f) - s.mean;
      ss += d * d;
    }
    s.std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

}  // namespace

FeatureVector compute_features(std::span<const KinematicFrame> frames) {
  if (frames.empty()) throw DataError("feature window is empty");
  const Summary speed = summarize(frames, [](const KinematicFrame& f) { return f.speed; });
  const Summary accel = summarize(frames, [](const KinematicFrame& f) { return f.acceleration; });
  const Summary gap = summarize(frames, [](const KinematicFrame& f) { return f.gap; });
  const Summary diff = summarize(frames, [](const KinematicFrame& f) { return f.leader_speed - f.speed; });

  FeatureVector x;
  x[kMaxSpeed] = speed.max;
  x[kMeanSpeed] = speed.mean;
  x[kStdSpeed] = speed.std;
  x[kMaxAccel] = accel.max;
  x[kMinAccel] = accel.min;
  x[kMeanAccel] = accel.mean;
  x[kStdAccel] = accel.std;
  x[kMaxGap] = gap.max;
  x[kMinGap] = gap.min;
  x[kMeanGap] = gap.mean;
  x[kStdGap] = gap.std;
  x[kMeanSpeedDiff] = diff.mean;
  x[kStdSpeedDiff] = diff.std;
  return x;
}

FeatureVector extract_features(const CarFollowingPair& pair, double window) {
  const std::size_t n = samples_for(window);
  if (n == 0) throw DataError("feature window must be positive");
  if (n > pair.samples.size()) {
    throw DataError("feature window of " + format_double(window) + " s exceeds episode of " +
                    format_double(pair.duration()) + " s (follower " + std::to_string(pair.follower_id) + ")");
  }
  std::vector<KinematicFrame> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = pair.samples[i];
    frames.push_back({f.follower.speed, f.follower.acceleration, f.leader.speed, f.follower.gap});
  }
  return compute_features(frames);
}

Standardizer fit_standardizer(std::span<const FeatureVector> features) {
  const std::size_t n = features.size();
  if (n < 2) throw DataError("standardizer needs at least 2 feature vectors");
  Standardizer s;
  for (std::size_t d = 0; d < kFeatureCount; ++d) {
    double sum = 0.0;
    for (const auto& f : features) sum += f[d];
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& f : features) ss += (f[d] - mean) * (f[d] - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0) || !std::isfinite(sd)) {
      throw DataError("feature " + feature_symbol(d) + " has zero variance; cannot standardize");
    }
    s.means[d] = mean;
    s.stds[d] = sd;
  }
  return s;
}

std::array<double, kFeatureCount> standardize(const Standardizer& s, const FeatureVector& f) {
  std::array<double, kFeatureCount> z{};
  for (std::size_t d = 0; d < kFeatureCount; ++d) z[d] = (f[d] - s.means[d]) / s.stds[d];
  return z;
}

FeatureVector unstandardize(const Standardizer& s, const std::array<double, kFeatureCount>& z) {
  FeatureVector f;
  for (std::size_t d = 0; d < kFeatureCount; ++d) f[d] = z[d] * s.stds[d] + s.means[d];
  return f;
}

void write_features_csv(std::ostream& out, std::span<const FeatureVector> features) {
  for (std::size_t d = 0; d < kFeatureCount; ++d) out << (d ? "," : "") << feature_symbol(d);
  out << '\n';
  for (const auto& f : features) {
    for (std::size_t d = 0; d < kFeatureCount; ++d) out << (d ? "," : "") << format_double(f[d]);
    out << '\n';
  }
}

}  // namespace drivestyle
