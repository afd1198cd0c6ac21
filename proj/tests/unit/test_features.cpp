#include <doctest.h>

#include <cmath>
#include <sstream>

#include "../support.hpp"
#include "drivestyle/errors.hpp"
#include "drivestyle/features.hpp"
#include "drivestyle/rng.hpp"

using namespace drivestyle;

TEST_CASE("constant following") {
  std::vector<KinematicFrame> frames(150, KinematicFrame{10.0, 0.0, 10.0, 20.0});
  const auto x = compute_features(frames);
  const double expected[kFeatureCount] = {10, 10, 0, 0, 0, 0, 0, 20, 20, 20, 0, 0, 0};
  for (std::size_t i = 0; i < kFeatureCount; ++i) CHECK(x[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("constant acceleration ramp") {
  std::vector<KinematicFrame> frames;
  for (int k = 0; k <= 100; ++k) frames.push_back({0.1 * k, 1.0, 10.0, 30.0});
  const auto x = compute_features(frames);
  CHECK(x[kMaxAccel] == 1.0);
  CHECK(x[kMinAccel] == 1.0);
  CHECK(x[kMeanAccel] == 1.0);
  CHECK(x[kStdAccel] == 0.0);
  CHECK(x[kMaxSpeed] == doctest::Approx(10.0));
}

TEST_CASE("standard deviations use n - 1") {
  std::vector<KinematicFrame> frames{{1.0, 0.0, 1.0, 5.0}, {3.0, 0.0, 1.0, 5.0}};
  const auto x = compute_features(frames);
  CHECK(x[kStdSpeed] == doctest::Approx(std::sqrt(2.0)));
  CHECK(x[kMeanSpeedDiff] == doctest::Approx(-1.0));
}

TEST_CASE("a single frame has zero spread") {
  std::vector<KinematicFrame> frames{{4.0, 0.3, 5.0, 9.0}};
  const auto x = compute_features(frames);
  CHECK(x[kStdSpeed] == 0.0);
  CHECK(x[kStdGap] == 0.0);
  CHECK(x[kMeanGap] == 9.0);
  CHECK_THROWS_AS(compute_features(std::span<const KinematicFrame>{}), DataError);
}

TEST_CASE("ordering and sign invariants on random windows") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<KinematicFrame> frames;
    const int n = 1 + static_cast<int>(rng.below(200));
    for (int k = 0; k < n; ++k) {
      frames.push_back({rng.uniform(0, 30), rng.normal(0, 1), rng.uniform(0, 30), rng.uniform(0.5, 80)});
    }
    const auto x = compute_features(frames);
    CHECK(x[kMaxSpeed] >= x[kMeanSpeed]);
    CHECK(x[kMaxAccel] >= x[kMeanAccel]);
    CHECK(x[kMeanAccel] >= x[kMinAccel]);
    CHECK(x[kMaxGap] >= x[kMeanGap]);
    CHECK(x[kMeanGap] >= x[kMinGap]);
    CHECK(x[kMinGap] > 0.0);
    for (auto i : {kStdSpeed, kStdAccel, kStdGap, kStdSpeedDiff}) CHECK(x[i] >= 0.0);
  }
}

TEST_CASE("extract_features uses the first window of the pair") {
  const auto pair = testing_support::simulated_pair(kReferenceNeutral, testing_support::oscillating, 20.0, 15.0, 12.0);
  const auto a = extract_features(pair, 15.0);
  auto shorter = pair;
  shorter.samples.resize(150);
  CHECK(extract_features(shorter, 15.0).values == a.values);
  CHECK_THROWS_AS(extract_features(pair, 25.0), DataError);
}

TEST_CASE("two-point standardizer") {
  FeatureVector zero, two;
  zero.values.fill(0.0);
  two.values.fill(2.0);
  const std::vector<FeatureVector> data{zero, two};
  const auto s = fit_standardizer(data);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    CHECK(s.means[i] == doctest::Approx(1.0));
    CHECK(s.stds[i] == doctest::Approx(std::sqrt(2.0)));
  }
  FeatureVector m;
  m.values = s.means;
  for (double z : standardize(s, m)) CHECK(z == 0.0);
  FeatureVector plus;
  for (std::size_t i = 0; i < kFeatureCount; ++i) plus[i] = s.means[i] + s.stds[i];
  for (double z : standardize(s, plus)) CHECK(z == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("standardized data has zero mean and unit spread; round trip") {
  Rng rng(11);
  std::vector<FeatureVector> data(57);
  for (auto& f : data) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) f[i] = rng.normal(static_cast<double>(i) * 3.0, 0.5 + static_cast<double>(i));
  }
  const auto s = fit_standardizer(data);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    double sum = 0.0, ss = 0.0;
    for (const auto& f : data) sum += standardize(s, f)[i];
    const double mean = sum / static_cast<double>(data.size());
    for (const auto& f : data) ss += std::pow(standardize(s, f)[i] - mean, 2);
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::abs(std::sqrt(ss / static_cast<double>(data.size() - 1)) - 1.0) < 1e-12);
  }
  for (const auto& f : data) {
    const auto back = unstandardize(s, standardize(s, f));
    for (std::size_t i = 0; i < kFeatureCount; ++i) CHECK(std::abs(back[i] - f[i]) <= 1e-12 * std::max(1.0, std::abs(f[i])));
  }
}

TEST_CASE("a constant indicator cannot be standardized") {
  std::vector<FeatureVector> data(3);
  for (std::size_t k = 0; k < data.size(); ++k) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) data[k][i] = static_cast<double>(k + i);
    data[k][kMeanGap] = 4.0;
  }
  try {
    fit_standardizer(data);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("X10") != std::string::npos);
  }
}

TEST_CASE("features CSV header") {
  std::ostringstream out;
  FeatureVector f;
  f.values.fill(1.5);
  const std::vector<FeatureVector> rows{f};
  write_features_csv(out, rows);
  const std::string text = out.str();
  CHECK(text.find("X1,X2,X3,X4,X5,X6,X7,X8,X9,X10,X11,X12,X13\n") != std::string::npos);
  CHECK(feature_symbol(0) == "X1");
  CHECK(feature_symbol(12) == "X13");
}
