#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivestyle/calibration.hpp"
#include "drivestyle/config.hpp"
#include "drivestyle/kmeans.hpp"
#include "drivestyle/recognition.hpp"
#include "drivestyle/style_library.hpp"

namespace drivestyle {

/// Loaded and split car-following data.
struct PreparedData {
  std::size_t extracted = 0;
  DatasetSplit split;
  std::string dataset_hash;
};

/// load -> extract_pairs -> split, from the config's input file.
PreparedData prepare_data(const PipelineConfig& config);
PreparedData prepare_data(std::span<const TrajectorySample> samples, const PipelineConfig& config,
                          std::string dataset_hash);

struct OfflineResult {
  StyleLibrary library;
  PreparedData data;
  std::vector<ElbowPoint> elbow;
  /// Offline pair index of each K-means label (pairs too short for the
  /// feature window are left out).
  std::vector<std::size_t> clustered;
  std::vector<CalibrationResult> cluster_calibrations;
  CalibrationResult aggregate_calibration;
  nlohmann::json report;
  /// File name -> exact file contents (library, reports, figure CSVs).
  std::map<std::string, std::string> artifacts;
};

/// Learns the style library from the offline pairs: features, PCA, elbow scan,
/// K-means, per-cluster and aggregate calibration, labelling.
OfflineResult run_offline(const PipelineConfig& config);
OfflineResult run_offline(std::span<const TrajectorySample> samples, const PipelineConfig& config,
                          std::string dataset_hash);
OfflineResult run_offline(PreparedData data, const PipelineConfig& config);

/// Both recognitions of one pair's first `samples` frames.
struct PairRecognition {
  RecognitionOutcome m1;
  RecognitionOutcome m2;
};

PairRecognition recognize_pair(const StyleLibrary& lib, const CarFollowingPair& pair, std::size_t samples,
                               double sigma);

struct CurvePoint {
  double t_dur = 0.0;
  double mean_rmse = 0.0;
  std::size_t samples = 0;
};

struct Improvement {
  std::string method;
  std::string baseline;
  /// (baseline - method) / baseline per t_dur.
  std::vector<double> by_t_dur;
  double best = 0.0;
  double best_t_dur = 0.0;
};

inline constexpr const char* kMethodM1 = "m1";
inline constexpr const char* kMethodM2 = "m2";
inline constexpr const char* kBaselineLit = "lit";
inline constexpr const char* kBaselineAggregate = "aggregate";

struct BenchmarkOptions {
  std::vector<double> t_durs{0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 10.0};
  double sigma = 0.15;
  RmseMode mode = RmseMode::kWholeSeconds;
  unsigned workers = 0;
};

struct BenchmarkReport {
  /// Method or baseline name -> curve over t_dur.
  std::map<std::string, std::vector<CurvePoint>> curves;
  std::vector<Improvement> improvements;
  /// Per t_dur, how many pairs each cluster received (m1 and m2).
  std::map<std::string, std::vector<std::vector<std::size_t>>> cluster_counts;
  std::size_t pairs = 0;
  std::size_t excluded = 0;
  nlohmann::json metadata = nlohmann::json::object();
};

/// For every usable pair and t_dur: recognise from the first t_dur seconds,
/// predict 5 s from the last observed sample, score against the observed
/// follower; the two baselines are scored from the same start.
BenchmarkReport run_benchmark(const StyleLibrary& lib, std::span<const CarFollowingPair> online_pairs,
                              const BenchmarkOptions& options);

struct SweepRow {
  double sigma = 0.0;
  double t_dur = 0.0;
  double mean_rmse = 0.0;
  std::size_t samples = 0;
};

/// Method-2 mean RMSE for every (sigma, t_dur).
std::vector<SweepRow> run_sigma_sweep(const StyleLibrary& lib, std::span<const CarFollowingPair> online_pairs,
                                      std::span<const double> sigmas, std::span<const double> t_durs,
                                      RmseMode mode = RmseMode::kWholeSeconds, unsigned workers = 0);

nlohmann::json benchmark_to_json(const BenchmarkReport& report);
std::string benchmark_curves_csv(const BenchmarkReport& report);
std::string benchmark_text(const BenchmarkReport& report);
std::string sweep_csv(std::span<const SweepRow> rows);

/// All benchmark artifacts keyed by file name.
std::map<std::string, std::string> benchmark_artifacts(const BenchmarkReport& report);

/// First line of every figure CSV.
inline constexpr const char* kCsvSchemaHeader = "# schema_version: 1";

}  // namespace drivestyle
