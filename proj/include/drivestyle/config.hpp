#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivestyle/calibration.hpp"
#include "drivestyle/ingest.hpp"
#include "drivestyle/pairs.hpp"

namespace drivestyle {

/// Every knob of the offline and benchmark pipelines.
struct PipelineConfig {
  std::string input_path;
  IngestConfig ingest;

  double min_duration = kDefaultMinDuration;
  double split_fraction = 0.8;
  SplitStrategy split_strategy = SplitStrategy::kRandom;
  double feature_window = 15.0;
  bool standardize_features = true;

  int k = 3;
  int k_min = 1;
  int k_max = 10;
  int restarts = 20;
  int n_kept = 2;

  ParamBounds bounds;
  std::size_t calibration_budget = 8000;
  std::size_t calibration_starts = 16;
  RmseMode rmse_mode = RmseMode::kWholeSeconds;

  double sigma = 0.15;
  std::vector<double> t_durs{0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 10.0};
  std::vector<double> sweep_sigmas;  // filled with 0.01..0.20 by default
  std::vector<double> sweep_t_durs{0.5, 2.0, 5.0};

  /// Manual cluster -> style name overrides.
  std::map<int, std::string> style_labels;

  std::uint64_t seed = 42;
  unsigned workers = 0;

  PipelineConfig();
  void validate() const;
};

/// Reads a JSON config. Relative input paths resolve against `base_dir`.
PipelineConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = "");
PipelineConfig load_config(const std::string& path);
nlohmann::json config_to_json(const PipelineConfig& c);

/// Seeds for the individual stages, derived from the global seed.
std::uint64_t split_seed(const PipelineConfig& c);
std::uint64_t kmeans_seed(const PipelineConfig& c);
std::uint64_t calibration_seed(const PipelineConfig& c, int cluster);

}  // namespace drivestyle
