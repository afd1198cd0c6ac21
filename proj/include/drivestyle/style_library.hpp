#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivestyle/calibration.hpp"
#include "drivestyle/features.hpp"
#include "drivestyle/idm.hpp"
#include "drivestyle/kmeans.hpp"
#include "drivestyle/pca.hpp"

namespace drivestyle {

inline constexpr double kDefaultSigma = 0.15;

/// Everything the online half needs from the offline half.
struct StyleLibrary {
  Standardizer standardizer;
  PcaModel pca;
  KmeansModel kmeans;
  /// Prototype parameters, indexed by cluster.
  std::vector<IdmParams> prototypes;
  std::vector<std::string> style_names;
  IdmParams literature = kLiteratureParams;
  IdmParams aggregate = kReferenceAggregate;
  double sigma_default = kDefaultSigma;
  /// Free-form provenance (seed, k, dataset fingerprint, ...).
  nlohmann::json metadata = nlohmann::json::object();

  int clusters() const { return kmeans.k; }

  /// Throws DataError when the parts are inconsistent.
  void validate() const;
};

nlohmann::json library_to_json(const StyleLibrary& lib);
StyleLibrary library_from_json(const nlohmann::json& j);

StyleLibrary load_library(const std::string& path);
void save_library(const StyleLibrary& lib, const std::string& path);

/// Canonical text of a JSON document (2-space indent, trailing newline).
std::string dump_json(const nlohmann::json& j);

}  // namespace drivestyle
