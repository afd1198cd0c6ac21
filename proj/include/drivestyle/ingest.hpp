#pragma once

#include <istream>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "drivestyle/trajectory.hpp"

namespace drivestyle {

/// A column given either by header name or by 0-based index.
using ColumnRef = std::variant<std::string, std::size_t>;

enum class LengthUnit { kFeet, kMeters };

/// How the net gap between follower and leader is obtained.
enum class GapConvention {
  kHeadwayMinusLeaderLength,  // space headway minus leader length, headway alone when length is missing
  kHeadway,                   // space headway column as-is
  kFrontBumperPositions,      // leader position - leader length - follower position
  kCentroidPositions,         // leader position - follower position - mean of both lengths
};

/// Semantic field -> source column. Optional fields may be left empty.
struct ColumnMapping {
  ColumnRef vehicle_id = std::string("Vehicle_ID");
  ColumnRef frame = std::string("Frame_ID");
  ColumnRef position = std::string("Local_Y");
  ColumnRef speed = std::string("v_Vel");
  std::optional<ColumnRef> acceleration = ColumnRef(std::string("v_Acc"));
  ColumnRef lane = std::string("Lane_ID");
  ColumnRef leader_id = std::string("Preceding");
  std::optional<ColumnRef> space_headway = ColumnRef(std::string("Space_Headway"));
  std::optional<ColumnRef> vehicle_length = ColumnRef(std::string("v_Length"));
};

struct IngestConfig {
  ColumnMapping columns;
  LengthUnit units = LengthUnit::kFeet;
  /// 0 means auto-detect between comma and whitespace.
  char delimiter = 0;
  bool has_header = true;
  GapConvention gap_convention = GapConvention::kHeadwayMinusLeaderLength;
  /// Lanes to keep; empty keeps every lane.
  std::set<int> lanes;
  /// Leader ids at or below this value mean "no leader" (NGSIM uses 0).
  VehicleId no_leader_id = 0;
};

inline constexpr double kFeetToMeters = 0.3048;

/// Parses a delimited trajectory table. Samples come back grouped by vehicle
/// and sorted by frame; accelerations are filled by central differences of
/// speed when no acceleration column is mapped.
std::vector<TrajectorySample> load_trajectories(std::istream& in, const IngestConfig& config);
std::vector<TrajectorySample> load_trajectories(const std::string& path, const IngestConfig& config);

/// FNV-1a over the raw file bytes, as 16 hex digits.
std::string file_fingerprint(const std::string& path);

}  // namespace drivestyle
