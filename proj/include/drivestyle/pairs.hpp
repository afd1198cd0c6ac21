#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivestyle/trajectory.hpp"

namespace drivestyle {

inline constexpr double kDefaultMinDuration = 15.0;

/// Extracts maximal car-following episodes. A frame belongs to an episode
/// when the follower records the same leader as the previous frame, both
/// vehicles are in the follower's lane, the leader is observed at that frame,
/// the gap is positive and the frames are consecutive.
std::vector<CarFollowingPair> extract_pairs(std::span<const TrajectorySample> samples,
                                            double min_duration = kDefaultMinDuration);

/// Flattens a pair back into time-sorted samples of both vehicles.
std::vector<TrajectorySample> pair_samples(const CarFollowingPair& pair);

enum class SplitStrategy { kRandom, kOrdered };

/// Partitions pairs by pair: floor(fraction * n) offline, the rest online.
/// Both sides are kept non-empty.
DatasetSplit split_dataset(std::vector<CarFollowingPair> pairs, double fraction, std::uint64_t seed,
                           SplitStrategy strategy = SplitStrategy::kRandom);

nlohmann::json pair_to_json(const CarFollowingPair& pair);
CarFollowingPair pair_from_json(const nlohmann::json& j);
nlohmann::json pairs_to_json(std::span<const CarFollowingPair> pairs);
std::vector<CarFollowingPair> pairs_from_json(const nlohmann::json& j);

}  // namespace drivestyle
