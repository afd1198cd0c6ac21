#include "drivestyle/pairs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "drivestyle/errors.hpp"
#include "drivestyle/rng.hpp"

namespace drivestyle {

namespace {

using FrameLookup = std::unordered_map<VehicleId, std::unordered_map<FrameIndex, const TrajectorySample*>>;

const TrajectorySample* find_sample(const FrameLookup& lookup, VehicleId id, FrameIndex frame) {
  const auto v = lookup.find(id);
  if (v == lookup.end()) return nullptr;
  const auto f = v->second.find(frame);
  return f == v->second.end() ? nullptr : f->second;
}

}  // namespace

std::vector<CarFollowingPair> extract_pairs(std::span<const TrajectorySample> samples, double min_duration) {
  std::vector<const TrajectorySample*> sorted;
  sorted.reserve(samples.size());
  FrameLookup lookup;
  for (const auto& s : samples) {
    sorted.push_back(&s);
    lookup[s.vehicle_id][s.frame] = &s;
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const TrajectorySample* a, const TrajectorySample* b) {
    if (a->vehicle_id != b->vehicle_id) return a->vehicle_id < b->vehicle_id;
    return a->frame < b->frame;
  });

  const std::size_t min_samples = samples_for(min_duration);
  std::vector<CarFollowingPair> pairs;
  CarFollowingPair current;

  auto close_episode = [&] {
    if (!current.samples.empty() && current.samples.size() >= std::max<std::size_t>(min_samples, 1)) {
      pairs.push_back(std::move(current));
    }
    current = CarFollowingPair{};
  };

  for (const TrajectorySample* f : sorted) {
    const TrajectorySample* leader = nullptr;
    if (f->leader_id && f->gap > 0.0) {
      leader = find_sample(lookup, *f->leader_id, f->frame);
      if (leader && (leader->lane_id != f->lane_id || leader->position <= f->position)) leader = nullptr;
    }

    if (!current.samples.empty()) {
      const TrajectorySample& prev = current.samples.back().follower;
      const bool continues = leader && prev.vehicle_id == f->vehicle_id && f->frame == prev.frame + 1 &&
                             *f->leader_id == current.leader_id && f->lane_id == current.lane_id;
      if (!continues) close_episode();
    }
    if (!leader) continue;
    if (current.samples.empty()) {
      current.follower_id = f->vehicle_id;
      current.leader_id = *f->leader_id;
      current.lane_id = f->lane_id;
    }
    current.samples.push_back(PairFrame{*f, *leader});
  }
  close_episode();
  return pairs;
}

std::vector<TrajectorySample> pair_samples(const CarFollowingPair& pair) {
  std::vector<TrajectorySample> out;
  out.reserve(pair.samples.size() * 2);
  for (const auto& frame : pair.samples) out.push_back(frame.follower);
  for (const auto& frame : pair.samples) out.push_back(frame.leader);
  return out;
}

DatasetSplit split_dataset(std::vector<CarFollowingPair> pairs, double fraction, std::uint64_t seed,
                           SplitStrategy strategy) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
  const std::size_t n = pairs.size();
  if (n < 2) throw DataError("at least 2 pairs are needed for a split, got " + std::to_string(n));

  std::size_t n_offline = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  n_offline = std::clamp<std::size_t>(n_offline, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (strategy == SplitStrategy::kRandom) {
    Rng rng(mix_seed(seed, 0x5711));
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[static_cast<std::size_t>(rng.below(i + 1))]);
    }
  }

  DatasetSplit split;
  split.seed = seed;
  std::vector<bool> offline(n, false);
  for (std::size_t i = 0; i < n_offline; ++i) offline[order[i]] = true;
  for (std::size_t i = 0; i < n; ++i) {
    (offline[i] ? split.offline_pairs : split.online_pairs).push_back(std::move(pairs[i]));
  }
  return split;
}

namespace {

nlohmann::json optional_or_null(const std::optional<VehicleId>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json track_json(const CarFollowingPair& pair, bool leader) {
  nlohmann::json position = nlohmann::json::array(), speed = nlohmann::json::array(),
                 acceleration = nlohmann::json::array(), gap = nlohmann::json::array(),
                 leader_id = nlohmann::json::array();
  std::optional<double> length;
  for (const auto& frame : pair.samples) {
    const TrajectorySample& s = leader ? frame.leader : frame.follower;
    position.push_back(s.position);
    speed.push_back(s.speed);
    acceleration.push_back(s.acceleration);
    gap.push_back(s.gap);
    leader_id.push_back(optional_or_null(s.leader_id));
    if (s.length) length = s.length;
  }
  nlohmann::json j{{"position", position}, {"speed", speed}, {"acceleration", acceleration}, {"gap", gap},
                   {"leader_id", leader_id}};
  j["length"] = length ? nlohmann::json(*length) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

nlohmann::json pair_to_json(const CarFollowingPair& pair) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : pair.samples) frames.push_back(f.follower.frame);
  return nlohmann::json{{"follower_id", pair.follower_id},
                        {"leader_id", pair.leader_id},
                        {"lane_id", pair.lane_id},
                        {"start_frame", pair.start_frame()},
                        {"duration", pair.duration()},
                        {"frame", frames},
                        {"follower", track_json(pair, false)},
                        {"leader", track_json(pair, true)}};
}

CarFollowingPair pair_from_json(const nlohmann::json& j) {
  try {
    CarFollowingPair pair;
    pair.follower_id = j.at("follower_id").get<VehicleId>();
    pair.leader_id = j.at("leader_id").get<VehicleId>();
    pair.lane_id = j.at("lane_id").get<int>();
    const auto& frames = j.at("frame");
    const auto& fol = j.at("follower");
    const auto& lead = j.at("leader");
    const std::size_t n = frames.size();
    for (const auto* track : {&fol, &lead}) {
      for (const char* key : {"position", "speed", "acceleration", "gap", "leader_id"}) {
        if (track->at(key).size() != n) throw DataError(std::string("pair track '") + key + "' length mismatch");
      }
    }
    auto read = [&](const nlohmann::json& track, std::size_t i, VehicleId id) {
      TrajectorySample s;
      s.vehicle_id = id;
      s.frame = frames[i].get<FrameIndex>();
      s.time = static_cast<double>(s.frame) * kSampleDt;
      s.position = track["position"][i].get<double>();
      s.speed = track["speed"][i].get<double>();
      s.acceleration = track["acceleration"][i].get<double>();
      s.gap = track["gap"][i].get<double>();
      s.lane_id = pair.lane_id;
      if (!track["leader_id"][i].is_null()) s.leader_id = track["leader_id"][i].get<VehicleId>();
      if (track.contains("length") && !track["length"].is_null()) s.length = track["length"].get<double>();
      return s;
    };
    pair.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      pair.samples.push_back(PairFrame{read(fol, i, pair.follower_id), read(lead, i, pair.leader_id)});
    }
    return pair;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed pair JSON: ") + e.what());
  }
}

nlohmann::json pairs_to_json(std::span<const CarFollowingPair> pairs) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : pairs) list.push_back(pair_to_json(p));
  return nlohmann::json{{"schema", "drivestyle.pairs/1"}, {"sample_dt", kSampleDt}, {"pairs", list}};
}

std::vector<CarFollowingPair> pairs_from_json(const nlohmann::json& j) {
  if (!j.contains("pairs")) throw DataError("pair file has no 'pairs' array");
  std::vector<CarFollowingPair> out;
  for (const auto& p : j.at("pairs")) out.push_back(pair_from_json(p));
  return out;
}

}  // namespace drivestyle
