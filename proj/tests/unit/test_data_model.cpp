#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "../support.hpp"
#include "drivestyle/errors.hpp"
#include "drivestyle/ingest.hpp"
#include "drivestyle/pairs.hpp"

using namespace drivestyle;
using testing_support::simulated_pair;

namespace {

const char* kHeader = "Vehicle_ID,Frame_ID,Local_Y,v_Vel,v_Acc,Lane_ID,Preceding,Space_Headway,v_Length\n";

IngestConfig meters() {
  IngestConfig c;
  c.units = LengthUnit::kMeters;
  return c;
}

std::string two_vehicle_csv(int seconds, int change_lane_at = -1) {
  std::ostringstream out;
  out << kHeader;
  const int n = seconds * 10;
  for (int k = 0; k < n; ++k) {
    out << "1," << k << ',' << 30.0 + k * 1.0 << ",10,0,2,0,0,4.5\n";
  }
  for (int k = 0; k < n; ++k) {
    const int lane = change_lane_at >= 0 && k >= change_lane_at * 10 ? 3 : 2;
    out << "2," << k << ',' << 10.0 + k * 1.0 << ",10,0," << lane << ",1,20,4.5\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("one vehicle, ten frames") {
  std::ostringstream csv;
  csv << kHeader;
  for (int f = 1; f <= 10; ++f) csv << "7," << f << ',' << f << ",1,0,1,0,0,4\n";
  std::istringstream in(csv.str());
  const auto samples = load_trajectories(in, meters());
  REQUIRE(samples.size() == 10);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    CHECK(samples[i].time - samples[i - 1].time == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(samples[i].frame == samples[i - 1].frame + 1);
  }
  CHECK_FALSE(samples[0].leader_id.has_value());
}

TEST_CASE("negative speed is a record error with its line") {
  std::istringstream in(std::string(kHeader) + "1,1,0,1,0,1,0,0,4\n1,2,0,-1.0,0,1,0,0,4\n");
  try {
    load_trajectories(in, meters());
    FAIL("expected a record error");
  } catch (const RecordError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("missing mapped column is a configuration error") {
  std::istringstream in("Vehicle_ID,Frame_ID\n1,1\n");
  CHECK_THROWS_AS(load_trajectories(in, meters()), ConfigError);
}

TEST_CASE("feet are converted and the lane filter drops other lanes") {
  std::istringstream in(std::string(kHeader) + "1,1,100,10,1,1,0,0,15\n2,1,50,10,1,6,0,0,15\n");
  IngestConfig c;
  c.lanes = {1, 2, 3, 4};
  const auto samples = load_trajectories(in, c);
  REQUIRE(samples.size() == 1);
  CHECK(samples[0].vehicle_id == 1);
  CHECK(samples[0].position == doctest::Approx(30.48));
  CHECK(samples[0].speed == doctest::Approx(3.048));
  CHECK(*samples[0].length == doctest::Approx(4.572));
}

TEST_CASE("headway minus leader length gives the net gap") {
  std::istringstream in(std::string(kHeader) + "1,1,40,10,0,1,0,0,5\n2,1,10,10,0,1,1,30,4\n");
  const auto samples = load_trajectories(in, meters());
  const auto it = std::find_if(samples.begin(), samples.end(), [](const auto& s) { return s.vehicle_id == 2; });
  REQUIRE(it != samples.end());
  CHECK(it->gap == doctest::Approx(25.0));
}

TEST_CASE("accelerations from central differences when the column is absent") {
  std::istringstream in("id,frame,y,v,lane\n1,0,0,0,1\n1,1,0,1,1\n1,2,0,2,1\n1,3,0,3,1\n");
  IngestConfig c = meters();
  c.columns = ColumnMapping{};
  c.columns.vehicle_id = std::string("id");
  c.columns.frame = std::string("frame");
  c.columns.position = std::string("y");
  c.columns.speed = std::string("v");
  c.columns.lane = std::string("lane");
  c.columns.acceleration.reset();
  c.columns.space_headway.reset();
  c.columns.vehicle_length.reset();
  c.columns.leader_id = std::string("lane");
  c.no_leader_id = 100;
  const auto samples = load_trajectories(in, c);
  REQUIRE(samples.size() == 4);
  for (const auto& s : samples) CHECK(s.acceleration == doctest::Approx(10.0));
}

TEST_CASE("leader and follower together for 20 s give one pair") {
  std::istringstream in(two_vehicle_csv(20));
  const auto samples = load_trajectories(in, meters());
  const auto pairs = extract_pairs(samples);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].follower_id == 2);
  CHECK(pairs[0].leader_id == 1);
  CHECK(pairs[0].duration() == doctest::Approx(20.0));
  for (const auto& f : pairs[0].samples) CHECK(f.standoff() == doctest::Approx(4.5));
}

TEST_CASE("lane change at 10 s leaves no pair") {
  std::istringstream in(two_vehicle_csv(20, 10));
  const auto pairs = extract_pairs(load_trajectories(in, meters()));
  CHECK(pairs.empty());
}

TEST_CASE("a gap in the frames ends the episode") {
  std::ostringstream csv;
  csv << kHeader;
  for (int k = 0; k < 400; ++k) {
    if (k == 200) continue;
    csv << "1," << k << ',' << 30.0 + k << ",10,0,2,0,0,4.5\n";
    csv << "2," << k << ',' << 10.0 + k << ",10,0,2,1,20,4.5\n";
  }
  std::istringstream in(csv.str());
  const auto pairs = extract_pairs(load_trajectories(in, meters()));
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].samples.size() == 200);
  CHECK(pairs[1].samples.size() == 199);
}

TEST_CASE("extract_pairs is idempotent on its own output") {
  std::vector<CarFollowingPair> pairs;
  for (int i = 0; i < 3; ++i) {
    pairs.push_back(simulated_pair(kReferenceNeutral, testing_support::oscillating, 18.0 + i, 15.0, 12.0, 2 * i + 2,
                                   2 * i + 1));
  }
  auto first = extract_pairs(testing_support::flatten(pairs));
  std::sort(first.begin(), first.end(), pair_order);
  std::vector<TrajectorySample> again;
  for (const auto& p : first) {
    const auto s = pair_samples(p);
    again.insert(again.end(), s.begin(), s.end());
  }
  auto second = extract_pairs(again);
  std::sort(second.begin(), second.end(), pair_order);
  CHECK(first == second);
  CHECK(first.size() == 3);
}

TEST_CASE("split sizes") {
  std::vector<CarFollowingPair> pairs(10);
  for (int i = 0; i < 10; ++i) pairs[static_cast<std::size_t>(i)].follower_id = i + 1;
  CHECK(split_dataset(pairs, 0.5, 3).offline_pairs.size() == 5);
  CHECK(split_dataset(pairs, 0.5, 3).online_pairs.size() == 5);
  CHECK(split_dataset(pairs, 0.8, 3).offline_pairs.size() == 8);

  std::vector<CarFollowingPair> many(833);
  const auto s = split_dataset(many, 0.8, 1);
  CHECK(s.offline_pairs.size() == 666);
  CHECK(s.online_pairs.size() == 167);
  CHECK_THROWS_AS(split_dataset(std::vector<CarFollowingPair>(1), 0.8, 1), DataError);
}

TEST_CASE("split is deterministic, disjoint and order preserving") {
  std::vector<CarFollowingPair> pairs(10);
  for (int i = 0; i < 10; ++i) pairs[static_cast<std::size_t>(i)].follower_id = i + 1;
  const auto a = split_dataset(pairs, 0.8, 99);
  const auto b = split_dataset(pairs, 0.8, 99);
  CHECK(a.offline_pairs == b.offline_pairs);
  CHECK(a.online_pairs == b.online_pairs);

  std::set<VehicleId> seen;
  for (const auto* side : {&a.offline_pairs, &a.online_pairs}) {
    for (std::size_t i = 0; i < side->size(); ++i) {
      seen.insert((*side)[i].follower_id);
      if (i > 0) CHECK((*side)[i - 1].follower_id < (*side)[i].follower_id);
    }
  }
  CHECK(seen.size() == 10);

  const auto ordered = split_dataset(pairs, 0.8, 99, SplitStrategy::kOrdered);
  CHECK(ordered.offline_pairs.front().follower_id == 1);
  CHECK(ordered.online_pairs.front().follower_id == 9);
}

TEST_CASE("pairs survive a JSON round trip") {
  const auto pair = simulated_pair(kReferenceTimid, testing_support::oscillating, 16.0, 25.0, 12.0);
  const std::vector<CarFollowingPair> pairs{pair};
  const auto back = pairs_from_json(pairs_to_json(pairs));
  REQUIRE(back.size() == 1);
  CHECK(back[0] == pair);
}
