#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "drivestyle/idm.hpp"
#include "drivestyle/trajectory.hpp"

namespace drivestyle {

/// Settings for the synthetic car-following corpus: each pair is a leader
/// with a smooth oscillating speed profile and a follower driven by one of
/// the planted IDM parameter sets plus Gaussian acceleration noise.
struct SynthOptions {
  std::vector<IdmParams> styles{kReferenceNeutral, kReferenceAggressive, kReferenceTimid};
  /// Pairs per planted style.
  std::vector<std::size_t> counts{9, 15, 6};
  double duration = 30.0;     // s
  double noise_sigma = 0.15;  // m/s^2
  double base_speed_lo = 11.5;
  double base_speed_hi = 12.5;
  double amplitude_lo = 1.0;  // m/s
  double amplitude_hi = 2.0;
  double period_lo = 15.0;  // s
  double period_hi = 25.0;
  double vehicle_length = 4.5;  // m
  std::uint64_t seed = 1;
};

struct SynthCorpus {
  std::vector<TrajectorySample> samples;
  /// Planted style index of pair p (follower id 2p + 2, leader id 2p + 1).
  std::vector<int> planted;
};

SynthCorpus generate_corpus(const SynthOptions& options = {});

/// Writes NGSIM-style columns in meters:
/// Vehicle_ID,Frame_ID,Local_Y,v_Vel,v_Acc,Lane_ID,Preceding,Space_Headway,v_Length
void write_corpus_csv(std::ostream& out, std::span<const TrajectorySample> samples);

}  // namespace drivestyle
