#include "drivestyle/synth.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "drivestyle/errors.hpp"
#include "drivestyle/rng.hpp"
#include "drivestyle/text_format.hpp"

namespace drivestyle {

SynthCorpus generate_corpus(const SynthOptions& options) {
  if (options.styles.size() != options.counts.size()) throw ConfigError("one count per planted style is required");
  for (const auto& p : options.styles) p.validate();
  const std::size_t steps = samples_for(options.duration);
  if (steps < 2) throw ConfigError("synthetic duration too short");

  std::vector<int> planted;
  for (std::size_t s = 0; s < options.counts.size(); ++s) planted.insert(planted.end(), options.counts[s], static_cast<int>(s));
  Rng rng(options.seed);
  for (std::size_t i = planted.size(); i > 1; --i) std::swap(planted[i - 1], planted[static_cast<std::size_t>(rng.below(i))]);

  SynthCorpus corpus;
  corpus.planted = planted;
  for (std::size_t p = 0; p < planted.size(); ++p) {
    const IdmParams& style = options.styles[static_cast<std::size_t>(planted[p])];
    Rng prng(mix_seed(options.seed, p + 1));
    const double base = prng.uniform(options.base_speed_lo, options.base_speed_hi);
    const double amplitude = prng.uniform(options.amplitude_lo, options.amplitude_hi);
    const double omega = 2.0 * std::numbers::pi / prng.uniform(options.period_lo, options.period_hi);
    const double phase = prng.uniform(0.0, 2.0 * std::numbers::pi);

    const VehicleId leader_id = static_cast<VehicleId>(2 * p + 1);
    const VehicleId follower_id = static_cast<VehicleId>(2 * p + 2);
    const int lane = static_cast<int>(p % 4) + 1;
    const double origin = 5000.0 * static_cast<double>(p);

    double lx = origin;
    double fv = base + amplitude * std::sin(phase);
    double fx = lx - options.vehicle_length - equilibrium_gap(style, fv);

    for (std::size_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * kSampleDt;
      const double lv = base + amplitude * std::sin(omega * t + phase);
      const double la = amplitude * omega * std::cos(omega * t + phase);
      const double gap = lx - fx - options.vehicle_length;
      if (!(gap > 0.0)) throw NumericalError("synthetic follower collided with its leader");

      double fa = idm_acceleration(style, {fv, lv, gap}) + options.noise_sigma * prng.normal();
      const double fv_next = std::max(0.0, fv + fa * kSampleDt);
      // The recorded acceleration is the one actually applied.
      fa = (fv_next - fv) / kSampleDt;

      TrajectorySample leader{leader_id, static_cast<FrameIndex>(k), t, lx, lv, la, lane, std::nullopt, 0.0,
                              options.vehicle_length};
      TrajectorySample follower{follower_id, static_cast<FrameIndex>(k), t, fx, fv, fa, lane, leader_id, gap,
                                options.vehicle_length};
      corpus.samples.push_back(leader);
      corpus.samples.push_back(follower);

      const double lv_next = base + amplitude * std::sin(omega * (t + kSampleDt) + phase);
      lx += (lv + lv_next) * kSampleDt / 2.0;
      fx += (fv + fv_next) * kSampleDt / 2.0;
      fv = fv_next;
    }
  }
  return corpus;
}

void write_corpus_csv(std::ostream& out, std::span<const TrajectorySample> samples) {
  out << "Vehicle_ID,Frame_ID,Local_Y,v_Vel,v_Acc,Lane_ID,Preceding,Space_Headway,v_Length\n";
  for (const auto& s : samples) {
    const double headway = s.leader_id ? s.gap + s.length.value_or(0.0) : 0.0;
    out << s.vehicle_id << ',' << s.frame << ',' << format_double(s.position) << ',' << format_double(s.speed) << ','
        << format_double(s.acceleration) << ',' << s.lane_id << ',' << (s.leader_id ? *s.leader_id : 0) << ','
        << format_double(headway) << ',' << format_double(s.length.value_or(0.0)) << '\n';
  }
}

}  // namespace drivestyle
