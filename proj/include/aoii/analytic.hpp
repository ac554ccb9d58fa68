#pragma once

#include <vector>

#include "aoii/model.hpp"
#include "aoii/policy.hpp"

namespace aoii {

// Stationary AoII distribution truncated at level `truncation`; the mass and first
// moment beyond the truncation are carried exactly (the tail is geometric).
struct AoiiDistribution {
  std::vector<double> pi;  // levels 0 .. truncation
  int truncation = 0;
  double tail_mass = 0.0;  // sum_{i > truncation} pi_i
  double tail_mean = 0.0;  // sum_{i > truncation} i * pi_i
};

// Stationary mean AoII under the given sampling policy.
// Rejects q = 1 (degenerate source); p_s = 0 is fine.
double average_aoii(const SamplingPolicy& policy, const SourceParams& src,
                    const ChannelParams& ch);

// Stationary AoII level distribution. Rejects parameter corners whose level chain is
// not ergodic (geometric ratio >= 1, e.g. q = 1 together with no decodable samples).
AoiiDistribution aoii_distribution(const SamplingPolicy& policy, const SourceParams& src,
                                   const ChannelParams& ch, int truncation);

// Long-run fraction of slots with a sample taken.
double sampling_rate(const SamplingPolicy& policy, const SourceParams& src,
                     const ChannelParams& ch);

// Stationary probability that the actuation decision is correct this slot, i.e. the
// slot's incorrect-decision streak resets. Closed forms exist for RS/SARS/CARS only;
// TARS callers must use the chain oracle or simulation.
double prob_correct_action(const SamplingPolicy& policy, const ActuationPolicy& act,
                           const SourceParams& src, const ChannelParams& ch);

// Long-run fraction of slots with an actuation. Same support as prob_correct_action.
double actuation_rate(const SamplingPolicy& policy, const ActuationPolicy& act,
                      const SourceParams& src, const ChannelParams& ch);

}  // namespace aoii
