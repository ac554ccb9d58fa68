#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "aoii/rng.hpp"

namespace aoii {

// Sample every slot with a fixed probability, regardless of state.
struct RsPolicy {
  double sample_prob = 0.0;  // p_r
};

// Sample only on slots where the source changed state.
struct CarsPolicy {
  double sample_prob = 0.0;  // p_c, applied when x_t != x_prev
};

// Sample only when the receiver-side estimate is wrong; a freshly created error
// (previous slot synced) and a persisting error use separate probabilities.
struct SarsPolicy {
  double new_error_prob = 0.0;  // q_a1, previous slot synced and the source moved
  double old_error_prob = 0.0;  // q_a2, error persists; must be >= new_error_prob
};

// Sample deterministically once AoII reaches the threshold; one slot before the
// threshold, sample with threshold_prob (the randomized edge of the policy).
struct TarsPolicy {
  int threshold = 1;            // n >= 1
  double threshold_prob = 0.0;  // p_th, applied when aoii_prev == threshold - 1
};

using SamplingPolicy = std::variant<RsPolicy, CarsPolicy, SarsPolicy, TarsPolicy>;

// Actuate with act_on_delivery on slots whose sample was decoded, act_otherwise on
// every other slot (no sample, or decoding failed).
struct ActuationPolicy {
  double act_on_delivery = 1.0;  // p_c1
  double act_otherwise = 0.0;    // p_c2
};

// What the sampler is allowed to look at when deciding, all end-of-previous-slot
// quantities plus the freshly realized source state.
struct SamplerObservation {
  int state = 0;              // X(t), after this slot's source transition
  int prev_state = 0;         // X(t-1)
  int prev_recon = 0;         // Xhat(t-1)
  std::int64_t prev_aoii = 0; // AoII(t-1)
};

enum class PolicyKind { rs, cars, sars, tars };

inline PolicyKind kind_of(const SamplingPolicy& p) {
  return static_cast<PolicyKind>(p.index());  // variant order matches the enum
}

inline const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::rs: return "rs";
    case PolicyKind::cars: return "cars";
    case PolicyKind::sars: return "sars";
    case PolicyKind::tars: return "tars";
  }
  return "?";
}

// Returns one message per violated constraint; empty means the policy is usable.
std::vector<std::string> validate(const SamplingPolicy& policy);
std::vector<std::string> validate(const ActuationPolicy& policy);

// Probability that decide_sample returns true for this observation. decide_sample is
// exactly a Bernoulli draw on this value, so the simulator and the chain oracle share
// one definition of every policy. One overload per policy lets hot loops bind the
// concrete type once instead of re-dispatching the variant every slot.
inline double sample_probability(const RsPolicy& p, const SamplerObservation&) {
  return p.sample_prob;
}

inline double sample_probability(const CarsPolicy& p, const SamplerObservation& o) {
  return o.state != o.prev_state ? p.sample_prob : 0.0;
}

inline double sample_probability(const SarsPolicy& p, const SamplerObservation& o) {
  if (o.prev_state == o.prev_recon) return o.state != o.prev_state ? p.new_error_prob : 0.0;
  return o.state != o.prev_recon ? p.old_error_prob : 0.0;
}

inline double sample_probability(const TarsPolicy& p, const SamplerObservation& o) {
  if (o.prev_aoii >= p.threshold) return 1.0;
  return o.prev_aoii == p.threshold - 1 ? p.threshold_prob : 0.0;
}

inline double sample_probability(const SamplingPolicy& policy, const SamplerObservation& o) {
  return std::visit([&](const auto& p) { return sample_probability(p, o); }, policy);
}

inline bool decide_sample(const SamplingPolicy& policy, const SamplerObservation& o,
                          RandomStream& rng) {
  return rng.bernoulli(sample_probability(policy, o));
}

// pre: decoded implies sampled.
inline bool decide_action(const ActuationPolicy& act, bool sampled, bool decoded,
                          RandomStream& rng) {
  return rng.bernoulli(sampled && decoded ? act.act_on_delivery : act.act_otherwise);
}

}  // namespace aoii
