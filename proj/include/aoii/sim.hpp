#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aoii/model.hpp"
#include "aoii/policy.hpp"
#include "aoii/rng.hpp"

namespace aoii {

// Everything observable about one slot, in slot order: realized source state,
// sampling decision, channel outcome (meaningful only when alpha), receiver
// estimate after any update, actuation decision, and both freshness counters.
struct SlotRecord {
  std::int64_t t = 0;  // slot index; step() returns 0 here, the driving loop numbers slots
  int x = 0;
  int xhat = 0;
  bool alpha = false;
  bool h = false;  // decode flag; defined only when alpha is true
  bool c = false;
  std::int64_t aoii = 0;
  std::int64_t delta = 0;
};

struct SimConfig {
  SourceParams source;
  ChannelParams channel;
  SamplingPolicy sampling;
  ActuationPolicy actuation;
  std::int64_t slots = 1'000'000;  // retained slots per replication
  std::int64_t burn_in = 10'000;   // discarded before accumulation starts
  int replications = 10;
  std::uint64_t seed = 1;
};

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * s / sqrt(R) over replication means; 0 when R = 1
};

struct SimReport {
  Estimate mean_aoii;
  Estimate p_delta0_hat;
  Estimate sampling_rate_hat;
  Estimate actuation_rate_hat;
  std::vector<double> aoii_histogram;    // level -> frequency, pooled over all retained slots
  std::vector<double> replication_means; // per-replication AoII means, replication order
};

// Throws std::invalid_argument listing every violated constraint; returns quietly
// on a usable config.
void require_valid(const SimConfig& cfg);

// Advances one slot under the fixed ordering: source transition, sampling
// decision, channel draw plus estimate update, AoII recursion, actuation
// decision, CoAU recursion. Consumes draws from rng exactly as documented on
// RandomStream::bernoulli, so trajectories are replayable draw for draw.
std::pair<TrajectoryState, SlotRecord> step(const TrajectoryState& state, const SimConfig& cfg,
                                            RandomStream& rng);

// Runs cfg.replications independent trajectories (stream id = replication
// index), each burn_in + slots long, and aggregates the retained slots.
// Deterministic for a fixed config: replication results are merged in index
// order no matter how execution is scheduled.
SimReport run(const SimConfig& cfg);

}  // namespace aoii
