#pragma once

#include <cstdint>
#include <stdexcept>

#include "aoii/rng.hpp"

namespace aoii {

// Symmetric N-state source: stays put with probability self_prob, moves to each of the
// other states with probability cross_prob = (1 - self_prob)/(states - 1).
struct SourceParams {
  int states = 2;
  double self_prob = 1.0;
  double cross_prob = 0.0;
};

struct ChannelParams {
  double success_prob = 1.0;  // probability a transmitted sample is decoded this slot
};

// End-of-slot trajectory state. aoii counts consecutive slots with state != recon;
// coau counts consecutive slots with a wrong actuation decision.
struct TrajectoryState {
  int state = 0;
  int prev_state = 0;
  int recon = 0;
  std::int64_t aoii = 0;
  std::int64_t coau = 0;
};

inline SourceParams make_source_params(int states, double self_prob) {
  if (states < 2) throw std::invalid_argument("source needs at least 2 states");
  if (!(self_prob >= 0.0 && self_prob <= 1.0))
    throw std::invalid_argument("self-transition probability outside [0, 1]");
  return SourceParams{states, self_prob, (1.0 - self_prob) / (states - 1)};
}

inline ChannelParams make_channel_params(double success_prob) {
  if (!(success_prob >= 0.0 && success_prob <= 1.0))
    throw std::invalid_argument("channel success probability outside [0, 1]");
  return ChannelParams{success_prob};
}

// One source transition. Consumes exactly one uniform draw: the same draw selects both
// whether the source moves and, if so, which of the states - 1 targets it moves to.
inline int source_step(const SourceParams& src, int x, RandomStream& rng) {
  const double u = rng.next_uniform();
  if (u < src.self_prob || src.cross_prob <= 0.0) return x;
  int j = static_cast<int>((u - src.self_prob) / src.cross_prob);
  if (j > src.states - 2) j = src.states - 2;  // guards the u -> 1 rounding edge
  return j < x ? j : j + 1;
}

inline bool channel_draw(const ChannelParams& ch, RandomStream& rng) {
  return rng.bernoulli(ch.success_prob);
}

}  // namespace aoii
