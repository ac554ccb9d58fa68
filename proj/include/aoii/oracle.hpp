#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "aoii/model.hpp"
#include "aoii/optimize.hpp"
#include "aoii/policy.hpp"

namespace aoii {

// Thrown when a linear solve leaves too large a residual or a truncation keeps
// too much mass; mapped to exit code 3 by the CLI.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One state of the truncated joint chain. aoii_level == truncation is a
// bookkeeping bucket holding all true levels >= truncation.
struct JointState {
  int x = 0;
  int xhat = 0;
  int aoii_level = 0;
};

// Stationary slot-event masses, split by end-of-slot sync status and what the
// channel did. Delivery forces sync, so there is no err/deliver term.
struct EventProbs {
  double sync_idle = 0.0;     // no sample taken, X(t) == Xhat(t)
  double sync_fail = 0.0;     // sample lost, X(t) == Xhat(t)
  double sync_deliver = 0.0;  // sample decoded (always synced)
  double err_idle = 0.0;      // no sample taken, X(t) != Xhat(t)
  double err_fail = 0.0;      // sample lost, X(t) != Xhat(t)
};

struct OracleReport {
  std::vector<std::pair<JointState, double>> stationary;  // all retained states
  std::vector<double> level_marginal;  // AoII mass per level; index truncation = bucket
  EventProbs events;
  double mean_aoii = 0.0;  // exact: the bucket's geometric remainder is summed in closed form
  double p_delta0 = 0.0;
  double sampling_rate = 0.0;
  double actuation_rate = 0.0;
  double decode_rate = 0.0;
  double tail_mass = 0.0;  // stationary mass at true levels >= truncation
};

// Exact stationary analysis of the joint (x, xhat, AoII-level) chain whose
// kernel is derived from the simulator's slot ordering; no policy closed form
// is consulted anywhere. Requires truncation >= 1 (>= the TARS threshold for
// TARS) and rejects reports whose tail_mass exceeds tail_bound. Throws
// NumericalError when the solve leaves a residual above 1e-12.
OracleReport solve_chain(const SamplingPolicy& policy, const ActuationPolicy& act,
                         const SourceParams& src, const ChannelParams& ch, int truncation,
                         double tail_bound = 1e-12);

// Exhaustive scan over the family's parameter grid (spacing `step`, must be in
// (0, 0.1]); feasibility and objective through the analytic forms. Ties go to
// the smaller sampling rate, then lexicographically smaller parameters.
SamplingOptResult grid_search_sampling(PolicyKind family, const SourceParams& src,
                                       const ChannelParams& ch, double eta, double step);

// Scan over the (p_c1, p_c2) grid for a fixed sampling policy. RS/SARS/CARS
// score through the analytic forms; TARS solves the chain once and reuses its
// event masses, in which both the objective and the rate are linear.
ActuationOptResult grid_search_actuation(const SamplingPolicy& policy, const SourceParams& src,
                                         const ChannelParams& ch, double mu, double step,
                                         int truncation = 2000);

}  // namespace aoii
