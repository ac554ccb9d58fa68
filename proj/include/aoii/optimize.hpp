#pragma once

#include <string>

#include "aoii/model.hpp"
#include "aoii/policy.hpp"

namespace aoii {

// Minimum-average-AoII sampling parameters under a sampling-rate budget eta.
struct SamplingOptResult {
  SamplingPolicy policy;
  double objective = 0.0;         // average AoII at the optimum
  double constraint_value = 0.0;  // sampling rate at the optimum
  double eta = 0.0;
  std::string note;  // nonempty when a clamp or fallback adjusted the closed form
};

// Maximum-P[Delta=0] actuation pair under an actuation-rate budget mu.
struct ActuationOptResult {
  ActuationPolicy actuation;
  double objective = 0.0;         // P[Delta = 0] at the optimum
  double constraint_value = 0.0;  // actuation rate at the optimum
  double mu = 0.0;
  std::string note;
};

// Each optimizer requires 0 < eta <= 1 and a non-degenerate source (q < 1,
// i.e. cross_prob > 0); the degenerate corner has no closed-form treatment.
SamplingOptResult optimize_tars(const SourceParams& src, const ChannelParams& ch, double eta);
SamplingOptResult optimize_rs(const SourceParams& src, const ChannelParams& ch, double eta);
SamplingOptResult optimize_sars(const SourceParams& src, const ChannelParams& ch, double eta);
SamplingOptResult optimize_cars(const SourceParams& src, const ChannelParams& ch, double eta);

// Optimal (act_on_delivery, act_otherwise) for a fixed RS/SARS/CARS sampling
// policy under actuation-rate budget mu. TARS has no closed-form CoAU analysis
// and is rejected; use the oracle's grid search instead.
ActuationOptResult optimize_actuation(const SamplingPolicy& policy, const SourceParams& src,
                                      const ChannelParams& ch, double mu);

}  // namespace aoii
