#include "aoii/optimize.hpp"

#include <cmath>
#include <stdexcept>

#include "aoii/analytic.hpp"

namespace aoii {
namespace {

void require_budget(double b, const char* name) {
  if (!(b > 0.0 && b <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in (0, 1]");
}

void require_moving_source(const SourceParams& src) {
  if (!(src.cross_prob > 0.0))
    throw std::invalid_argument("degenerate source: no closed-form optimum for q = 1");
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

SamplingOptResult finish(SamplingPolicy policy, const SourceParams& src, const ChannelParams& ch,
                         double eta, std::string note = {}) {
  SamplingOptResult r;
  r.policy = std::move(policy);
  r.objective = average_aoii(r.policy, src, ch);
  r.constraint_value = sampling_rate(r.policy, src, ch);
  r.eta = eta;
  r.note = std::move(note);
  return r;
}

// Largest p_th in [0, hi] whose sampling rate stays within eta; the rate is
// nondecreasing in p_th for fixed n, so bisection is exact to the tolerance.
double max_feasible_pth(int n, double hi, const SourceParams& src, const ChannelParams& ch,
                        double eta) {
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sampling_rate(TarsPolicy{n, mid}, src, ch) <= eta)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace

SamplingOptResult optimize_tars(const SourceParams& src, const ChannelParams& ch, double eta) {
  require_budget(eta, "eta");
  require_moving_source(src);
  const int N = src.states;
  const double p = src.cross_prob;
  const double ps = ch.success_prob;

  int n;
  double pth;
  if (p * (N - 1) / (N * p + (1.0 - p) * ps) <= eta) {
    n = 1;
    const double num = eta * (N * p + (1.0 - p) * ps) - p * (N - 1);
    const double den = p + eta * (N - 1) * p * ps - (N * p - 1.0) * ps;
    pth = den > 0.0 ? std::min(1.0, num / den) : 1.0;
  } else {
    const double arg = N * (1.0 - p) * (p + (1.0 - p) * ps) * eta /
                       ((N - 1) * p + (N - 1) * (1.0 - p) * ps * eta);
    n = std::max(1, static_cast<int>(std::ceil(std::log(arg) / std::log1p(-p))));
    pth = std::max(0.0, (1.0 - p) / p *
                            (eta * N * (1.0 - p) * (ps + (1.0 - ps) * p) /
                                 ((N - 1) * std::pow(1.0 - p, n) * (p + (1.0 - p) * eta * ps)) -
                             1.0));
  }

  std::string note;
  if (pth > 1.0) {
    pth = 1.0;
    note = "p_th clamped to 1";
  }
  if (sampling_rate(TarsPolicy{n, pth}, src, ch) > eta + 1e-12) {
    // Floating error pushed the closed form across the budget; restore
    // feasibility along the monotone rate, raising n if even p_th = 0 is over.
    while (sampling_rate(TarsPolicy{n, 0.0}, src, ch) > eta) ++n;
    pth = max_feasible_pth(n, pth > 0.0 ? pth : 1.0, src, ch, eta);
    note = "feasibility fallback: bisection on p_th";
  }
  return finish(TarsPolicy{n, pth}, src, ch, eta, std::move(note));
}

SamplingOptResult optimize_rs(const SourceParams& src, const ChannelParams& ch, double eta) {
  require_budget(eta, "eta");
  return finish(RsPolicy{eta}, src, ch, eta);
}

SamplingOptResult optimize_sars(const SourceParams& src, const ChannelParams& ch, double eta) {
  require_budget(eta, "eta");
  require_moving_source(src);
  const int N = src.states;
  const double p = src.cross_prob;
  const double ps = ch.success_prob;

  double qa1, qa2;
  if (eta * ps >= p * (N - 1)) {
    qa1 = std::min(1.0, ((1.0 - p) * (eta * ps - p * (N - 1)) + eta * N * p) /
                            (eta * (N - 1) * p * ps + p * p * (N - 1)));
    qa2 = 1.0;
  } else if (eta * N * p <= (1.0 - p) * (p * (N - 1) - eta * ps)) {
    qa1 = 0.0;
    qa2 = std::min(1.0, eta * N * p / ((1.0 - p) * (p * (N - 1) - eta * ps)));
  } else {
    qa1 = std::min(1.0, (eta * N * p - (1.0 - p) * (p * (N - 1) - eta * ps)) /
                            (eta * (N - 1) * p * ps + p * p * (N - 1)));
    qa2 = 1.0;
  }

  std::string note;
  if (qa1 < 0.0 || qa2 < qa1) {
    qa1 = clamp01(qa1);
    qa2 = std::max(qa1, qa2);
    note = "clamped onto 0 <= q_a1 <= q_a2 <= 1";
  }
  return finish(SarsPolicy{qa1, qa2}, src, ch, eta, std::move(note));
}

SamplingOptResult optimize_cars(const SourceParams& src, const ChannelParams& ch, double eta) {
  require_budget(eta, "eta");
  require_moving_source(src);
  const double pc = std::min(1.0, eta / ((src.states - 1) * src.cross_prob));
  return finish(CarsPolicy{pc}, src, ch, eta);
}

ActuationOptResult optimize_actuation(const SamplingPolicy& policy, const SourceParams& src,
                                      const ChannelParams& ch, double mu) {
  require_budget(mu, "mu");
  const int N = src.states;
  const double p = src.cross_prob;
  const double ps = ch.success_prob;

  // Per-slot delivery probability and the branch condition deciding whether the
  // objective gains or loses from p_c2 (the sign of its coefficient in P[Delta=0]).
  double a;          // decode rate: P[sampled and decoded]
  bool prefer_idle;  // true -> p_c2* = 0 branch listed first
  switch (kind_of(policy)) {
    case PolicyKind::rs: {
      const double pr = std::get<RsPolicy>(policy).sample_prob;
      a = pr * ps;
      prefer_idle = (1.0 - N * p) * a <= (N - 2) * p;
      break;
    }
    case PolicyKind::sars: {
      const auto& s = std::get<SarsPolicy>(policy);
      const double f = N * p + (1.0 - N) * p * s.new_error_prob * ps +
                       (1.0 - p) * s.old_error_prob * ps;
      const double g =
          (N - 1) * p * ps * (p * (s.new_error_prob - s.old_error_prob) + s.old_error_prob);
      a = g / f;
      prefer_idle = p * (N - 1) * (1.0 - p) * s.new_error_prob * ps <=
                    p * (N - 2) - (1.0 - p) * (1.0 + (1.0 - N) * p) * s.old_error_prob * ps;
      break;
    }
    case PolicyKind::cars: {
      const double x = std::get<CarsPolicy>(policy).sample_prob * ps;
      a = (N - 1) * p * x;
      prefer_idle = (N - x) * (2 * N - 3 + (N - 1) * p * x) >= 2.0 * (N - 1) * (N - 1);
      break;
    }
    case PolicyKind::tars:
      throw std::invalid_argument("no closed-form actuation optimum for tars");
  }
  require_moving_source(src);

  ActuationOptResult r;
  r.mu = mu;
  double pc1, pc2;
  if (a <= 0.0) {
    // Nothing is ever delivered: p_c1 never applies. Acting on undelivered
    // slots only pays off while erroneous outweighs synced, which is exactly
    // the prefer_idle condition.
    pc1 = 1.0;
    pc2 = prefer_idle ? 0.0 : std::min(1.0, mu);
    r.note = "vacuous p_c1: decode rate is zero";
  } else if (a >= 1.0) {
    pc1 = std::min(1.0, mu);
    pc2 = 0.0;
    r.note = "vacuous p_c2: every slot is delivered";
  } else if (prefer_idle || mu < a) {
    pc1 = std::min(1.0, mu / a);
    pc2 = 0.0;
  } else {
    pc1 = 1.0;
    pc2 = std::min(1.0, (mu - a) / (1.0 - a));
  }
  r.actuation = ActuationPolicy{pc1, pc2};
  r.objective = prob_correct_action(policy, r.actuation, src, ch);
  r.constraint_value = actuation_rate(policy, r.actuation, src, ch);
  return r;
}

}  // namespace aoii
