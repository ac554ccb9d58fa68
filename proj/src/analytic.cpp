#include "aoii/analytic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoii {

namespace {

void require_valid(const SamplingPolicy& policy) {
  auto errs = validate(policy);
  if (errs.empty()) return;
  std::string msg = "invalid sampling policy";
  for (const auto& e : errs) msg += ": " + e;
  throw std::invalid_argument(msg);
}

void require_valid(const ActuationPolicy& act) {
  auto errs = validate(act);
  if (errs.empty()) return;
  std::string msg = "invalid actuation policy";
  for (const auto& e : errs) msg += ": " + e;
  throw std::invalid_argument(msg);
}

void require_ergodic_source(const SourceParams& src) {
  if (!(src.cross_prob > 0.0))
    throw std::invalid_argument("degenerate source: q = 1 has no stationary AoII law");
}

// (1-p)^n, switching to exp(n*log1p(-p)) once plain pow loses accuracy for large n.
double pow_one_minus(double p, long long n) {
  if (n <= 64) return std::pow(1.0 - p, static_cast<double>(n));
  if (p >= 1.0) return 0.0;
  return std::exp(static_cast<double>(n) * std::log1p(-p));
}

struct LevelLaw {
  double pi0;
  double head;   // pi_1 = head; pi_{i+1} = pi_i * ratio for i >= 1 (non-TARS)
  double ratio;  // asymptotic level-to-level ratio
};

LevelLaw level_law_rs(double p, double a, int N) {
  const double pi0 = (p + (1.0 - p) * a) / (N * p + (1.0 - N * p) * a);
  return {pi0, (N - 1) * p * (1.0 - a) * pi0, (1.0 - p) * (1.0 - a)};
}

LevelLaw level_law_sars(double p, double ps, double qa1, double qa2, int N) {
  const double D = N * p + (1.0 - N) * p * qa1 * ps + (1.0 - p) * qa2 * ps;
  const double pi0 = (p + (1.0 - p) * qa2 * ps) / D;
  return {pi0, (N - 1) * p * (1.0 - qa1 * ps) * pi0, (1.0 - p) * (1.0 - qa2 * ps)};
}

LevelLaw level_law_cars(double p, double x, int N) {
  const double pi0 = (1.0 + (N - 2) * x) / (N - x);
  return {pi0, (N - 1) * p * (1.0 - x) * pi0, 1.0 - p * (1.0 + (N - 2) * x)};
}

double tars_pi0(double p, double ps, int n, double pth, int N) {
  const double eff = p + (1.0 - p) * ps;
  return eff / (N * eff - (N - 1) * (1.0 - p * (1.0 - pth)) * ps * pow_one_minus(p, n - 1));
}

// pi_i for TARS, i >= 1.
double tars_pi(double p, double ps, int n, double pth, int N, double pi0, long long i) {
  if (i < n)
    return (N - 1) * p * pow_one_minus(p, i - 1) * pi0;
  return (N - 1) * p * (1.0 - pth * ps) * pow_one_minus(p, i - 1) *
         std::pow(1.0 - ps, static_cast<double>(i - n)) * pi0;
}

}  // namespace

double average_aoii(const SamplingPolicy& policy, const SourceParams& src,
                    const ChannelParams& ch) {
  require_valid(policy);
  require_ergodic_source(src);
  const int N = src.states;
  const double p = src.cross_prob;
  const double ps = ch.success_prob;
  switch (kind_of(policy)) {
    case PolicyKind::rs: {
      const double a = std::get<RsPolicy>(policy).sample_prob * ps;
      return (N - 1) * p * (1.0 - a) /
             ((p + (1.0 - p) * a) * (a + N * p * (1.0 - a)));
    }
    case PolicyKind::sars: {
      const auto& s = std::get<SarsPolicy>(policy);
      const double qa1 = s.new_error_prob, qa2 = s.old_error_prob;
      return (N - 1) * p * (1.0 - qa1 * ps) /
             ((p + (1.0 - p) * qa2 * ps) *
              (N * p + (1.0 - N) * p * qa1 * ps + (1.0 - p) * qa2 * ps));
    }
    case PolicyKind::cars: {
      const double x = std::get<CarsPolicy>(policy).sample_prob * ps;
      return (N - 1) * (1.0 - x) / (p * (N - x) * (1.0 + (N - 2) * x));
    }
    case PolicyKind::tars: {
      // Mean of the level distribution in closed form: the pre-threshold
      // levels contribute an arithmetico-geometric head, the post-threshold
      // levels a geometric tail with ratio (1-p)(1-ps).
      const auto& t = std::get<TarsPolicy>(policy);
      const int n = t.threshold;
      const double pth = t.threshold_prob;
      const double a = p + (1.0 - p) * ps;
      const double r = (1.0 - p) * (1.0 - ps);
      const double w = pow_one_minus(p, n - 1);
      const double den = N * a - (N - 1) * w * (1.0 - (1.0 - pth) * p) * ps;
      return (N - 1) *
             (a * a * (1.0 - w * (1.0 + (n - 1) * p)) +
              p * p * (1.0 - pth * ps) * w * (n * a + r)) /
             (p * a * den);
    }
  }
  throw std::logic_error("unreachable");
}

double sampling_rate(const SamplingPolicy& policy, const SourceParams& src,
                     const ChannelParams& ch) {
  require_valid(policy);
  const int N = src.states;
  const double p = src.cross_prob;
  const double ps = ch.success_prob;
  switch (kind_of(policy)) {
    case PolicyKind::rs:
      return std::get<RsPolicy>(policy).sample_prob;  // valid even for q = 1
    case PolicyKind::cars:
      require_ergodic_source(src);
      return (N - 1) * p * std::get<CarsPolicy>(policy).sample_prob;
    case PolicyKind::sars: {
      require_ergodic_source(src);
      const auto& s = std::get<SarsPolicy>(policy);
      const double qa1 = s.new_error_prob, qa2 = s.old_error_prob;
      return p * (N - 1) * (p * (qa1 - qa2) + qa2) /
             (N * p + (1.0 - N) * p * qa1 * ps + (1.0 - p) * qa2 * ps);
    }
    case PolicyKind::tars: {
      require_ergodic_source(src);
      const auto& t = std::get<TarsPolicy>(policy);
      const int n = t.threshold;
      const double pth = t.threshold_prob;
      if (n == 1)
        return (p * (N - 1) + (p - (N * p - 1.0) * ps) * pth) /
               (N * p + (1.0 - p) * ps - (N - 1) * p * pth * ps);
      if (p >= 1.0) {
        // N = 2, q = 0: only levels 0 and 1 carry mass, so the ratio form is 0/0.
        // rate = pth*pi_{n-1} + sum_{i>=n} pi_i collapses to the n = 2 edge term.
        const double pi0 = tars_pi0(p, ps, n, pth, N);
        return n == 2 ? pth * tars_pi(p, ps, n, pth, N, pi0, 1) : 0.0;
      }
      const double u = 1.0 - (1.0 - pth) * p;
      return (N - 1) * p * pow_one_minus(p, n - 1) * u /
             (N * (1.0 - p) * (p + (1.0 - p) * ps) - (N - 1) * pow_one_minus(p, n) * u * ps);
    }
  }
  throw std::logic_error("unreachable");
}

AoiiDistribution aoii_distribution(const SamplingPolicy& policy, const SourceParams& src,
                                   const ChannelParams& ch, int truncation) {
  require_valid(policy);
  if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
  const int N = src.states;
  const double p = src.cross_prob;
  const double ps = ch.success_prob;
  const int K = truncation;

  AoiiDistribution d;
  d.truncation = K;
  d.pi.assign(K + 1, 0.0);

  if (kind_of(policy) == PolicyKind::tars) {
    const auto& t = std::get<TarsPolicy>(policy);
    const int n = t.threshold;
    const double pth = t.threshold_prob;
    const double ratio = (1.0 - p) * (1.0 - ps);
    if (ratio >= 1.0)
      throw std::invalid_argument("non-ergodic corner: AoII tail ratio >= 1");
    const double pi0 = tars_pi0(p, ps, n, pth, N);
    d.pi[0] = pi0;
    for (int i = 1; i <= K; ++i) d.pi[i] = tars_pi(p, ps, n, pth, N, pi0, i);
    // Tail: geometric with ratio (1-p) through level n-1, then (1-p)(1-ps).
    double mass = 0.0, mean = 0.0;
    if (p < 1.0) {
      if (K + 1 < n) {  // finite pre-threshold remainder, levels K+1 .. n-1
        const double c = (N - 1) * p * pi0;
        const double rK = pow_one_minus(p, K);
        const double rn1 = pow_one_minus(p, n - 1);
        mass += c * (rK - rn1) / p;
        mean += c * (((K + 1) * rK - static_cast<double>(n) * rn1) / p +
                     (rK * (1.0 - p) - rn1 * (1.0 - p)) / (p * p));
      }
      const long long m = std::max<long long>(K + 1, n);
      const double pim = tars_pi(p, ps, n, pth, N, pi0, m);
      mass += pim / (1.0 - ratio);
      mean += pim * (m / (1.0 - ratio) + ratio / ((1.0 - ratio) * (1.0 - ratio)));
    }
    d.tail_mass = mass;
    d.tail_mean = mean;
    return d;
  }

  LevelLaw law{};
  switch (kind_of(policy)) {
    case PolicyKind::rs:
      law = level_law_rs(p, std::get<RsPolicy>(policy).sample_prob * ps, N);
      break;
    case PolicyKind::sars: {
      const auto& s = std::get<SarsPolicy>(policy);
      law = level_law_sars(p, ps, s.new_error_prob, s.old_error_prob, N);
      break;
    }
    default:
      law = level_law_cars(p, std::get<CarsPolicy>(policy).sample_prob * ps, N);
      break;
  }
  if (law.ratio >= 1.0)
    throw std::invalid_argument("non-ergodic corner: AoII tail ratio >= 1");
  d.pi[0] = law.pi0;
  double v = law.head;
  for (int i = 1; i <= K; ++i) {
    d.pi[i] = v;
    v *= law.ratio;
  }
  // v is now pi_{K+1}
  d.tail_mass = v / (1.0 - law.ratio);
  d.tail_mean =
      v * ((K + 1) / (1.0 - law.ratio) + law.ratio / ((1.0 - law.ratio) * (1.0 - law.ratio)));
  return d;
}

double prob_correct_action(const SamplingPolicy& policy, const ActuationPolicy& act,
                           const SourceParams& src, const ChannelParams& ch) {
  require_valid(policy);
  require_valid(act);
  require_ergodic_source(src);
  const int N = src.states;
  const double p = src.cross_prob;
  const double ps = ch.success_prob;
  const double pc1 = act.act_on_delivery, pc2 = act.act_otherwise;
  switch (kind_of(policy)) {
    case PolicyKind::rs: {
      const double a = std::get<RsPolicy>(policy).sample_prob * ps;
      const double den = N * p + (1.0 - N * p) * a;
      return (N - 1) * p * (1.0 - a) / den + a * pc1 +
             (1.0 - a) * (2.0 * p - N * p + (1.0 - N * p) * a) * pc2 / den;
    }
    case PolicyKind::sars: {
      const auto& s = std::get<SarsPolicy>(policy);
      const double qa1 = s.new_error_prob, qa2 = s.old_error_prob;
      const double D = N * p + (1.0 - N) * p * qa1 * ps + (1.0 - p) * qa2 * ps;
      return ((N - 1) * p * (1.0 - qa1 * ps) +
              (N - 1) * p * ps * (p * (qa1 - qa2) + qa2) * pc1 +
              p * (2.0 - N + (N - 1) * (1.0 - p) * qa1 * ps) * pc2 +
              (1.0 - p) * (1.0 + (1.0 - N) * p) * qa2 * ps * pc2) /
             D;
    }
    case PolicyKind::cars: {
      const double x = std::get<CarsPolicy>(policy).sample_prob * ps;
      return (N - 1) * (1.0 - x) / (N - x) + (N - 1) * p * x * pc1 +
             (3.0 - 2.0 * N - (N - 1) * p * x + 2.0 * (N - 1) * (N - 1) / (N - x)) * pc2;
    }
    case PolicyKind::tars:
      throw std::invalid_argument(
          "prob_correct_action has no closed form for tars; use the chain oracle or simulate");
  }
  throw std::logic_error("unreachable");
}

double actuation_rate(const SamplingPolicy& policy, const ActuationPolicy& act,
                      const SourceParams& src, const ChannelParams& ch) {
  require_valid(policy);
  require_valid(act);
  require_ergodic_source(src);
  const int N = src.states;
  const double p = src.cross_prob;
  const double ps = ch.success_prob;
  const double pc1 = act.act_on_delivery, pc2 = act.act_otherwise;
  switch (kind_of(policy)) {
    case PolicyKind::rs: {
      const double a = std::get<RsPolicy>(policy).sample_prob * ps;
      return a * pc1 + (1.0 - a) * pc2;
    }
    case PolicyKind::sars: {
      const auto& s = std::get<SarsPolicy>(policy);
      const double qa1 = s.new_error_prob, qa2 = s.old_error_prob;
      const double D = N * p + (1.0 - N) * p * qa1 * ps + (1.0 - p) * qa2 * ps;
      return ((N - 1) * p * ps * (p * (qa1 - qa2) + qa2) / D) * pc1 +
             ((N * p + (1.0 - N) * p * (1.0 + p) * qa1 * ps +
               (1.0 - p) * (1.0 + (1.0 - N) * p) * qa2 * ps) /
              D) *
                 pc2;
    }
    case PolicyKind::cars: {
      const double x = std::get<CarsPolicy>(policy).sample_prob * ps;
      return (N - 1) * p * x * pc1 + (1.0 + (1.0 - N) * p * x) * pc2;
    }
    case PolicyKind::tars:
      throw std::invalid_argument(
          "actuation_rate has no closed form for tars; use the chain oracle or simulate");
  }
  throw std::logic_error("unreachable");
}

}  // namespace aoii
