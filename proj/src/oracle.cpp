#include "aoii/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "aoii/analytic.hpp"

namespace aoii {
namespace {

int pair_index(int x, int xhat, int N) { return x * (N - 1) + (xhat < x ? xhat : xhat - 1); }

void require_inputs(const SamplingPolicy& policy, const ActuationPolicy& act,
                    const SourceParams& src, const ChannelParams& ch, int truncation) {
  std::string msg;
  auto add = [&msg](const std::string& m) {
    if (!msg.empty()) msg += "; ";
    msg += m;
  };
  for (const auto& m : validate(policy)) add(m);
  for (const auto& m : validate(act)) add(m);
  if (src.states < 2) add("source needs at least 2 states");
  if (!(src.self_prob >= 0.0 && src.self_prob <= 1.0))
    add("self-transition probability outside [0, 1]");
  if (!(src.cross_prob > 0.0)) add("degenerate source: stationary law not unique for q = 1");
  if (!(ch.success_prob >= 0.0 && ch.success_prob <= 1.0))
    add("channel success probability outside [0, 1]");
  if (truncation < 1) add("truncation must be at least 1");
  if (const auto* t = std::get_if<TarsPolicy>(&policy); t && truncation < t->threshold)
    add("truncation must reach the tars threshold");
  if (!msg.empty()) throw std::invalid_argument(msg);
}

// Split of one level's transition kernel. Transitions out of a level go either
// back to level 0 (decoded sample, or the source walking onto the estimate) or
// to the next level up; that exhausts the slot contract, so to_zero and
// survive together hold every row's full mass.
struct LevelBlocks {
  Eigen::MatrixXd to_zero;
  Eigen::MatrixXd survive;
};

void check_rows(const LevelBlocks& b, std::int64_t level) {
  const auto sums = b.to_zero.rowwise().sum() + b.survive.rowwise().sum();
  if ((sums.array() - 1.0).abs().maxCoeff() > 1e-12)
    throw NumericalError("kernel row not stochastic at level " + std::to_string(level));
}

// Blocks out of the synced states (level 0): rows indexed by x, survive
// columns by erroneous pair.
LevelBlocks build_zero_blocks(const SamplingPolicy& pol, const SourceParams& src,
                              const ChannelParams& ch) {
  const int N = src.states;
  const int M = N * (N - 1);
  LevelBlocks b{Eigen::MatrixXd::Zero(N, N), Eigen::MatrixXd::Zero(N, M)};
  for (int x = 0; x < N; ++x)
    for (int xn = 0; xn < N; ++xn) {
      const double t = xn == x ? src.self_prob : src.cross_prob;
      if (t == 0.0) continue;
      if (xn == x) {
        b.to_zero(x, xn) += t;
        continue;
      }
      const double sp = sample_probability(pol, SamplerObservation{xn, x, x, 0});
      b.to_zero(x, xn) += t * sp * ch.success_prob;
      b.survive(x, pair_index(xn, x, N)) += t * (1.0 - sp * ch.success_prob);
    }
  check_rows(b, 0);
  return b;
}

// Blocks out of one erroneous level; `level` feeds the policy's AoII input.
LevelBlocks build_pair_blocks(const SamplingPolicy& pol, const SourceParams& src,
                              const ChannelParams& ch, std::int64_t level) {
  const int N = src.states;
  const int M = N * (N - 1);
  LevelBlocks b{Eigen::MatrixXd::Zero(M, N), Eigen::MatrixXd::Zero(M, M)};
  for (int x = 0; x < N; ++x)
    for (int xhat = 0; xhat < N; ++xhat) {
      if (xhat == x) continue;
      const int row = pair_index(x, xhat, N);
      for (int xn = 0; xn < N; ++xn) {
        const double t = xn == x ? src.self_prob : src.cross_prob;
        if (t == 0.0) continue;
        if (xn == xhat) {
          b.to_zero(row, xn) += t;
          continue;
        }
        const double sp = sample_probability(pol, SamplerObservation{xn, x, xhat, level});
        b.to_zero(row, xn) += t * sp * ch.success_prob;
        b.survive(row, pair_index(xn, xhat, N)) += t * (1.0 - sp * ch.success_prob);
      }
    }
  check_rows(b, level);
  return b;
}

// Adds one level's contribution to the slot-event masses. measure(j) is the
// stationary weight of state j at this level (synced states when xhat_of is
// identity, erroneous pairs otherwise); sigma is evaluated at `level`.
void accumulate_events(const SamplingPolicy& pol, const SourceParams& src,
                       const ChannelParams& ch, std::int64_t level,
                       const Eigen::RowVectorXd& measure, bool synced_level, EventProbs& ev,
                       double& sampling_rate) {
  const int N = src.states;
  for (int x = 0; x < N; ++x)
    for (int xhat = 0; xhat < N; ++xhat) {
      if (synced_level ? xhat != x : xhat == x) continue;
      const double m = synced_level ? measure(x) : measure(pair_index(x, xhat, N));
      if (m == 0.0) continue;
      for (int xn = 0; xn < N; ++xn) {
        const double t = xn == x ? src.self_prob : src.cross_prob;
        if (t == 0.0) continue;
        const double sp = sample_probability(pol, SamplerObservation{xn, x, xhat, level});
        sampling_rate += m * t * sp;
        ev.sync_deliver += m * t * sp * ch.success_prob;
        const double idle = m * t * (1.0 - sp);
        const double fail = m * t * sp * (1.0 - ch.success_prob);
        if (xn == xhat) {
          ev.sync_idle += idle;
          ev.sync_fail += fail;
        } else {
          ev.err_idle += idle;
          ev.err_fail += fail;
        }
      }
    }
}

}  // namespace

OracleReport solve_chain(const SamplingPolicy& policy, const ActuationPolicy& act,
                         const SourceParams& src, const ChannelParams& ch, int truncation,
                         double tail_bound) {
  require_inputs(policy, act, src, ch, truncation);
  const int N = src.states;
  const int M = N * (N - 1);
  const int K = truncation;

  const LevelBlocks zero = build_zero_blocks(policy, src, ch);
  std::vector<LevelBlocks> pair_blocks;
  pair_blocks.reserve(K);
  for (int i = 1; i <= K; ++i) pair_blocks.push_back(build_pair_blocks(policy, src, ch, i));
  const LevelBlocks& bucket = pair_blocks.back();
  const Eigen::PartialPivLU<Eigen::MatrixXd> bucket_lu(
      (Eigen::MatrixXd::Identity(M, M) - bucket.survive).transpose());

  // Return map of one excursion away from the synced set: row j is the
  // distribution over synced states after leaving them from state j. The chain
  // only ever climbs one level or resets, so propagating level by level and
  // summing the geometric remainder inside the bucket covers every path.
  Eigen::MatrixXd returns = zero.to_zero;
  Eigen::MatrixXd basis = zero.survive;  // N x M, rows: measures at the current level
  for (int i = 1; i <= K - 1; ++i) {
    returns += basis * pair_blocks[i - 1].to_zero;
    basis = basis * pair_blocks[i - 1].survive;
  }
  const Eigen::MatrixXd bucket_basis = bucket_lu.solve(basis.transpose()).transpose();
  returns += bucket_basis * bucket.to_zero;

  // Stationary weights of the synced states under the return map.
  Eigen::MatrixXd lhs = returns.transpose() - Eigen::MatrixXd::Identity(N, N);
  lhs.row(N - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  rhs(N - 1) = 1.0;
  const Eigen::VectorXd u0 = lhs.fullPivLu().solve(rhs);
  if ((returns.transpose() * u0 - u0).cwiseAbs().maxCoeff() > 1e-12 || u0.minCoeff() < -1e-12)
    throw NumericalError("synced-state stationary solve did not converge");

  // Forward pass with the solved weights: per-level measures, event masses,
  // and the AoII moments, all still unnormalized.
  OracleReport rep;
  Eigen::RowVectorXd level0 = u0.transpose().cwiseMax(0.0);
  EventProbs ev;
  double sampling = 0.0;
  accumulate_events(policy, src, ch, 0, level0, true, ev, sampling);
  rep.level_marginal.assign(K + 1, 0.0);
  rep.level_marginal[0] = level0.sum();
  double total = level0.sum();
  double mean_acc = 0.0;
  rep.stationary.reserve(N + static_cast<std::size_t>(K) * M);
  for (int x = 0; x < N; ++x) rep.stationary.push_back({JointState{x, x, 0}, level0(x)});

  auto push_level = [&](const Eigen::RowVectorXd& m, int lvl) {
    for (int x = 0; x < N; ++x)
      for (int xhat = 0; xhat < N; ++xhat)
        if (xhat != x) rep.stationary.push_back({JointState{x, xhat, lvl}, m(pair_index(x, xhat, N))});
  };

  Eigen::RowVectorXd level = level0 * zero.survive;
  for (int i = 1; i <= K - 1; ++i) {
    accumulate_events(policy, src, ch, i, level, false, ev, sampling);
    rep.level_marginal[i] = level.sum();
    total += level.sum();
    mean_acc += static_cast<double>(i) * level.sum();
    push_level(level, i);
    level = level * pair_blocks[i - 1].survive;
  }
  const Eigen::RowVectorXd in_bucket = bucket_lu.solve(level.transpose()).transpose();
  accumulate_events(policy, src, ch, K, in_bucket, false, ev, sampling);
  rep.level_marginal[K] = in_bucket.sum();
  total += in_bucket.sum();
  push_level(in_bucket, K);
  // Sum of (true level - K) over the bucket: y = in_bucket * survive * (I - survive)^-1.
  const Eigen::RowVectorXd excess =
      bucket_lu.solve((in_bucket * bucket.survive).transpose()).transpose();
  mean_acc += static_cast<double>(K) * in_bucket.sum() + excess.sum();

  for (auto& entry : rep.stationary) entry.second /= total;
  for (auto& m : rep.level_marginal) m /= total;
  rep.mean_aoii = mean_acc / total;
  rep.tail_mass = in_bucket.sum() / total;
  rep.events = EventProbs{ev.sync_idle / total, ev.sync_fail / total, ev.sync_deliver / total,
                          ev.err_idle / total, ev.err_fail / total};
  rep.sampling_rate = sampling / total;
  rep.decode_rate = rep.events.sync_deliver;
  rep.actuation_rate =
      act.act_on_delivery * rep.decode_rate + act.act_otherwise * (1.0 - rep.decode_rate);
  rep.p_delta0 = act.act_on_delivery * rep.events.sync_deliver +
                 act.act_otherwise * (rep.events.sync_idle + rep.events.sync_fail) +
                 (1.0 - act.act_otherwise) * (rep.events.err_idle + rep.events.err_fail);

  double mass = 0.0;
  for (double m : rep.level_marginal) mass += m;
  if (std::abs(mass - 1.0) > 1e-10)
    throw NumericalError("stationary mass drifted from 1: " + std::to_string(mass));
  if (rep.tail_mass > tail_bound)
    throw NumericalError("truncation keeps " + std::to_string(rep.tail_mass) +
                         " mass above level " + std::to_string(K) + "; raise the truncation");
  return rep;
}

namespace {

struct GridSpec {
  long count = 0;
  double value(long j) const { return static_cast<double>(j) / static_cast<double>(count); }
};

GridSpec make_grid(double step) {
  if (!(step > 0.0 && step <= 0.1))
    throw std::invalid_argument("grid step must be in (0, 0.1]");
  return GridSpec{std::lround(1.0 / step)};
}

struct SamplingBest {
  double objective = 0.0;
  double rate = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  bool set = false;

  void offer(double obj, double r, double a, double b) {
    if (set && std::tie(objective, rate, p1, p2) <= std::tie(obj, r, a, b)) return;
    objective = obj;
    rate = r;
    p1 = a;
    p2 = b;
    set = true;
  }
};

}  // namespace

SamplingOptResult grid_search_sampling(PolicyKind family, const SourceParams& src,
                                       const ChannelParams& ch, double eta, double step) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must be in (0, 1]");
  const GridSpec grid = make_grid(step);
  SamplingBest best;
  auto offer = [&](const SamplingPolicy& pol, double a, double b) {
    const double rate = sampling_rate(pol, src, ch);
    if (rate > eta + 1e-9) return;
    best.offer(average_aoii(pol, src, ch), rate, a, b);
  };

  switch (family) {
    case PolicyKind::rs:
      for (long j = 0; j <= grid.count; ++j) offer(RsPolicy{grid.value(j)}, grid.value(j), 0.0);
      return SamplingOptResult{RsPolicy{best.p1}, best.objective, best.rate, eta, {}};
    case PolicyKind::cars:
      for (long j = 0; j <= grid.count; ++j) offer(CarsPolicy{grid.value(j)}, grid.value(j), 0.0);
      return SamplingOptResult{CarsPolicy{best.p1}, best.objective, best.rate, eta, {}};
    case PolicyKind::sars:
      for (long j1 = 0; j1 <= grid.count; ++j1)
        for (long j2 = j1; j2 <= grid.count; ++j2)
          offer(SarsPolicy{grid.value(j1), grid.value(j2)}, grid.value(j1), grid.value(j2));
      return SamplingOptResult{SarsPolicy{best.p1, best.p2}, best.objective, best.rate, eta, {}};
    case PolicyKind::tars: {
      const auto closed = optimize_tars(src, ch, eta);
      const int n_max = std::get<TarsPolicy>(closed.policy).threshold + 5;
      for (int n = 1; n <= n_max; ++n)
        for (long j = 0; j <= grid.count; ++j)
          offer(TarsPolicy{n, grid.value(j)}, static_cast<double>(n), grid.value(j));
      return SamplingOptResult{TarsPolicy{static_cast<int>(best.p1), best.p2}, best.objective,
                               best.rate, eta, {}};
    }
  }
  throw std::logic_error("unreachable");
}

ActuationOptResult grid_search_actuation(const SamplingPolicy& policy, const SourceParams& src,
                                         const ChannelParams& ch, double mu, double step,
                                         int truncation) {
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("mu must be in (0, 1]");
  const GridSpec grid = make_grid(step);

  // Both the objective and the rate are linear in (p_c1, p_c2); extract the
  // coefficients once, through the closed forms where they exist and through
  // one chain solve for TARS.
  double base, c1, c2, a;
  if (kind_of(policy) == PolicyKind::tars) {
    const OracleReport rep = solve_chain(policy, ActuationPolicy{1.0, 0.0}, src, ch, truncation);
    base = rep.events.err_idle + rep.events.err_fail;
    c1 = rep.events.sync_deliver;
    c2 = rep.events.sync_idle + rep.events.sync_fail - base;
    a = rep.decode_rate;
  } else {
    base = prob_correct_action(policy, ActuationPolicy{0.0, 0.0}, src, ch);
    c1 = prob_correct_action(policy, ActuationPolicy{1.0, 0.0}, src, ch) - base;
    c2 = prob_correct_action(policy, ActuationPolicy{0.0, 1.0}, src, ch) - base;
    a = actuation_rate(policy, ActuationPolicy{1.0, 0.0}, src, ch);
  }

  bool set = false;
  double b_obj = 0.0, b_rate = 0.0, b1 = 0.0, b2 = 0.0;
  for (long j1 = 0; j1 <= grid.count; ++j1)
    for (long j2 = 0; j2 <= grid.count; ++j2) {
      const double pc1 = grid.value(j1), pc2 = grid.value(j2);
      const double rate = a * pc1 + (1.0 - a) * pc2;
      if (rate > mu + 1e-9) continue;
      const double obj = base + c1 * pc1 + c2 * pc2;
      const bool better = !set || obj > b_obj ||
                          (obj == b_obj && std::tie(rate, pc1, pc2) < std::tie(b_rate, b1, b2));
      if (better) {
        b_obj = obj;
        b_rate = rate;
        b1 = pc1;
        b2 = pc2;
        set = true;
      }
    }
  return ActuationOptResult{ActuationPolicy{b1, b2}, b_obj, b_rate, mu, {}};
}

}  // namespace aoii
