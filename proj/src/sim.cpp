#include "aoii/sim.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace aoii {
namespace {

std::string join(const std::vector<std::string>& msgs) {
  std::string out;
  for (const auto& m : msgs) {
    if (!out.empty()) out += "; ";
    out += m;
  }
  return out;
}

// One slot, shared by step() and the replication loops so both consume random
// draws identically. Templating on the policy type keeps the per-slot decision
// a direct inlined call instead of a variant dispatch.
template <class Pol>
SlotRecord advance(TrajectoryState& st, const SourceParams& src, const ChannelParams& ch,
                   const Pol& pol, const ActuationPolicy& act, RandomStream& rng) {
  const int x_prev = st.state;
  const int xhat_prev = st.recon;
  const int x = source_step(src, x_prev, rng);
  const bool alpha =
      rng.bernoulli(sample_probability(pol, SamplerObservation{x, x_prev, xhat_prev, st.aoii}));
  bool h = false;
  int xhat = xhat_prev;
  if (alpha) {
    h = channel_draw(ch, rng);
    if (h) xhat = x;
  }
  const std::int64_t aoii = x != xhat ? st.aoii + 1 : 0;
  const bool c = decide_action(act, alpha, h, rng);
  const bool correct = (x == xhat) ? c : !c;
  const std::int64_t delta = correct ? 0 : st.coau + 1;
  st.prev_state = x_prev;
  st.state = x;
  st.recon = xhat;
  st.aoii = aoii;
  st.coau = delta;
  return SlotRecord{0, x, xhat, alpha, h, c, aoii, delta};
}

struct RepMeans {
  double aoii = 0.0;
  double delta0 = 0.0;
  double sampling = 0.0;
  double actuation = 0.0;
};

template <class Pol>
RepMeans run_replication(const SimConfig& cfg, const Pol& pol, int rep,
                         std::vector<std::int64_t>& pooled_hist) {
  RandomStream rng(cfg.seed, static_cast<std::uint64_t>(rep));
  TrajectoryState st{};
  for (std::int64_t t = 0; t < cfg.burn_in; ++t)
    advance(st, cfg.source, cfg.channel, pol, cfg.actuation, rng);
  std::int64_t sum_aoii = 0, n_delta0 = 0, n_alpha = 0, n_act = 0;
  for (std::int64_t t = 0; t < cfg.slots; ++t) {
    const SlotRecord rec = advance(st, cfg.source, cfg.channel, pol, cfg.actuation, rng);
    sum_aoii += rec.aoii;
    n_delta0 += rec.delta == 0;
    n_alpha += rec.alpha;
    n_act += rec.c;
    const auto level = static_cast<std::size_t>(rec.aoii);
    if (level >= pooled_hist.size()) pooled_hist.resize(level + 1, 0);
    ++pooled_hist[level];
  }
  const double T = static_cast<double>(cfg.slots);
  return RepMeans{static_cast<double>(sum_aoii) / T, static_cast<double>(n_delta0) / T,
                  static_cast<double>(n_alpha) / T, static_cast<double>(n_act) / T};
}

Estimate summarize(const std::vector<double>& means) {
  const auto r = means.size();
  double sum = 0.0;
  for (double m : means) sum += m;
  const double mean = sum / static_cast<double>(r);
  if (r < 2) return Estimate{mean, 0.0};
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double s = std::sqrt(ss / static_cast<double>(r - 1));
  return Estimate{mean, 1.96 * s / std::sqrt(static_cast<double>(r))};
}

template <class Pol>
SimReport run_impl(const SimConfig& cfg, const Pol& pol) {
  std::vector<double> aoii_means, delta0_means, sampling_means, actuation_means;
  std::vector<std::int64_t> pooled_hist;
  aoii_means.reserve(cfg.replications);
  for (int rep = 0; rep < cfg.replications; ++rep) {
    const RepMeans m = run_replication(cfg, pol, rep, pooled_hist);
    aoii_means.push_back(m.aoii);
    delta0_means.push_back(m.delta0);
    sampling_means.push_back(m.sampling);
    actuation_means.push_back(m.actuation);
  }
  SimReport report;
  report.mean_aoii = summarize(aoii_means);
  report.p_delta0_hat = summarize(delta0_means);
  report.sampling_rate_hat = summarize(sampling_means);
  report.actuation_rate_hat = summarize(actuation_means);
  const double total = static_cast<double>(cfg.slots) * cfg.replications;
  report.aoii_histogram.reserve(pooled_hist.size());
  for (std::int64_t count : pooled_hist)
    report.aoii_histogram.push_back(static_cast<double>(count) / total);
  report.replication_means = std::move(aoii_means);
  return report;
}

}  // namespace

void require_valid(const SimConfig& cfg) {
  std::vector<std::string> msgs = validate(cfg.sampling);
  for (const auto& m : validate(cfg.actuation)) msgs.push_back(m);
  if (cfg.source.states < 2) msgs.push_back("source needs at least 2 states");
  if (!(cfg.source.self_prob >= 0.0 && cfg.source.self_prob <= 1.0))
    msgs.push_back("self-transition probability outside [0, 1]");
  if (!(cfg.source.cross_prob >= 0.0) ||
      std::abs((1.0 - cfg.source.self_prob) - cfg.source.cross_prob * (cfg.source.states - 1)) >
          1e-9)
    msgs.push_back("source rows do not sum to 1 (use make_source_params)");
  if (!(cfg.channel.success_prob >= 0.0 && cfg.channel.success_prob <= 1.0))
    msgs.push_back("channel success probability outside [0, 1]");
  if (cfg.slots < 1) msgs.push_back("slots must be at least 1");
  if (cfg.burn_in < 0) msgs.push_back("burn_in must be nonnegative");
  if (cfg.replications < 1) msgs.push_back("replications must be at least 1");
  if (!msgs.empty()) throw std::invalid_argument(join(msgs));
}

std::pair<TrajectoryState, SlotRecord> step(const TrajectoryState& state, const SimConfig& cfg,
                                            RandomStream& rng) {
  TrajectoryState next = state;
  SlotRecord rec = std::visit(
      [&](const auto& pol) { return advance(next, cfg.source, cfg.channel, pol, cfg.actuation, rng); },
      cfg.sampling);
  return {next, rec};
}

SimReport run(const SimConfig& cfg) {
  require_valid(cfg);
  return std::visit([&](const auto& pol) { return run_impl(cfg, pol); }, cfg.sampling);
}

}  // namespace aoii
