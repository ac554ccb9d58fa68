#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "aoii/sim.hpp"

using namespace aoii;

namespace {

SimConfig small_config(SamplingPolicy pol) {
  SimConfig cfg;
  cfg.source = make_source_params(3, 0.4);
  cfg.channel = make_channel_params(0.7);
  cfg.sampling = pol;
  cfg.actuation = ActuationPolicy{0.9, 0.2};
  cfg.slots = 20000;
  cfg.burn_in = 100;
  cfg.replications = 3;
  cfg.seed = 17;
  return cfg;
}

}  // namespace

TEST_CASE("slot recursion invariants hold on a long trajectory") {
  const SimConfig cfg = small_config(SarsPolicy{0.3, 0.8});
  RandomStream rng(cfg.seed, 0);
  TrajectoryState st;
  for (int t = 1; t <= 5000; ++t) {
    const auto [next, rec] = step(st, cfg, rng);
    // AoII counts consecutive mismatched slots
    if (rec.x == rec.xhat) {
      CHECK(rec.aoii == 0);
    } else {
      CHECK(rec.aoii == st.aoii + 1);
    }
    // the estimate moves only on a decoded sample, and then onto x
    if (rec.alpha && rec.h) {
      CHECK(rec.xhat == rec.x);
    } else {
      CHECK(rec.xhat == st.recon);
    }
    // CoAU resets exactly on (synced, acted) or (erroneous, idle)
    const bool correct = (rec.x == rec.xhat) == rec.c;
    if (correct) {
      CHECK(rec.delta == 0);
    } else {
      CHECK(rec.delta == st.coau + 1);
    }
    CHECK(next.aoii == rec.aoii);
    CHECK(next.coau == rec.delta);
    CHECK(next.prev_state == st.state);
    st = next;
  }
}

TEST_CASE("replaying a trajectory reproduces every record") {
  const SimConfig cfg = small_config(TarsPolicy{2, 0.6});
  for (int rep = 0; rep < 2; ++rep) {
    RandomStream a(cfg.seed, rep), b(cfg.seed, rep);
    TrajectoryState sa, sb;
    for (int t = 0; t < 2000; ++t) {
      const auto [na, ra] = step(sa, cfg, a);
      const auto [nb, rb] = step(sb, cfg, b);
      CHECK(ra.x == rb.x);
      CHECK(ra.alpha == rb.alpha);
      CHECK(ra.c == rb.c);
      CHECK(ra.aoii == rb.aoii);
      CHECK(ra.delta == rb.delta);
      sa = na;
      sb = nb;
    }
  }
}

TEST_CASE("always-sampling tars and rs produce identical trajectories") {
  // both policies sample with probability 1 every slot, so no decision draw is
  // consumed and the slot streams must coincide draw for draw
  SimConfig tars = small_config(TarsPolicy{1, 1.0});
  SimConfig rs = small_config(RsPolicy{1.0});
  RandomStream a(tars.seed, 0), b(rs.seed, 0);
  TrajectoryState sa, sb;
  for (int t = 0; t < 3000; ++t) {
    const auto [na, ra] = step(sa, tars, a);
    const auto [nb, rb] = step(sb, rs, b);
    CHECK(ra.x == rb.x);
    CHECK(ra.xhat == rb.xhat);
    CHECK(ra.aoii == rb.aoii);
    CHECK(ra.delta == rb.delta);
    sa = na;
    sb = nb;
  }
}

TEST_CASE("run is deterministic for a fixed config") {
  const SimConfig cfg = small_config(RsPolicy{0.4});
  const SimReport a = run(cfg);
  const SimReport b = run(cfg);
  CHECK(a.mean_aoii.mean == b.mean_aoii.mean);
  CHECK(a.mean_aoii.half_width == b.mean_aoii.half_width);
  CHECK(a.p_delta0_hat.mean == b.p_delta0_hat.mean);
  CHECK(a.aoii_histogram == b.aoii_histogram);
  CHECK(a.replication_means == b.replication_means);
}

TEST_CASE("histogram is a probability law consistent with the mean") {
  const SimReport r = run(small_config(CarsPolicy{0.7}));
  double mass = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < r.aoii_histogram.size(); ++i) {
    mass += r.aoii_histogram[i];
    mean += i * r.aoii_histogram[i];
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  const double pooled =
      std::accumulate(r.replication_means.begin(), r.replication_means.end(), 0.0) /
      r.replication_means.size();
  CHECK(mean == doctest::Approx(pooled).epsilon(1e-12));
}

TEST_CASE("estimates carry a zero half-width for a single replication") {
  SimConfig cfg = small_config(RsPolicy{0.5});
  cfg.replications = 1;
  CHECK(run(cfg).mean_aoii.half_width == 0.0);
}

TEST_CASE("require_valid lists every violation") {
  SimConfig cfg = small_config(RsPolicy{0.5});
  cfg.slots = 0;
  cfg.burn_in = -1;
  cfg.replications = 0;
  try {
    require_valid(cfg);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find(';') != std::string::npos);  // several joined diagnostics
  }
}

TEST_CASE("require_valid rejects an inconsistent source row") {
  SimConfig cfg = small_config(RsPolicy{0.5});
  cfg.source.cross_prob = 0.5;  // row sums past 1 for states = 3
  CHECK_THROWS_AS(require_valid(cfg), std::invalid_argument);
}

TEST_CASE("burn-in changes the retained window") {
  SimConfig a = small_config(RsPolicy{0.2});
  SimConfig b = a;
  b.burn_in = a.burn_in + 5000;
  CHECK(run(a).replication_means != run(b).replication_means);
}
