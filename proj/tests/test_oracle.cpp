#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <variant>

#include "aoii/analytic.hpp"
#include "aoii/oracle.hpp"

using namespace aoii;

namespace {

const ActuationPolicy act10{1.0, 0.0};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("chain solve reproduces the closed forms it never consulted") {
  const SamplingPolicy policies[] = {SamplingPolicy{RsPolicy{0.3}}, SamplingPolicy{CarsPolicy{0.6}},
                                     SamplingPolicy{SarsPolicy{0.2, 0.7}},
                                     SamplingPolicy{TarsPolicy{3, 0.4}}};
  for (int N : {2, 5})
    for (double q : {0.1, 0.8})
      for (double ps : {0.1, 0.9}) {
        const SourceParams s = make_source_params(N, q);
        const ChannelParams c = make_channel_params(ps);
        for (const auto& pol : policies) {
          const OracleReport r = solve_chain(pol, act10, s, c, 600);
          CHECK(rel_err(r.mean_aoii, average_aoii(pol, s, c)) < 1e-8);
          CHECK(rel_err(r.sampling_rate, sampling_rate(pol, s, c)) < 1e-8);
          if (kind_of(pol) != PolicyKind::tars) {
            CHECK(rel_err(r.p_delta0, prob_correct_action(pol, act10, s, c)) < 1e-8);
            CHECK(rel_err(r.actuation_rate, actuation_rate(pol, act10, s, c)) < 1e-8);
          }
        }
      }
}

TEST_CASE("chain solve handles the always-moving source") {
  const SourceParams s = make_source_params(2, 0.0);  // period-2 source
  const ChannelParams c = make_channel_params(0.5);
  const OracleReport r = solve_chain(RsPolicy{0.5}, act10, s, c, 400);
  CHECK(rel_err(r.mean_aoii, average_aoii(RsPolicy{0.5}, s, c)) < 1e-10);
}

TEST_CASE("stationary weights and level marginal are probability laws") {
  const OracleReport r = solve_chain(SarsPolicy{0.1, 0.9}, act10, make_source_params(3, 0.5),
                                     make_channel_params(0.5), 200);
  double sum = 0.0;
  for (const auto& [state, w] : r.stationary) {
    CHECK(w >= 0.0);
    CHECK(state.aoii_level <= 200);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  double marginal = 0.0;
  for (double m : r.level_marginal) marginal += m;
  CHECK(marginal == doctest::Approx(1.0).epsilon(1e-10));
  const double events = r.events.sync_idle + r.events.sync_fail + r.events.sync_deliver +
                        r.events.err_idle + r.events.err_fail;
  CHECK(events == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("level marginal matches the analytic law, bucket included") {
  const int K = 80;
  const SamplingPolicy pol{RsPolicy{0.5}};
  const SourceParams s = make_source_params(3, 0.5);
  const ChannelParams c = make_channel_params(0.5);
  const OracleReport r = solve_chain(pol, act10, s, c, K);
  const AoiiDistribution d = aoii_distribution(pol, s, c, K);
  for (int i = 0; i < K; ++i) CHECK(std::abs(r.level_marginal[i] - d.pi[i]) < 1e-12);
  CHECK(std::abs(r.level_marginal[K] - (d.pi[K] + d.tail_mass)) < 1e-12);
}

TEST_CASE("bucket algebra makes the mean independent of the truncation point") {
  const SamplingPolicy pol{SarsPolicy{0.2, 0.6}};
  const SourceParams s = make_source_params(3, 0.5);
  const ChannelParams c = make_channel_params(0.5);
  const double at60 = solve_chain(pol, act10, s, c, 60).mean_aoii;
  const double at600 = solve_chain(pol, act10, s, c, 600).mean_aoii;
  CHECK(rel_err(at60, at600) < 1e-10);
}

TEST_CASE("degenerate actuation identities through the oracle") {
  const SamplingPolicy pol{TarsPolicy{2, 0.3}};
  const SourceParams s = make_source_params(3, 0.1);
  const ChannelParams c = make_channel_params(0.5);
  const OracleReport all = solve_chain(pol, ActuationPolicy{1.0, 1.0}, s, c, 300);
  const OracleReport none = solve_chain(pol, ActuationPolicy{0.0, 0.0}, s, c, 300);
  CHECK(rel_err(all.p_delta0, all.level_marginal[0]) < 1e-12);
  CHECK(rel_err(none.p_delta0, 1.0 - none.level_marginal[0]) < 1e-12);
}

TEST_CASE("oracle rejects what it cannot answer") {
  const SourceParams s = make_source_params(3, 0.1);
  const ChannelParams c = make_channel_params(0.5);
  CHECK_THROWS_AS(solve_chain(RsPolicy{0.5}, act10, make_source_params(3, 1.0), c, 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_chain(TarsPolicy{8, 0.5}, act10, s, c, 5), std::invalid_argument);
  CHECK_THROWS_AS(solve_chain(RsPolicy{0.5}, act10, s, c, 0), std::invalid_argument);
  // nearly frozen source: mass past any small truncation exceeds the bound
  CHECK_THROWS_AS(solve_chain(RsPolicy{0.1}, act10, make_source_params(5, 0.999),
                              make_channel_params(0.1), 50),
                  NumericalError);
}

TEST_CASE("sampling grid search brackets the closed-form optimum") {
  const SourceParams s = make_source_params(3, 0.1);
  const ChannelParams c = make_channel_params(0.5);
  const double eta = 0.3;
  const SamplingOptResult closed[] = {optimize_rs(s, c, eta), optimize_cars(s, c, eta),
                                      optimize_sars(s, c, eta), optimize_tars(s, c, eta)};
  const PolicyKind kinds[] = {PolicyKind::rs, PolicyKind::cars, PolicyKind::sars,
                              PolicyKind::tars};
  for (int i = 0; i < 4; ++i) {
    const SamplingOptResult grid = grid_search_sampling(kinds[i], s, c, eta, 0.01);
    CHECK(grid.constraint_value <= eta + 1e-9);
    CHECK(closed[i].objective <= grid.objective + 1e-9);
    CHECK(closed[i].objective > grid.objective - 0.05);
  }
}

TEST_CASE("actuation grid search agrees with the closed form away from ties") {
  const SourceParams s = make_source_params(3, 0.1);
  const ChannelParams c = make_channel_params(0.9);
  const SamplingPolicy pol{RsPolicy{0.4}};
  const ActuationOptResult closed = optimize_actuation(pol, s, c, 0.5);
  const ActuationOptResult grid = grid_search_actuation(pol, s, c, 0.5, 0.01);
  CHECK(grid.constraint_value <= 0.5 + 1e-9);
  CHECK(closed.objective >= grid.objective - 1e-9);
  CHECK(std::abs(closed.objective - grid.objective) < 0.05);
}

TEST_CASE("tars actuation grid search is consistent with a fresh chain solve") {
  const SamplingPolicy pol{TarsPolicy{2, 0.5}};
  const SourceParams s = make_source_params(3, 0.5);
  const ChannelParams c = make_channel_params(0.5);
  const ActuationOptResult grid = grid_search_actuation(pol, s, c, 0.4, 0.01, 400);
  const OracleReport check = solve_chain(pol, grid.actuation, s, c, 400);
  CHECK(rel_err(grid.objective, check.p_delta0) < 1e-12);
  CHECK(rel_err(grid.constraint_value, check.actuation_rate) < 1e-12);
  CHECK(grid.constraint_value <= 0.4 + 1e-9);
}

TEST_CASE("grid searches validate their inputs") {
  const SourceParams s = make_source_params(3, 0.1);
  const ChannelParams c = make_channel_params(0.5);
  CHECK_THROWS_AS(grid_search_sampling(PolicyKind::rs, s, c, 0.3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(grid_search_sampling(PolicyKind::rs, s, c, 0.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(grid_search_actuation(RsPolicy{0.5}, s, c, 1.5, 0.01), std::invalid_argument);
}
