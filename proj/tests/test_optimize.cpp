#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <variant>

#include "aoii/analytic.hpp"
#include "aoii/optimize.hpp"

using namespace aoii;

namespace {

const SourceParams src31 = make_source_params(3, 0.1);
const ChannelParams ch1 = make_channel_params(0.1);
const ChannelParams ch8 = make_channel_params(0.8);

}  // namespace

TEST_CASE("rs optimum saturates the budget") {
  for (double eta : {0.05, 0.3, 1.0}) {
    const SamplingOptResult r = optimize_rs(src31, ch8, eta);
    CHECK(std::get<RsPolicy>(r.policy).sample_prob == eta);
    CHECK(r.constraint_value == doctest::Approx(eta).epsilon(1e-12));
    CHECK(r.objective == doctest::Approx(average_aoii(r.policy, src31, ch8)).epsilon(1e-12));
  }
}

TEST_CASE("cars optimum reference value") {
  const SamplingOptResult r = optimize_cars(src31, ch8, 0.2);
  CHECK(std::get<CarsPolicy>(r.policy).sample_prob ==
        doctest::Approx(0.222222222222222).epsilon(1e-12));
  CHECK(r.constraint_value <= 0.2 + 1e-9);
}

TEST_CASE("cars optimum clamps once the budget stops binding") {
  const SamplingOptResult r = optimize_cars(src31, ch8, 1.0);
  CHECK(std::get<CarsPolicy>(r.policy).sample_prob == 1.0);
}

TEST_CASE("sars optimum reference values") {
  const SamplingOptResult tight = optimize_sars(src31, ch1, 0.3);
  const auto& p = std::get<SarsPolicy>(tight.policy);
  CHECK(p.new_error_prob == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.old_error_prob == doctest::Approx(0.8463949843260187).epsilon(1e-12));
  CHECK(tight.objective == doctest::Approx(1.29783950617284).epsilon(1e-10));
  CHECK(tight.constraint_value <= 0.3 + 1e-9);

  const SamplingOptResult loose = optimize_sars(src31, make_channel_params(0.95), 1.0);
  const auto& pl = std::get<SarsPolicy>(loose.policy);
  CHECK(pl.new_error_prob == 1.0);
  CHECK(pl.old_error_prob == 1.0);
}

TEST_CASE("tars optimum reference values") {
  SamplingOptResult r = optimize_tars(src31, ch8, 0.3);
  CHECK(std::get<TarsPolicy>(r.policy).threshold == 2);
  CHECK(std::get<TarsPolicy>(r.policy).threshold_prob ==
        doctest::Approx(0.3069873997709046).epsilon(1e-12));

  r = optimize_tars(src31, ch1, 0.48);
  CHECK(std::get<TarsPolicy>(r.policy).threshold == 2);
  CHECK(std::get<TarsPolicy>(r.policy).threshold_prob ==
        doctest::Approx(0.4738315141337811).epsilon(1e-12));
  CHECK(r.objective == doctest::Approx(1.29960836083608).epsilon(1e-10));

  r = optimize_tars(src31, ch1, 1.0);
  CHECK(std::get<TarsPolicy>(r.policy).threshold == 1);
  CHECK(std::get<TarsPolicy>(r.policy).threshold_prob == 1.0);
}

TEST_CASE("sampling optima are feasible across a parameter sample") {
  for (int N : {2, 3, 5})
    for (double q : {0.1, 0.5, 0.8})
      for (double ps : {0.1, 0.5, 0.9})
        for (double eta : {0.1, 0.45, 1.0}) {
          const SourceParams s = make_source_params(N, q);
          const ChannelParams c = make_channel_params(ps);
          for (const auto& r : {optimize_rs(s, c, eta), optimize_cars(s, c, eta),
                                optimize_sars(s, c, eta), optimize_tars(s, c, eta)}) {
            CHECK(r.constraint_value <= eta + 1e-9);
            CHECK(r.objective ==
                  doctest::Approx(average_aoii(r.policy, s, c)).epsilon(1e-12));
            CHECK(validate(r.policy).empty());
            CHECK(r.eta == eta);
          }
        }
}

TEST_CASE("optimizers reject bad budgets and the frozen source") {
  CHECK_THROWS_AS(optimize_rs(src31, ch8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(optimize_tars(src31, ch8, 1.2), std::invalid_argument);
  CHECK_THROWS_AS(optimize_sars(make_source_params(3, 1.0), ch8, 0.5), std::invalid_argument);
}

TEST_CASE("actuation optimum prefers idling when errors dominate") {
  // rapidly changing source, weak channel: acting blindly is usually wrong
  const SamplingPolicy pol = optimize_rs(src31, ch1, 0.1).policy;
  const ActuationOptResult r = optimize_actuation(pol, src31, ch1, 1.0);
  CHECK(r.actuation.act_on_delivery == 1.0);
  CHECK(r.actuation.act_otherwise == 0.0);
  CHECK(r.objective == doctest::Approx(0.6717).epsilon(2e-3));
  CHECK(prob_correct_action(pol, ActuationPolicy{1.0, 1.0}, src31, ch1) ==
        doctest::Approx(0.3383).epsilon(2e-3));
}

TEST_CASE("actuation optimum spends leftover budget on non-delivery slots when they help") {
  // slow source: the estimate is usually right, so acting without a fresh
  // delivery is still usually correct
  const SourceParams slow = make_source_params(3, 0.9);
  const SamplingPolicy pol{RsPolicy{0.2}};
  const ActuationOptResult r = optimize_actuation(pol, slow, ch8, 1.0);
  CHECK(r.actuation.act_on_delivery == 1.0);
  CHECK(r.actuation.act_otherwise == 1.0);
}

TEST_CASE("tight actuation budget lands on the constraint") {
  const SourceParams slow = make_source_params(3, 0.9);
  const SamplingPolicy pol{RsPolicy{1.0}};  // decode rate = ps
  const ActuationOptResult r = optimize_actuation(pol, slow, make_channel_params(0.9), 0.3);
  CHECK(r.constraint_value == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.actuation.act_on_delivery == doctest::Approx(0.3 / 0.9).epsilon(1e-12));
  CHECK(r.actuation.act_otherwise == 0.0);
}

TEST_CASE("vacuous actuation corners are flagged") {
  const ActuationOptResult never =
      optimize_actuation(RsPolicy{0.5}, src31, make_channel_params(0.0), 0.7);
  CHECK_FALSE(never.note.empty());
  CHECK(never.constraint_value <= 0.7 + 1e-9);

  const ActuationOptResult always =
      optimize_actuation(RsPolicy{1.0}, src31, make_channel_params(1.0), 0.7);
  CHECK_FALSE(always.note.empty());
  CHECK(always.actuation.act_on_delivery == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("actuation optimizer rejects tars and bad budgets") {
  CHECK_THROWS_AS(optimize_actuation(TarsPolicy{2, 0.5}, src31, ch8, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(optimize_actuation(RsPolicy{0.5}, src31, ch8, 0.0), std::invalid_argument);
}
