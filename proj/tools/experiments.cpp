#include "experiments.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aoii/analytic.hpp"
#include "aoii/model.hpp"
#include "aoii/optimize.hpp"
#include "aoii/oracle.hpp"
#include "aoii/policy.hpp"
#include "aoii/report.hpp"
#include "aoii/sim.hpp"

namespace aoii::cli {
namespace {

struct Options {
  int N = 3;
  double q = 0.5;
  double ps = 0.5;
  std::string policy = "rs";
  double pr = 0.5;
  double pc = 0.5;
  double qa1 = 0.5;
  double qa2 = 0.5;
  int n = 1;
  double pth = 0.5;
  double eta = 0.5;
  double mu = 0.5;
  double pc1 = 1.0;
  double pc2 = 0.0;
  std::int64_t slots = 1'000'000;
  std::int64_t burnin = 10'000;
  int reps = 10;
  std::uint64_t seed = 1;
  int truncation = 2000;
  std::string out_path;
  std::string format;  // empty: plain for single evaluations, csv for sweeps
  std::string sweep_param;
  double sweep_from = 0.0;
  double sweep_to = 1.0;
  int sweep_points = 2;
  std::string quantity = "aoii";
};

PolicyKind family_of_name(const std::string& s) {
  if (s == "rs") return PolicyKind::rs;
  if (s == "cars") return PolicyKind::cars;
  if (s == "sars") return PolicyKind::sars;
  if (s == "tars") return PolicyKind::tars;
  throw std::invalid_argument("unknown policy name: " + s);
}

SamplingPolicy policy_of(const Options& o) {
  switch (family_of_name(o.policy)) {
    case PolicyKind::rs: return RsPolicy{o.pr};
    case PolicyKind::cars: return CarsPolicy{o.pc};
    case PolicyKind::sars: return SarsPolicy{o.qa1, o.qa2};
    case PolicyKind::tars: return TarsPolicy{o.n, o.pth};
  }
  throw std::logic_error("unreachable");
}

void fill_params(const SamplingPolicy& pol, CsvRow& row) {
  switch (kind_of(pol)) {
    case PolicyKind::rs:
      row.param1 = std::get<RsPolicy>(pol).sample_prob;
      break;
    case PolicyKind::cars:
      row.param1 = std::get<CarsPolicy>(pol).sample_prob;
      break;
    case PolicyKind::sars:
      row.param1 = std::get<SarsPolicy>(pol).new_error_prob;
      row.param2 = std::get<SarsPolicy>(pol).old_error_prob;
      break;
    case PolicyKind::tars:
      row.param1 = std::get<TarsPolicy>(pol).threshold;
      row.param2 = std::get<TarsPolicy>(pol).threshold_prob;
      break;
  }
}

std::vector<std::pair<std::string, double>> named_params(const SamplingPolicy& pol) {
  switch (kind_of(pol)) {
    case PolicyKind::rs: return {{"pr", std::get<RsPolicy>(pol).sample_prob}};
    case PolicyKind::cars: return {{"pc", std::get<CarsPolicy>(pol).sample_prob}};
    case PolicyKind::sars: {
      const auto& p = std::get<SarsPolicy>(pol);
      return {{"qa1", p.new_error_prob}, {"qa2", p.old_error_prob}};
    }
    case PolicyKind::tars: {
      const auto& p = std::get<TarsPolicy>(pol);
      return {{"n", static_cast<double>(p.threshold)}, {"pth", p.threshold_prob}};
    }
  }
  throw std::logic_error("unreachable");
}

CsvRow base_row(const Options& o, const SamplingPolicy& pol) {
  CsvRow row;
  row.policy = policy_name(kind_of(pol));
  row.states = o.N;
  row.q = o.q;
  row.ps = o.ps;
  fill_params(pol, row);
  return row;
}

// Relative paths land in $AOII_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  const char* dir = std::getenv("AOII_OUT_DIR");
  if (!dir || !*dir) return path;
  return std::string(dir) + "/" + path;
}

int write_artifact(const std::string& path, std::ostream& out, std::ostream& err,
                   const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(out);
    return 0;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    err << "error: cannot open output file: " << path << '\n';
    return 2;
  }
  body(file);
  if (!file) {
    err << "error: write failed: " << path << '\n';
    return 2;
  }
  return 0;
}

std::string effective_format(const Options& o, const char* fallback) {
  return o.format.empty() ? fallback : o.format;
}

int do_analytic(const std::string& quantity, const Options& o, std::ostream& out,
                std::ostream& err) {
  const SamplingPolicy pol = policy_of(o);
  const SourceParams src = make_source_params(o.N, o.q);
  const ChannelParams ch = make_channel_params(o.ps);
  const std::string path = resolve_out(o.out_path);

  if (quantity == "dist") {
    const AoiiDistribution d = aoii_distribution(pol, src, ch, o.truncation);
    return write_artifact(path, out, err, [&](std::ostream& os) {
      os << "level pi\n";
      for (std::size_t i = 0; i < d.pi.size(); ++i)
        os << i << ' ' << format_number(d.pi[i]) << '\n';
      os << "tail_mass " << format_number(d.tail_mass) << '\n';
      os << "tail_mean " << format_number(d.tail_mean) << '\n';
    });
  }

  double value = 0.0;
  if (quantity == "aoii") {
    value = average_aoii(pol, src, ch);
  } else if (quantity == "rate") {
    value = sampling_rate(pol, src, ch);
  } else {
    value = prob_correct_action(pol, ActuationPolicy{o.pc1, o.pc2}, src, ch);
  }

  if (effective_format(o, "plain") == "plain")
    return write_artifact(path, out, err,
                          [&](std::ostream& os) { os << format_number(value) << '\n'; });
  CsvRow row = base_row(o, pol);
  if (quantity == "pdelta0") {
    row.pc1 = o.pc1;
    row.pc2 = o.pc2;
  }
  row.analytic = value;
  row.source = "analytic";
  return write_artifact(path, out, err,
                        [&](std::ostream& os) { write_csv(os, {row}); });
}

int do_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const SimConfig cfg{make_source_params(o.N, o.q),
                      make_channel_params(o.ps),
                      policy_of(o),
                      ActuationPolicy{o.pc1, o.pc2},
                      o.slots,
                      o.burnin,
                      o.reps,
                      o.seed};
  const SimReport rep = run(cfg);
  const std::string path = resolve_out(o.out_path);

  if (effective_format(o, "plain") == "plain")
    return write_artifact(path, out, err, [&](std::ostream& os) {
      const std::pair<const char*, Estimate> metrics[] = {
          {"mean_aoii", rep.mean_aoii},
          {"p_delta0", rep.p_delta0_hat},
          {"sampling_rate", rep.sampling_rate_hat},
          {"actuation_rate", rep.actuation_rate_hat},
      };
      for (const auto& [name, est] : metrics) {
        os << name << ' ' << format_number(est.mean) << '\n';
        os << name << "_ci95 " << format_number(est.half_width) << '\n';
      }
    });
  CsvRow row = base_row(o, policy_of(o));
  row.pc1 = o.pc1;
  row.pc2 = o.pc2;
  row.sim_mean = rep.mean_aoii.mean;
  row.sim_ci95 = rep.mean_aoii.half_width;
  row.source = "sim";
  return write_artifact(path, out, err, [&](std::ostream& os) { write_csv(os, {row}); });
}

int do_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  const OracleReport rep = solve_chain(policy_of(o), ActuationPolicy{o.pc1, o.pc2},
                                       make_source_params(o.N, o.q), make_channel_params(o.ps),
                                       o.truncation);
  const std::string path = resolve_out(o.out_path);

  if (effective_format(o, "plain") == "plain")
    return write_artifact(path, out, err, [&](std::ostream& os) {
      os << "mean_aoii " << format_number(rep.mean_aoii) << '\n';
      os << "p_delta0 " << format_number(rep.p_delta0) << '\n';
      os << "sampling_rate " << format_number(rep.sampling_rate) << '\n';
      os << "actuation_rate " << format_number(rep.actuation_rate) << '\n';
      os << "decode_rate " << format_number(rep.decode_rate) << '\n';
      os << "tail_mass " << format_number(rep.tail_mass) << '\n';
    });
  CsvRow row = base_row(o, policy_of(o));
  row.pc1 = o.pc1;
  row.pc2 = o.pc2;
  row.oracle = rep.mean_aoii;
  row.source = "oracle";
  return write_artifact(path, out, err, [&](std::ostream& os) { write_csv(os, {row}); });
}

SamplingOptResult optimize_family(PolicyKind k, const SourceParams& src, const ChannelParams& ch,
                                  double eta) {
  switch (k) {
    case PolicyKind::rs: return optimize_rs(src, ch, eta);
    case PolicyKind::cars: return optimize_cars(src, ch, eta);
    case PolicyKind::sars: return optimize_sars(src, ch, eta);
    case PolicyKind::tars: return optimize_tars(src, ch, eta);
  }
  throw std::logic_error("unreachable");
}

int do_optimize_sampling(const Options& o, std::ostream& out, std::ostream& err) {
  const SamplingOptResult r = optimize_family(family_of_name(o.policy),
                                              make_source_params(o.N, o.q),
                                              make_channel_params(o.ps), o.eta);
  const std::string path = resolve_out(o.out_path);

  if (effective_format(o, "plain") == "plain")
    return write_artifact(path, out, err, [&](std::ostream& os) {
      for (const auto& [name, v] : named_params(r.policy))
        os << name << ' ' << format_number(v) << '\n';
      os << "objective " << format_number(r.objective) << '\n';
      os << "sampling_rate " << format_number(r.constraint_value) << '\n';
      if (!r.note.empty()) os << "note " << r.note << '\n';
    });
  CsvRow row = base_row(o, r.policy);
  row.eta = o.eta;
  row.analytic = r.objective;
  row.source = "analytic";
  return write_artifact(path, out, err, [&](std::ostream& os) { write_csv(os, {row}); });
}

int do_optimize_actuation(const Options& o, std::ostream& out, std::ostream& err) {
  const SamplingPolicy pol = policy_of(o);
  const SourceParams src = make_source_params(o.N, o.q);
  const ChannelParams ch = make_channel_params(o.ps);
  // TARS has no closed-form CoAU analysis; its optimum comes from the chain
  // oracle, whose event masses make the scan exact.
  const bool via_oracle = kind_of(pol) == PolicyKind::tars;
  const ActuationOptResult r = via_oracle
                                   ? grid_search_actuation(pol, src, ch, o.mu, 0.001, o.truncation)
                                   : optimize_actuation(pol, src, ch, o.mu);
  const std::string path = resolve_out(o.out_path);

  if (effective_format(o, "plain") == "plain")
    return write_artifact(path, out, err, [&](std::ostream& os) {
      os << "pc1 " << format_number(r.actuation.act_on_delivery) << '\n';
      os << "pc2 " << format_number(r.actuation.act_otherwise) << '\n';
      os << "objective " << format_number(r.objective) << '\n';
      os << "actuation_rate " << format_number(r.constraint_value) << '\n';
      if (!r.note.empty()) os << "note " << r.note << '\n';
    });
  CsvRow row = base_row(o, pol);
  row.mu = o.mu;
  row.pc1 = r.actuation.act_on_delivery;
  row.pc2 = r.actuation.act_otherwise;
  if (via_oracle) {
    row.oracle = r.objective;
    row.source = "oracle";
  } else {
    row.analytic = r.objective;
    row.source = "analytic";
  }
  return write_artifact(path, out, err, [&](std::ostream& os) { write_csv(os, {row}); });
}

void set_sweep_value(Options& o, const std::string& name, double v) {
  if (name == "q") o.q = v;
  else if (name == "ps") o.ps = v;
  else if (name == "pr") o.pr = v;
  else if (name == "pc") o.pc = v;
  else if (name == "qa1") o.qa1 = v;
  else if (name == "qa2") o.qa2 = v;
  else if (name == "pth") o.pth = v;
  else if (name == "pc1") o.pc1 = v;
  else if (name == "pc2") o.pc2 = v;
  else throw std::invalid_argument("unknown sweep parameter: " + name);
}

int do_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.sweep_param.empty()) throw std::invalid_argument("sweep needs --sweep <parameter>");
  if (o.sweep_points < 2) throw std::invalid_argument("sweep needs at least 2 points");
  std::vector<CsvRow> rows;
  std::vector<std::pair<double, double>> points;
  rows.reserve(o.sweep_points);
  for (int i = 0; i < o.sweep_points; ++i) {
    const double v =
        o.sweep_from + (o.sweep_to - o.sweep_from) * i / (o.sweep_points - 1);
    Options oi = o;
    set_sweep_value(oi, o.sweep_param, v);
    const SamplingPolicy pol = policy_of(oi);
    const SourceParams src = make_source_params(oi.N, oi.q);
    const ChannelParams ch = make_channel_params(oi.ps);
    double value = 0.0;
    if (o.quantity == "aoii") {
      value = average_aoii(pol, src, ch);
    } else if (o.quantity == "rate") {
      value = sampling_rate(pol, src, ch);
    } else {
      value = prob_correct_action(pol, ActuationPolicy{oi.pc1, oi.pc2}, src, ch);
    }
    CsvRow row = base_row(oi, pol);
    if (o.quantity == "pdelta0") {
      row.pc1 = oi.pc1;
      row.pc2 = oi.pc2;
    }
    row.analytic = value;
    row.source = "analytic";
    rows.push_back(row);
    points.emplace_back(v, value);
  }
  const std::string path = resolve_out(o.out_path);
  if (effective_format(o, "csv") == "plain")
    return write_artifact(path, out, err, [&](std::ostream& os) {
      for (const auto& [x, y] : points)
        os << format_number(x) << ' ' << format_number(y) << '\n';
    });
  return write_artifact(path, out, err, [&](std::ostream& os) { write_csv(os, rows); });
}

int do_reproduce(const std::string& id, const Options& o, std::ostream& out, std::ostream& err) {
  std::string dir = o.out_path;
  if (dir.empty()) {
    const char* env = std::getenv("AOII_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create output directory: " << dir << '\n';
    return 2;
  }

  auto write_curve = [&](const std::string& name, const std::vector<CsvRow>& rows) {
    const std::string path = dir + "/" + name;
    const int rc = write_artifact(path, out, err, [&](std::ostream& os) { write_csv(os, rows); });
    if (rc == 0) out << path << '\n';
    return rc;
  };

  constexpr int kPoints = 50;
  const PolicyKind families[] = {PolicyKind::rs, PolicyKind::cars, PolicyKind::sars,
                                 PolicyKind::tars};

  if (id[0] == '2' || id[0] == '3') {
    // Minimum average AoII against the sampling budget at N = 3.
    const double q = id[0] == '2' ? 0.1 : 0.8;
    const double ps = id[1] == 'a' ? 0.1 : 0.9;
    const SourceParams src = make_source_params(3, q);
    const ChannelParams ch = make_channel_params(ps);
    for (PolicyKind k : families) {
      std::vector<CsvRow> rows;
      rows.reserve(kPoints);
      for (int i = 0; i < kPoints; ++i) {
        const double eta = 0.02 + (1.0 - 0.02) * i / (kPoints - 1);
        const SamplingOptResult r = optimize_family(k, src, ch, eta);
        CsvRow row;
        row.policy = policy_name(k);
        row.states = 3;
        row.q = q;
        row.ps = ps;
        fill_params(r.policy, row);
        row.eta = eta;
        row.analytic = r.objective;
        row.source = "analytic";
        rows.push_back(row);
      }
      if (const int rc = write_curve("fig" + id + "_" + policy_name(k) + ".csv", rows)) return rc;
    }
    return 0;
  }

  // Optimal vs all-ones actuation P[Delta = 0] against q at N = 3, mu = 1; the
  // sampling parameters are re-optimized at every point.
  const PolicyKind family = id[0] == '4'   ? PolicyKind::rs
                            : id[0] == '5' ? PolicyKind::sars
                                           : PolicyKind::cars;
  const double eta = id[1] == 'a' ? 0.1 : 0.7;
  for (const double ps : {0.1, 0.9}) {
    const ChannelParams ch = make_channel_params(ps);
    for (const bool optimal : {true, false}) {
      std::vector<CsvRow> rows;
      rows.reserve(kPoints);
      for (int i = 0; i < kPoints; ++i) {
        const double q = 0.05 + (0.95 - 0.05) * i / (kPoints - 1);
        const SourceParams src = make_source_params(3, q);
        const SamplingOptResult s = optimize_family(family, src, ch, eta);
        CsvRow row;
        row.policy = policy_name(family);
        row.states = 3;
        row.q = q;
        row.ps = ps;
        fill_params(s.policy, row);
        row.eta = eta;
        row.mu = 1.0;
        if (optimal) {
          const ActuationOptResult a = optimize_actuation(s.policy, src, ch, 1.0);
          row.pc1 = a.actuation.act_on_delivery;
          row.pc2 = a.actuation.act_otherwise;
          row.analytic = a.objective;
        } else {
          row.pc1 = 1.0;
          row.pc2 = 1.0;
          row.analytic = prob_correct_action(s.policy, ActuationPolicy{1.0, 1.0}, src, ch);
        }
        row.source = "analytic";
        rows.push_back(row);
      }
      const std::string name = "fig" + id + "_" + policy_name(family) + "_ps" +
                               format_number(ps) + (optimal ? "_opt" : "_nonopt") + ".csv";
      if (const int rc = write_curve(name, rows)) return rc;
    }
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"AoII/CoAU toolkit: closed forms, Monte Carlo, chain oracle, optimizers"};
  app.set_config("--config", "", "read defaults from a key = value file");

  app.add_option("--N", o.N, "number of source states");
  app.add_option("--q", o.q, "self-transition probability");
  app.add_option("--ps", o.ps, "channel decode probability");
  app.add_option("--policy", o.policy, "sampling policy")
      ->check(CLI::IsMember({"rs", "cars", "sars", "tars"}));
  app.add_option("--pr", o.pr, "rs sampling probability");
  app.add_option("--pc", o.pc, "cars sampling probability");
  app.add_option("--qa1", o.qa1, "sars fresh-error sampling probability");
  app.add_option("--qa2", o.qa2, "sars persisting-error sampling probability");
  app.add_option("--n", o.n, "tars threshold");
  app.add_option("--pth", o.pth, "tars pre-threshold sampling probability");
  app.add_option("--eta", o.eta, "sampling-rate budget");
  app.add_option("--mu", o.mu, "actuation-rate budget");
  app.add_option("--pc1", o.pc1, "actuation probability on delivery");
  app.add_option("--pc2", o.pc2, "actuation probability otherwise");
  app.add_option("--slots", o.slots, "retained slots per replication");
  app.add_option("--burnin", o.burnin, "discarded slots per replication");
  app.add_option("--reps", o.reps, "replications");
  app.add_option("--seed", o.seed, "base seed");
  app.add_option("--truncation", o.truncation, "AoII truncation level for oracle/dist");
  app.add_option("--out", o.out_path,
                 "output file (reproduce: directory); relative paths land in $AOII_OUT_DIR");
  app.add_option("--format", o.format, "csv or plain (dist is always plain)")
      ->check(CLI::IsMember({"csv", "plain"}));
  app.add_option("--sweep", o.sweep_param, "parameter to sweep");
  app.add_option("--from", o.sweep_from, "sweep start");
  app.add_option("--to", o.sweep_to, "sweep stop");
  app.add_option("--points", o.sweep_points, "sweep point count (>= 2)");
  app.add_option("--quantity", o.quantity, "quantity for sweep")
      ->check(CLI::IsMember({"aoii", "rate", "pdelta0"}));

  auto* analytic = app.add_subcommand("analytic", "evaluate a closed form");
  analytic->fallthrough();
  auto* an_aoii = analytic->add_subcommand("aoii", "average AoII");
  auto* an_rate = analytic->add_subcommand("rate", "long-run sampling rate");
  auto* an_pd0 = analytic->add_subcommand("pdelta0", "probability of a correct actuation");
  auto* an_dist = analytic->add_subcommand("dist", "AoII level distribution");
  for (auto* s : {an_aoii, an_rate, an_pd0, an_dist}) s->fallthrough();
  analytic->require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trajectory estimates");
  simulate->fallthrough();

  auto* optimize = app.add_subcommand("optimize", "constrained optimizers");
  optimize->fallthrough();
  auto* opt_sampling =
      optimize->add_subcommand("sampling", "minimize average AoII under a sampling budget");
  auto* opt_act =
      optimize->add_subcommand("actuation", "maximize P[Delta=0] under an actuation budget");
  for (auto* s : {opt_sampling, opt_act}) s->fallthrough();
  optimize->require_subcommand(1);

  auto* oracle = app.add_subcommand("oracle", "independent truncated joint-chain solve");
  oracle->fallthrough();

  auto* sweep = app.add_subcommand("sweep", "one-parameter sweep of an analytic quantity");
  sweep->fallthrough();

  std::string fig_id;
  auto* reproduce = app.add_subcommand("reproduce", "write figure-data CSVs, one per curve");
  reproduce->fallthrough();
  reproduce->add_option("id", fig_id, "figure panel id")
      ->required()
      ->check(CLI::IsMember({"2a", "2b", "3a", "3b", "4a", "4b", "5a", "5b", "6a", "6b"}));

  app.require_subcommand(1);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*an_aoii) return do_analytic("aoii", o, out, err);
    if (*an_rate) return do_analytic("rate", o, out, err);
    if (*an_pd0) return do_analytic("pdelta0", o, out, err);
    if (*an_dist) return do_analytic("dist", o, out, err);
    if (*simulate) return do_simulate(o, out, err);
    if (*opt_sampling) return do_optimize_sampling(o, out, err);
    if (*opt_act) return do_optimize_actuation(o, out, err);
    if (*oracle) return do_oracle(o, out, err);
    if (*sweep) return do_sweep(o, out, err);
    if (*reproduce) return do_reproduce(fig_id, o, out, err);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace aoii::cli
