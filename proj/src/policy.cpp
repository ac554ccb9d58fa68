#include "aoii/policy.hpp"

namespace aoii {

namespace {

void check_prob(double v, const char* what, std::vector<std::string>& out) {
  if (!(v >= 0.0 && v <= 1.0))  // also catches NaN
    out.push_back(std::string(what) + " must lie in [0, 1], got " + std::to_string(v));
}

}  // namespace

std::vector<std::string> validate(const SamplingPolicy& policy) {
  std::vector<std::string> errs;
  switch (policy.index()) {
    case 0:
      check_prob(std::get<RsPolicy>(policy).sample_prob, "rs sample_prob", errs);
      break;
    case 1:
      check_prob(std::get<CarsPolicy>(policy).sample_prob, "cars sample_prob", errs);
      break;
    case 2: {
      const auto& s = std::get<SarsPolicy>(policy);
      check_prob(s.new_error_prob, "sars new_error_prob", errs);
      check_prob(s.old_error_prob, "sars old_error_prob", errs);
      if (errs.empty() && s.old_error_prob < s.new_error_prob)
        errs.push_back("sars requires old_error_prob >= new_error_prob (got " +
                       std::to_string(s.old_error_prob) + " < " +
                       std::to_string(s.new_error_prob) + ")");
      break;
    }
    default: {
      const auto& t = std::get<TarsPolicy>(policy);
      if (t.threshold < 1)
        errs.push_back("tars threshold must be >= 1, got " + std::to_string(t.threshold));
      check_prob(t.threshold_prob, "tars threshold_prob", errs);
      break;
    }
  }
  return errs;
}

std::vector<std::string> validate(const ActuationPolicy& policy) {
  std::vector<std::string> errs;
  check_prob(policy.act_on_delivery, "act_on_delivery", errs);
  check_prob(policy.act_otherwise, "act_otherwise", errs);
  return errs;
}

}  // namespace aoii
