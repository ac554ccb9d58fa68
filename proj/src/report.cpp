#include "aoii/report.hpp"

#include <cstdio>

namespace aoii {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string format_row(const CsvRow& row) {
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  std::string line = row.policy;
  line += ',';
  line += std::to_string(row.states);
  line += ',';
  line += format_number(row.q);
  line += ',';
  line += format_number(row.ps);
  for (const auto* f : {&row.eta, &row.mu, &row.param1, &row.param2, &row.pc1, &row.pc2,
                        &row.analytic, &row.sim_mean, &row.sim_ci95, &row.oracle}) {
    line += ',';
    line += opt(*f);
  }
  line += ',';
  line += row.source;
  return line;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << csv_header << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

}  // namespace aoii
