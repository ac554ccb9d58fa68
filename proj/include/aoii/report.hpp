#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace aoii {

// Fixed schema shared by every CSV artifact; downstream parsers key on it.
inline constexpr const char* csv_header =
    "policy,N,q,ps,eta,mu,param1,param2,pc1,pc2,analytic,sim_mean,sim_ci95,oracle,source";

struct CsvRow {
  std::string policy;
  int states = 0;
  double q = 0.0;
  double ps = 0.0;
  std::optional<double> eta;
  std::optional<double> mu;
  std::optional<double> param1;
  std::optional<double> param2;
  std::optional<double> pc1;
  std::optional<double> pc2;
  std::optional<double> analytic;
  std::optional<double> sim_mean;
  std::optional<double> sim_ci95;
  std::optional<double> oracle;
  std::string source;
};

// Locale-independent 12-significant-digit rendering, identical across runs.
std::string format_number(double v);

std::string format_row(const CsvRow& row);

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);

}  // namespace aoii
