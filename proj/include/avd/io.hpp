#pragma once

#include <string>

#include "avd/diagnostics.hpp"
#include "avd/dynamics.hpp"
#include "avd/ifb.hpp"
#include "avd/rates.hpp"

namespace avd {

// CSV numeric format: 17 significant digits, '.' decimal separator,
// newline-terminated rows.
std::string format_double(double v);

// Trajectory CSV: metadata header row, then `t,x_1..x_n,v_1..v_n`.
std::string trajectory_to_csv(const Trajectory& traj);
// Parses the sample grid back (step nodes are not serialized).
Trajectory trajectory_from_csv(const std::string& csv);

// Iterate CSV: metadata header row, then `k,x_1..x_n,theta,dx_norm`.
std::string iterates_to_csv(const IterateLog& log);
IterateLog iterates_from_csv(const std::string& csv);

// DiagnosticSeries CSV: `t,value`.
std::string series_to_csv(const DiagnosticSeries& s);

// Discrete energies CSV: `k,W,h,E,E_tilde[,E_crit]`.
std::string energies_to_csv(const DiscreteEnergies& de, const DiagnosticSeries* crit = nullptr);

std::string rate_report_to_json(const RateReport& r);
std::string violations_to_json(const std::string& quantity,
                               const std::vector<DiagnosticSeries::Violation>& v);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace avd
