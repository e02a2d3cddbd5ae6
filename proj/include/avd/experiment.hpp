#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avd/diagnostics.hpp"
#include "avd/dynamics.hpp"
#include "avd/ifb.hpp"
#include "avd/rates.hpp"

namespace avd {

enum class RunMode { Continuous, Discrete, Both };

struct ExperimentConfig {
    std::string problem_id = "quadratic";
    RunMode mode = RunMode::Continuous;
    std::vector<double> alpha_grid;
    double t_end = 1e3;
    std::size_t iterations = 100000;
    double tol = 1e-9;
    std::optional<double> step;        // default 1/L
    std::string forcing = "none";      // none | power:<c>,<q>
    std::string output_dir = "out";
    unsigned seed = 0;
    int workers = 1;
    int samples = 2000;
    std::optional<Vec> start;          // default per problem

    void validate() const;             // throws std::invalid_argument
};

Forcing parse_forcing(const std::string& text);
PerturbationSchedule parse_perturbation(const std::string& text);

struct RegimeRow {
    double alpha = 0.0;
    double value_rate_theory = 0.0;    // min(2 alpha/3, 2)
    double value_exponent_fitted = 0.0;
    bool value_bound_ok = false;
    bool little_o = false;             // alpha > 3
    double integral_values = 0.0;      // I_p quadrature
    bool integral_below_bound = false;
    double speed_rate_theory = 0.0;
    double speed_sup_tail = 0.0;
    double integral_speed = 0.0;       // J_p quadrature
};

// One row per alpha with the theoretical exponent min(2 alpha/3, 2), the
// measured exponent, and the bound pass/fail flags.
std::string report_regime_table(const std::vector<RegimeRow>& rows);

struct ExperimentResult {
    std::vector<std::string> files_written;
    std::size_t violation_count = 0;
    std::vector<RegimeRow> rows;
};

// Runs the sweep described by the config and writes all artifacts under
// config.output_dir. Entries run concurrently up to config.workers; files are
// written by the calling thread in a fixed order.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace avd
