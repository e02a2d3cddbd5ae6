#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avd/diagnostics.hpp"
#include "avd/dynamics.hpp"
#include "avd/ifb.hpp"
#include "avd/problems.hpp"

namespace avd {

struct Window {
    double lo = 0.0;
    double hi = 0.0;
};

enum class FitMode { Auto, Direct, Envelope };

struct PowerLawFit {
    double exponent = 0.0;
    double halfwidth = 0.0;
    std::size_t n_samples = 0;
    bool envelope = false;
};

// Least-squares slope of log(value) against log(t) over the window. Envelope
// mode fits the strict positive local maxima instead of the raw samples
// (Auto switches to it when the window holds >= 20 such maxima). Rejects
// nonpositive values (direct mode) and fits with fewer than 20 samples.
PowerLawFit fit_power_law(const DiagnosticSeries& series, Window window,
                          FitMode mode = FitMode::Auto);

struct RateReport {
    std::string label;
    double fitted_exponent = 0.0;
    double fitted_halfwidth = 0.0;
    double theoretical_exponent = 0.0;  // decay exponent of the guarantee
    double bound_constant = 0.0;
    bool bound_satisfied = false;
    Window window;
    std::size_t fit_samples = 0;
};

// Continuous values: for alpha <= 3 checks sup_t t^{2a/3}(Phi - min) <= C
// (C from rate_bound_constant, relative slack `slack`); for alpha > 3 uses
// the p=1 energy at t0 as the constant. Also fits the decay exponent of the
// gap series (envelope for oscillating problems).
RateReport verify_value_rate(const Trajectory& traj, const ProblemSpec& spec, double alpha,
                             std::optional<Window> fit_window = std::nullopt,
                             double slack = 0.01);

// Discrete values: checks sup over k in [K/10, K] of k^p (Theta(x_k) - min)
// against finiteness, for a requested p < 2 alpha / 3.
RateReport verify_value_rate(const IterateLog& log, const ProblemSpec& spec, double p);

// Speed: boundedness of t^q |x'| on the tail window [t_end/10, t_end] with
// q = 1 for alpha >= 3 and q = (alpha-1)/2 - 0.05 for 1 <= alpha < 3; for
// alpha > 3 additionally requires decade-over-decade decrease (little-o
// proxy). For alpha < 1 the report carries no assertion.
RateReport verify_speed_rate(const Trajectory& traj, double alpha);

// Decrements of |t x'| across full loops (leave one threshold, traverse to
// the other and back, return). Empty when no full loop is present.
std::vector<double> loop_decrement(const std::vector<CrossingEvent>& events, double alpha,
                                   double a, double b);

// Discrete analog: decrement of |k (x_k - x_{k-1})| across each maximal run
// of iterations with y_k in [a,b] that traverses the interval. Measured
// between the entering index and the first index past the run.
std::vector<double> discrete_pass_decrements(const IterateLog& log, double a, double b);

struct StrongMinReport {
    RateReport values;     // t^{2a/3} (Phi - min) bounded
    RateReport distance;   // t^{2a/3} |x - x*|^2 bounded by (2/mu) * C
    RateReport speed;      // t^{a/3} |x'| bounded
    double max_growth_residual = 0.0;  // |x-x*|^2 - (2/mu)(Phi - min), positive part
};

StrongMinReport strong_min_rates(const Trajectory& traj, const ProblemSpec& spec);

// Perturbed runs: asserts tail-boundedness of t^{2p}(Phi - min) (continuous)
// or k^p (Theta - min) (discrete); rejects non-integrable forcings.
RateReport verify_perturbed_rate(const Trajectory& traj, const ProblemSpec& spec,
                                 const Forcing& forcing, double p);
RateReport verify_perturbed_rate(const IterateLog& log, const ProblemSpec& spec,
                                 const PerturbationSchedule& pert, double p);

// Numeric realization of the quadratic Gronwall bound: if
// w(t)^2/2 <= c^2/2 + int_{t0}^t m w  (verified by trapezoid quadrature)
// then |w(t)| <= c + int_{t0}^t m at every sample.
struct GronwallCheck {
    bool hypothesis_holds = false;
    bool conclusion_holds = false;
    double worst_conclusion_margin = 0.0;  // max over samples of |w| - (c + int m)
};

GronwallCheck gronwall_sqrt_bound_check(const std::vector<double>& times,
                                        const std::vector<double>& m,
                                        const std::vector<double>& w, double c);

}  // namespace avd
