#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avd/problems.hpp"
#include "avd/vec.hpp"

namespace avd {

// Right-hand side forcing g(t) of the damped system.
struct Forcing {
    enum class Kind { Zero, PowerDecay, Tabulated };
    Kind kind = Kind::Zero;
    // PowerDecay: g(t) = c * t^{-q} * direction (direction defaults to e_1).
    double c = 0.0;
    double q = 0.0;
    Vec direction;
    // Tabulated: piecewise-linear in t; zero outside the table.
    std::vector<double> table_times;
    std::vector<Vec> table_values;

    static Forcing zero() { return {}; }
    static Forcing power_decay(double c, double q, Vec direction = {});
    static Forcing tabulated(std::vector<double> times, std::vector<Vec> values);

    bool is_zero() const { return kind == Kind::Zero; }
    void eval(double t, int dim, Vec& out) const;
    // Symbolic check of int_{t0}^inf t^p ||g(t)|| dt < inf, decided on the
    // kind only: Zero always, PowerDecay iff q > p+1, Tabulated never.
    bool integrable_against(double p) const;
};

// Time-sampled solution of  x'' + (alpha/t) x' + grad Phi(x) = g(t)  on a
// log-uniform grid, plus the accepted-step nodes needed for dense evaluation
// and event location.
struct Trajectory {
    std::string problem_name;
    double alpha = 0.0;
    double t0 = 1.0;
    double integrator_tolerance = 0.0;
    std::vector<double> times;      // log-uniform, times[0] = t0
    std::vector<Vec> positions;
    std::vector<Vec> velocities;

    // Accepted-step nodes: position, velocity, acceleration at step ends.
    std::vector<double> node_times;
    std::vector<Vec> node_x, node_v, node_a;

    int dimension() const { return positions.empty() ? 0 : static_cast<int>(positions[0].size()); }
    double t_end() const { return times.back(); }
    // Quintic Hermite evaluation between step nodes.
    void eval_dense(double t, Vec& x, Vec& v) const;
    double position1d(double t) const;
    double velocity1d(double t) const;
    // Max residual |x'' + (alpha/t)x' + grad Phi(x) - g| of the dense
    // interpolant at step midpoints.
    double max_ode_residual(const ProblemSpec& spec, const Forcing& forcing = {}) const;
};

struct IntegrateOptions {
    int num_samples = 2000;
    double blowup_cap = 1e8;   // abort when |x|_inf exceeds this
    bool keep_nodes = true;    // retain accepted-step nodes for dense/event use
};

// Adaptive embedded Runge-Kutta 5(4) integration of (x, v),
// v' = -(alpha/t) v - grad Phi(x) + g(t), with local error <= tol per step.
// The accepted step size is additionally capped at ~sqrt(tol) so that halving
// tol sharpens the trajectory by a factor >= 4 (order check), with a floor
// keeping step counts bounded at tight tolerances.
Trajectory integrate(const ProblemSpec& spec, double alpha, const Vec& x0, const Vec& v0,
                     double t0, double t_end, double tol, const Forcing& forcing = Forcing::zero(),
                     const IntegrateOptions& opts = {});

struct CrossingEvent {
    double time = 0.0;
    char boundary = 'a';             // which threshold was crossed
    enum class Direction { Enter, Leave } direction = Direction::Enter;
    double speed_measure = 0.0;      // |t * x'(t)| at the event
};

// Ordered crossing events of a 1-D trajectory against the thresholds a < b,
// located by bisection on the dense interpolant to time accuracy 1e-8.
std::vector<CrossingEvent> crossing_events(const Trajectory& traj, double a, double b);

}  // namespace avd
