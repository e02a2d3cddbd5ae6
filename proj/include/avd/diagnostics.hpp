#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avd/dynamics.hpp"
#include "avd/problems.hpp"

namespace avd {

// Parameters of the energy
//   E(t) = t^{2p} [Phi(x)-min] + 1/2 |lambda(t)(x-z) + t^p x'|^2
//          + xi(t)/2 |x-z|^2,
// with the two closed-form (lambda, xi) families:
//   A: lambda = 2p t^{p-1},        xi = 2(alpha-4p+1) p t^{2(p-1)},  alpha >= 4p-1
//   B: lambda = (alpha-p) t^{p-1}, xi = (1-p)(alpha-p) t^{2(p-1)},   p <= 1, p < alpha/3
struct LyapunovParams {
    enum class Family { A, B };
    Family family = Family::A;
    double p = 1.0;
    double alpha = 3.0;

    static LyapunovParams family_a(double alpha, double p);
    static LyapunovParams family_b(double alpha, double p);
    // Family A with the rate-optimal exponent p = min(1, alpha/3).
    static LyapunovParams family_a_default(double alpha);

    double lambda(double t) const;
    double xi(double t) const;
};

struct DiagnosticSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;
    struct Violation {
        std::size_t index;
        double magnitude;
    };
    std::vector<Violation> monotone_violations;

    double front() const { return values.front(); }
    double back() const { return values.back(); }
    // sup over samples with t in [lo, hi]
    double sup_on(double lo, double hi) const;
};

// The energy above along a trajectory, anchored at z in argmin. Monotone
// violations list samples where E increases by more than 100*tol*(1+|E|).
DiagnosticSeries energy_E(const Trajectory& traj, const ProblemSpec& spec, const Vec& z,
                          const LyapunovParams& params);

// W(t) = Phi(x)-min + 1/2 |x'|^2, nonincreasing along unforced trajectories.
DiagnosticSeries global_energy_W(const Trajectory& traj, const ProblemSpec& spec);

// Gamma(t) = t^{2p} W(t).
DiagnosticSeries scaled_energy_Gamma(const Trajectory& traj, const ProblemSpec& spec, double p);

// Max residual of  dW/dt = -(alpha/t)|x'|^2  with centered differences on the
// sample grid (one-sided at the ends).
double w_derivative_residual(const Trajectory& traj, const ProblemSpec& spec);

enum class IntegralKind { Values, Speed };

struct IntegralEstimate {
    double quadrature = 0.0;                // trapezoid over the sampled horizon
    std::optional<double> bound;            // family-B bound (Values kind only)
    std::optional<bool> below_bound;
};

// Values: int t^{2p-1} (Phi(x)-min) dt with family-B bound E_B(t0)/(alpha-3p);
// Speed:  int t^p |x'|^2 dt.
IntegralEstimate integral_estimate(const Trajectory& traj, const ProblemSpec& spec, double p,
                                   IntegralKind kind);

// Constant C with sup_t t^{2 alpha/3} (Phi(x(t)) - min) <= C for alpha <= 3:
//   C = t0^{2a/3} (Phi(x0)-min + |v0|^2) + a(a+1)/3 * dist^2(x0, argmin).
double rate_bound_constant(const ProblemSpec& spec, const Vec& x0, const Vec& v0, double t0,
                           double alpha);

// Perturbed-run energy: the unforced E plus the trailing quadrature term
// int_t^T <lambda (x-z) + s^p x', s^p g(s)> ds evaluated on the sample grid.
DiagnosticSeries perturbed_energy_E(const Trajectory& traj, const ProblemSpec& spec, const Vec& z,
                                    const Forcing& forcing);

}  // namespace avd
