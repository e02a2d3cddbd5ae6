#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "avd/diagnostics.hpp"
#include "avd/dynamics.hpp"
#include "avd/problems.hpp"
#include "doctest.h"

using namespace avd;

namespace {
Trajectory quad_run(double alpha, double t_end = 100.0, double tol = 1e-9, int samples = 2000,
                    double x0 = 1.0) {
    IntegrateOptions o;
    o.num_samples = samples;
    return integrate(problem_by_id("quadratic"), alpha, {x0}, {0.0}, 1.0, t_end, tol,
                     Forcing::zero(), o);
}
}  // namespace

TEST_CASE("lyapunov parameter families") {
    LyapunovParams a = LyapunovParams::family_a(2.0, 2.0 / 3.0);
    CHECK(a.lambda(1.0) == doctest::Approx(4.0 / 3.0));
    CHECK(a.xi(1.0) == doctest::Approx(2.0 * (2.0 - 8.0 / 3.0 + 1.0) * (2.0 / 3.0)));
    CHECK_THROWS_AS(LyapunovParams::family_a(1.0, 0.8), std::invalid_argument);  // alpha < 4p-1
    LyapunovParams b = LyapunovParams::family_b(3.0, 0.9);
    CHECK(b.lambda(2.0) == doctest::Approx(2.1 * std::pow(2.0, -0.1)));
    CHECK_THROWS_AS(LyapunovParams::family_b(3.0, 1.0), std::invalid_argument);  // p < alpha/3 strict
    // the critical family-A parameters collapse to lambda=2, xi=0
    LyapunovParams crit = LyapunovParams::family_a_default(3.0);
    CHECK(crit.p == 1.0);
    CHECK(crit.lambda(17.0) == 2.0);
    CHECK(crit.xi(17.0) == 0.0);
}

TEST_CASE("energy_E on a stationary run is identically zero") {
    const ProblemSpec& quad = problem_by_id("quadratic");
    IntegrateOptions o;
    o.num_samples = 100;
    Trajectory t = integrate(quad, 2.0, {0.0}, {0.0}, 1.0, 50.0, 1e-9, Forcing::zero(), o);
    DiagnosticSeries e = energy_E(t, quad, {0.0}, LyapunovParams::family_a_default(2.0));
    for (double v : e.values) CHECK(std::abs(v) <= 1e-20);
    CHECK(e.monotone_violations.empty());
}

TEST_CASE("energy_E monotone for the subcritical family") {
    const ProblemSpec& quad = problem_by_id("quadratic");
    Trajectory t = quad_run(2.0, 100.0, 1e-10, 4000);
    DiagnosticSeries e = energy_E(t, quad, {0.0}, LyapunovParams::family_a(2.0, 2.0 / 3.0));
    CHECK(e.monotone_violations.empty());
    for (double v : e.values) CHECK(v >= 0.0);
    // the initial energy dominates the scaled gap at every sample
    double p = 2.0 / 3.0;
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        double scaled = std::pow(t.times[i], 2.0 * p) * quad.smooth_value(t.positions[i]);
        CHECK(scaled <= e.values.front() * (1.0 + 1e-9));
    }
}

TEST_CASE("energy_E at alpha=3 equals the critical closed form") {
    const ProblemSpec& quad = problem_by_id("quadratic");
    Trajectory t = quad_run(3.0);
    DiagnosticSeries e = energy_E(t, quad, {0.0}, LyapunovParams::family_a_default(3.0));
    for (std::size_t i = 0; i < t.times.size(); i += 97) {
        double tt = t.times[i], x = t.positions[i][0], v = t.velocities[i][0];
        double manual = tt * tt * 0.5 * x * x + 0.5 * std::pow(2.0 * x + tt * v, 2.0);
        CHECK(e.values[i] == doctest::Approx(manual).epsilon(1e-12));
    }
    CHECK(e.monotone_violations.empty());
    CHECK_THROWS_AS(energy_E(t, quad, {0.5}, LyapunovParams::family_a_default(3.0)),
                    std::invalid_argument);  // z not in argmin
}

TEST_CASE("global energy W and its derivative identity") {
    const ProblemSpec& quad = problem_by_id("quadratic");
    Trajectory t = quad_run(3.0, 100.0, 1e-9, 20000);
    DiagnosticSeries w = global_energy_W(t, quad);
    CHECK(w.monotone_violations.empty());
    for (std::size_t i = 0; i < t.times.size(); i += 501) {
        double manual = 0.5 * (t.positions[i][0] * t.positions[i][0] +
                               t.velocities[i][0] * t.velocities[i][0]);
        CHECK(w.values[i] == doctest::Approx(manual).epsilon(1e-13));
    }
    for (std::size_t i = 0; i + 1 < w.values.size(); ++i)
        CHECK(w.values[i + 1] - w.values[i] <= 10.0 * t.integrator_tolerance);
    CHECK(w_derivative_residual(t, quad) <= 1e-6);

    ProblemSpec nomin = quad;
    nomin.min_value.reset();
    CHECK_THROWS_AS(global_energy_W(t, nomin), std::invalid_argument);
}

TEST_CASE("scaled energy Gamma tail behavior") {
    const ProblemSpec& quad = problem_by_id("quadratic");
    {
        Trajectory t = quad_run(4.0, 1000.0, 1e-9, 4000);
        DiagnosticSeries g = scaled_energy_Gamma(t, quad, 1.0);
        CHECK(g.values.back() <= g.sup_on(100.0, 1000.0));
        CHECK(g.sup_on(900.0, 1000.0) <= 0.5 * g.sup_on(90.0, 110.0));
    }
    {
        Trajectory t = quad_run(3.0, 1000.0, 1e-9, 4000);
        DiagnosticSeries g = scaled_energy_Gamma(t, quad, 0.9);
        CHECK(std::isfinite(g.sup_on(100.0, 1000.0)));
        CHECK(g.sup_on(100.0, 1000.0) <= g.sup_on(1.0, 10.0));
    }
}

TEST_CASE("integral estimates") {
    const ProblemSpec& quad = problem_by_id("quadratic");
    IntegrateOptions o;
    o.num_samples = 100;
    Trajectory stat = integrate(quad, 3.0, {0.0}, {0.0}, 1.0, 100.0, 1e-9, Forcing::zero(), o);
    CHECK(integral_estimate(stat, quad, 0.9, IntegralKind::Values).quadrature == 0.0);
    CHECK(integral_estimate(stat, quad, 0.9, IntegralKind::Speed).quadrature == 0.0);

    Trajectory t = quad_run(3.0, 1000.0, 1e-9, 8000);
    IntegralEstimate values = integral_estimate(t, quad, 0.9, IntegralKind::Values);
    REQUIRE(values.bound.has_value());
    CHECK(*values.below_bound);
    CHECK(values.quadrature > 0.0);
    CHECK(values.quadrature <= *values.bound);
    IntegralEstimate speed = integral_estimate(t, quad, 0.9, IntegralKind::Speed);
    CHECK(std::isfinite(speed.quadrature));
    // family-B constraint p < alpha/3 is strict
    CHECK_THROWS_AS(integral_estimate(t, quad, 1.0, IntegralKind::Values),
                    std::invalid_argument);
}

TEST_CASE("rate bound constant") {
    const ProblemSpec& fb = problem_by_id("flat-bottom");
    CHECK(rate_bound_constant(fb, {1.0}, {0.0}, 1.0, 3.0) == 0.0);  // starts in argmin
    const ProblemSpec& quad = problem_by_id("quadratic");
    CHECK(rate_bound_constant(quad, {1.0}, {0.0}, 1.0, 3.0) == doctest::Approx(4.5));
    CHECK(rate_bound_constant(fb, {3.0}, {0.0}, 1.0, 1.5) == doctest::Approx(7.0));
    CHECK_THROWS_AS(rate_bound_constant(quad, {1.0}, {0.0}, 1.0, 3.5), std::invalid_argument);
}

TEST_CASE("perturbed energy with the trailing integral is monotone") {
    const ProblemSpec& quad = problem_by_id("quadratic");
    Forcing g = Forcing::power_decay(0.1, 2.5);
    IntegrateOptions o;
    o.num_samples = 20000;
    Trajectory t = integrate(quad, 3.0, {1.0}, {0.0}, 1.0, 1000.0, 1e-9, g, o);
    DiagnosticSeries e = perturbed_energy_E(t, quad, {0.0}, g);
    CHECK(e.monotone_violations.empty());
}
