#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "avd/vec.hpp"

namespace avd {

constexpr double kPlusInf = std::numeric_limits<double>::infinity();

// Convex differentiable part of the objective. The Lipschitz constant is
// declared valid on the box |x|_inf <= region_radius; stepsize checks in the
// splitting algorithm validate s <= 1/L against it.
struct SmoothObjective {
    int dimension = 1;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    double lipschitz_bound = 1.0;
    double region_radius = 1e6;
};

// Proper convex lsc part, accessed through its proximal map.
// value may return +inf outside the domain.
struct NonsmoothObjective {
    int dimension = 1;
    std::function<double(const Vec&)> value;
    std::function<Vec(double, const Vec&)> prox;  // (step gamma > 0, point)
};

// Descriptor of the minimizer set: a single point, an interval [a,b] in 1-D,
// or an affine set (anchor + orthonormal basis of the directions).
struct ArgminSet {
    enum class Kind { Point, Interval, Affine };
    Kind kind = Kind::Point;
    Vec point;                       // Point: the minimizer
    double a = 0.0, b = 0.0;         // Interval (1-D)
    Vec anchor;                      // Affine
    std::vector<Vec> basis;          // Affine: orthonormal directions

    static ArgminSet single(Vec p);
    static ArgminSet interval(double a, double b);
    static ArgminSet affine(Vec anchor, std::vector<Vec> basis);

    Vec project(const Vec& x) const;
    double distance(const Vec& x) const;
    bool contains(const Vec& x, double tol = 1e-9) const;
    // A canonical representative used when callers need one fixed z in S.
    Vec representative() const;
};

struct ProblemSpec {
    std::string name;
    SmoothObjective smooth;
    std::optional<NonsmoothObjective> nonsmooth;
    std::optional<double> min_value;
    std::optional<ArgminSet> argmin_set;
    std::optional<double> strong_min_modulus;

    int dimension() const { return smooth.dimension; }
    bool has_nonsmooth() const { return nonsmooth.has_value(); }
    double smooth_value(const Vec& x) const { return smooth.value(x); }
    Vec smooth_gradient(const Vec& x) const { return smooth.gradient(x); }
    double nonsmooth_value(const Vec& x) const {
        return nonsmooth ? nonsmooth->value(x) : 0.0;
    }
    // prox of the nonsmooth part; identity when absent.
    Vec prox(double gamma, const Vec& x) const {
        return nonsmooth ? nonsmooth->prox(gamma, x) : x;
    }
};

// Theta(x) = Phi(x) + Psi(x); +inf allowed.
double composite_value(const ProblemSpec& spec, const Vec& x);

// Worst componentwise relative error of the declared gradient against central
// finite differences with step h.
double check_gradient(const ProblemSpec& spec, const Vec& x, double h);

// Componentwise soft threshold with threshold gamma*lambda.
Vec prox_l1(double gamma, double lambda, const Vec& x);

// 1-D objective Phi(x) = max(0, dist(x,[a,b]))^2 / 2 with interval argmin.
ProblemSpec make_flat_bottom(double a, double b);

// Indicator of the box [lo, hi] (1-D): prox is the projection, value is
// 0 inside and +inf outside with no tolerance band.
NonsmoothObjective make_interval_indicator(double lo, double hi);

// Closed-form solution of  x'' + (alpha/t) x' + x = 0,  x(0)=x0, x'(0)=0,
// evaluated at time t by a power series with truncation error below 1e-12
// for t <= 100 (extended-precision arithmetic absorbs the cancellation).
Vec bessel_solution(double alpha, const Vec& x0, double t);

// Scalar factor so that bessel_solution(alpha, x0, t) = factor * x0.
double bessel_profile(double alpha, double t);
// d/dt of the factor (termwise-differentiated series).
double bessel_profile_derivative(double alpha, double t);

// Problem catalog addressable by string id:
//   quadratic, aniso-quadratic, flat-bottom, lasso-small, quartic, strong-quad
const ProblemSpec& problem_by_id(const std::string& id);
std::vector<std::string> problem_catalog_ids();

// Canonical initial point used by the experiment runner.
Vec default_start(const ProblemSpec& spec);

}  // namespace avd
