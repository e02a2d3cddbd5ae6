#include "avd/problems.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace avd {

ArgminSet ArgminSet::single(Vec p) {
    ArgminSet s;
    s.kind = Kind::Point;
    s.point = std::move(p);
    return s;
}

ArgminSet ArgminSet::interval(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("ArgminSet::interval: requires a < b");
    ArgminSet s;
    s.kind = Kind::Interval;
    s.a = a;
    s.b = b;
    return s;
}

ArgminSet ArgminSet::affine(Vec anchor, std::vector<Vec> basis) {
    ArgminSet s;
    s.kind = Kind::Affine;
    s.anchor = std::move(anchor);
    s.basis = std::move(basis);
    return s;
}

Vec ArgminSet::project(const Vec& x) const {
    switch (kind) {
        case Kind::Point:
            return point;
        case Kind::Interval:
            return Vec{std::clamp(x.at(0), a, b)};
        case Kind::Affine: {
            Vec p = anchor;
            Vec d = x - anchor;
            for (const Vec& e : basis) axpy(dot(d, e), e, p);
            return p;
        }
    }
    throw std::logic_error("ArgminSet::project: bad kind");
}

double ArgminSet::distance(const Vec& x) const { return norm(x - project(x)); }

bool ArgminSet::contains(const Vec& x, double tol) const { return distance(x) <= tol; }

Vec ArgminSet::representative() const {
    switch (kind) {
        case Kind::Point:
            return point;
        case Kind::Interval:
            return Vec{b};
        case Kind::Affine:
            return anchor;
    }
    throw std::logic_error("ArgminSet::representative: bad kind");
}

double composite_value(const ProblemSpec& spec, const Vec& x) {
    require_dim(x, static_cast<std::size_t>(spec.dimension()), "composite_value");
    double phi = spec.smooth_value(x);
    double psi = spec.nonsmooth_value(x);
    return phi + psi;
}

double check_gradient(const ProblemSpec& spec, const Vec& x, double h) {
    require_dim(x, static_cast<std::size_t>(spec.dimension()), "check_gradient");
    if (!(h > 0)) throw std::invalid_argument("check_gradient: h must be positive");
    Vec g = spec.smooth_gradient(x);
    double worst = 0.0;
    Vec xp = x, xm = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        double fd = (spec.smooth_value(xp) - spec.smooth_value(xm)) / (2 * h);
        xp[i] = x[i];
        xm[i] = x[i];
        double err = std::abs(fd - g[i]) / (1.0 + std::abs(g[i]));
        if (!std::isfinite(err)) throw std::runtime_error("check_gradient: nonfinite value");
        worst = std::max(worst, err);
    }
    return worst;
}

Vec prox_l1(double gamma, double lambda, const Vec& x) {
    if (!(gamma > 0)) throw std::invalid_argument("prox_l1: gamma must be positive");
    if (lambda < 0) throw std::invalid_argument("prox_l1: lambda must be nonnegative");
    const double thr = gamma * lambda;
    Vec p = x;
    for (double& v : p) {
        if (v > thr)
            v -= thr;
        else if (v < -thr)
            v += thr;
        else
            v = 0.0;
    }
    return p;
}

ProblemSpec make_flat_bottom(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("make_flat_bottom: requires a < b");
    ProblemSpec spec;
    spec.name = "flat-bottom";
    spec.smooth.dimension = 1;
    spec.smooth.value = [a, b](const Vec& x) {
        double t = x[0];
        if (t > b) return 0.5 * (t - b) * (t - b);
        if (t < a) return 0.5 * (a - t) * (a - t);
        return 0.0;
    };
    spec.smooth.gradient = [a, b](const Vec& x) {
        double t = x[0];
        if (t > b) return Vec{t - b};
        if (t < a) return Vec{t - a};
        return Vec{0.0};
    };
    spec.smooth.lipschitz_bound = 1.0;
    spec.smooth.region_radius = 1e6;
    spec.min_value = 0.0;
    spec.argmin_set = ArgminSet::interval(a, b);
    return spec;
}

NonsmoothObjective make_interval_indicator(double lo, double hi) {
    NonsmoothObjective psi;
    psi.dimension = 1;
    psi.value = [lo, hi](const Vec& x) {
        return (x[0] >= lo && x[0] <= hi) ? 0.0 : kPlusInf;
    };
    psi.prox = [lo, hi](double, const Vec& x) { return Vec{std::clamp(x[0], lo, hi)}; };
    return psi;
}

namespace {

ProblemSpec make_quadratic() {
    ProblemSpec spec;
    spec.name = "quadratic";
    spec.smooth.dimension = 1;
    spec.smooth.value = [](const Vec& x) { return 0.5 * x[0] * x[0]; };
    spec.smooth.gradient = [](const Vec& x) { return Vec{x[0]}; };
    spec.smooth.lipschitz_bound = 1.0;
    spec.smooth.region_radius = 1e6;
    spec.min_value = 0.0;
    spec.argmin_set = ArgminSet::single(Vec{0.0});
    spec.strong_min_modulus = 1.0;
    return spec;
}

ProblemSpec make_aniso_quadratic() {
    ProblemSpec spec;
    spec.name = "aniso-quadratic";
    spec.smooth.dimension = 2;
    spec.smooth.value = [](const Vec& x) { return 0.5 * (x[0] * x[0] + 10.0 * x[1] * x[1]); };
    spec.smooth.gradient = [](const Vec& x) { return Vec{x[0], 10.0 * x[1]}; };
    spec.smooth.lipschitz_bound = 10.0;
    spec.smooth.region_radius = 1e6;
    spec.min_value = 0.0;
    spec.argmin_set = ArgminSet::single(Vec{0.0, 0.0});
    return spec;
}

ProblemSpec make_lasso_small() {
    // min 0.5 (x-2)^2 + |x|; optimality gives x* = 1, Theta(x*) = 1.5
    ProblemSpec spec;
    spec.name = "lasso-small";
    spec.smooth.dimension = 1;
    spec.smooth.value = [](const Vec& x) { return 0.5 * (x[0] - 2.0) * (x[0] - 2.0); };
    spec.smooth.gradient = [](const Vec& x) { return Vec{x[0] - 2.0}; };
    spec.smooth.lipschitz_bound = 1.0;
    spec.smooth.region_radius = 1e6;
    NonsmoothObjective psi;
    psi.dimension = 1;
    psi.value = [](const Vec& x) { return std::abs(x[0]); };
    psi.prox = [](double gamma, const Vec& x) { return prox_l1(gamma, 1.0, x); };
    spec.nonsmooth = psi;
    spec.min_value = 1.5;
    spec.argmin_set = ArgminSet::single(Vec{1.0});
    return spec;
}

ProblemSpec make_quartic() {
    // Degenerate minimum: not strongly convex, gradient Lipschitz only on
    // bounded sets. L = sup 3x^2 over |x| <= 2.
    ProblemSpec spec;
    spec.name = "quartic";
    spec.smooth.dimension = 1;
    spec.smooth.value = [](const Vec& x) { return 0.25 * x[0] * x[0] * x[0] * x[0]; };
    spec.smooth.gradient = [](const Vec& x) { return Vec{x[0] * x[0] * x[0]}; };
    spec.smooth.lipschitz_bound = 12.0;
    spec.smooth.region_radius = 2.0;
    spec.min_value = 0.0;
    spec.argmin_set = ArgminSet::single(Vec{0.0});
    return spec;
}

ProblemSpec make_strong_quad() {
    ProblemSpec spec;
    spec.name = "strong-quad";
    spec.smooth.dimension = 2;
    spec.smooth.value = [](const Vec& x) { return 0.5 * (3.0 * x[0] * x[0] + x[1] * x[1]); };
    spec.smooth.gradient = [](const Vec& x) { return Vec{3.0 * x[0], x[1]}; };
    spec.smooth.lipschitz_bound = 3.0;
    spec.smooth.region_radius = 1e6;
    spec.min_value = 0.0;
    spec.argmin_set = ArgminSet::single(Vec{0.0, 0.0});
    spec.strong_min_modulus = 1.0;
    return spec;
}

const std::map<std::string, ProblemSpec>& catalog() {
    static const std::map<std::string, ProblemSpec> cat = [] {
        std::map<std::string, ProblemSpec> m;
        m["quadratic"] = make_quadratic();
        m["aniso-quadratic"] = make_aniso_quadratic();
        m["flat-bottom"] = make_flat_bottom(0.0, 1.0);
        m["lasso-small"] = make_lasso_small();
        m["quartic"] = make_quartic();
        m["strong-quad"] = make_strong_quad();
        return m;
    }();
    return cat;
}

}  // namespace

const ProblemSpec& problem_by_id(const std::string& id) {
    auto it = catalog().find(id);
    if (it == catalog().end())
        throw std::invalid_argument("unknown problem id: " + id);
    return it->second;
}

std::vector<std::string> problem_catalog_ids() {
    std::vector<std::string> ids;
    for (const auto& [k, v] : catalog()) ids.push_back(k);
    return ids;
}

Vec default_start(const ProblemSpec& spec) {
    if (spec.name == "flat-bottom") return Vec{3.0};
    if (spec.name == "lasso-small") return Vec{3.0};
    if (spec.name == "quartic") return Vec{1.0};
    if (spec.dimension() == 2) return Vec{1.0, 1.0};
    return Vec{1.0};
}

}  // namespace avd
