#include "avd/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace avd {

LyapunovParams LyapunovParams::family_a(double alpha, double p) {
    if (!(p > 0)) throw std::invalid_argument("LyapunovParams: p must be positive");
    if (alpha < 4 * p - 1)
        throw std::invalid_argument("LyapunovParams family A: requires alpha >= 4p-1");
    LyapunovParams lp;
    lp.family = Family::A;
    lp.alpha = alpha;
    lp.p = p;
    return lp;
}

LyapunovParams LyapunovParams::family_b(double alpha, double p) {
    if (!(p > 0)) throw std::invalid_argument("LyapunovParams: p must be positive");
    if (p > 1 || !(p < alpha / 3.0))
        throw std::invalid_argument("LyapunovParams family B: requires p <= 1 and p < alpha/3");
    LyapunovParams lp;
    lp.family = Family::B;
    lp.alpha = alpha;
    lp.p = p;
    return lp;
}

LyapunovParams LyapunovParams::family_a_default(double alpha) {
    return family_a(alpha, std::min(1.0, alpha / 3.0));
}

double LyapunovParams::lambda(double t) const {
    return family == Family::A ? 2.0 * p * std::pow(t, p - 1.0)
                               : (alpha - p) * std::pow(t, p - 1.0);
}

double LyapunovParams::xi(double t) const {
    if (family == Family::A) {
        double coeff = 2.0 * (alpha - 4.0 * p + 1.0) * p;
        if (coeff == 0.0) return 0.0;
        return coeff * std::pow(t, 2.0 * (p - 1.0));
    }
    double coeff = (1.0 - p) * (alpha - p);
    if (coeff == 0.0) return 0.0;
    return coeff * std::pow(t, 2.0 * (p - 1.0));
}

double DiagnosticSeries::sup_on(double lo, double hi) const {
    double m = -kPlusInf;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= lo && times[i] <= hi) m = std::max(m, values[i]);
    return m;
}

namespace {

double require_min_value(const ProblemSpec& spec, const char* what) {
    if (!spec.min_value)
        throw std::invalid_argument(std::string(what) + ": problem has no known min value");
    return *spec.min_value;
}

void require_in_argmin(const ProblemSpec& spec, const Vec& z, const char* what) {
    if (!spec.argmin_set)
        throw std::invalid_argument(std::string(what) + ": problem has no declared argmin set");
    if (!spec.argmin_set->contains(z, 1e-9))
        throw std::invalid_argument(std::string(what) + ": z is not in the declared argmin set");
}

void flag_monotone_violations(DiagnosticSeries& s, double tol) {
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
        double slack = 100.0 * tol * (1.0 + std::abs(s.values[i]));
        double inc = s.values[i + 1] - s.values[i];
        if (inc > slack) s.monotone_violations.push_back({i + 1, inc - slack});
    }
}

// E(t) along the samples; the anchor term is dropped exactly when xi == 0.
double energy_at(const Trajectory& traj, const ProblemSpec& spec, const Vec& z,
                 const LyapunovParams& lp, std::size_t i, double minv) {
    double t = traj.times[i];
    const Vec& x = traj.positions[i];
    const Vec& v = traj.velocities[i];
    double tp = std::pow(t, lp.p);
    double gap = spec.smooth_value(x) - minv;
    double lam = lp.lambda(t);
    double mixed = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        double u = lam * (x[d] - z[d]) + tp * v[d];
        mixed += u * u;
    }
    double e = tp * tp * gap + 0.5 * mixed;
    double xi = lp.xi(t);
    if (xi != 0.0) {
        double d2 = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) d2 += (x[d] - z[d]) * (x[d] - z[d]);
        e += 0.5 * xi * d2;
    }
    return e;
}

}  // namespace

DiagnosticSeries energy_E(const Trajectory& traj, const ProblemSpec& spec, const Vec& z,
                          const LyapunovParams& params) {
    double minv = require_min_value(spec, "energy_E");
    require_in_argmin(spec, z, "energy_E");
    DiagnosticSeries s;
    s.name = "lyapunov_energy";
    s.times = traj.times;
    s.values.resize(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        s.values[i] = energy_at(traj, spec, z, params, i, minv);
    flag_monotone_violations(s, traj.integrator_tolerance);
    return s;
}

DiagnosticSeries global_energy_W(const Trajectory& traj, const ProblemSpec& spec) {
    double minv = require_min_value(spec, "global_energy_W");
    DiagnosticSeries s;
    s.name = "global_energy";
    s.times = traj.times;
    s.values.resize(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        double k = dot(traj.velocities[i], traj.velocities[i]);
        s.values[i] = spec.smooth_value(traj.positions[i]) - minv + 0.5 * k;
    }
    flag_monotone_violations(s, traj.integrator_tolerance);
    return s;
}

DiagnosticSeries scaled_energy_Gamma(const Trajectory& traj, const ProblemSpec& spec, double p) {
    DiagnosticSeries w = global_energy_W(traj, spec);
    DiagnosticSeries s;
    s.name = "scaled_energy";
    s.times = w.times;
    s.values.resize(w.values.size());
    for (std::size_t i = 0; i < w.values.size(); ++i)
        s.values[i] = std::pow(w.times[i], 2.0 * p) * w.values[i];
    return s;
}

double w_derivative_residual(const Trajectory& traj, const ProblemSpec& spec) {
    DiagnosticSeries w = global_energy_W(traj, spec);
    const auto& t = w.times;
    const std::size_t n = t.size();
    if (n < 3) throw std::invalid_argument("w_derivative_residual: needs >= 3 samples");
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dw;
        if (i == 0)
            dw = (w.values[1] - w.values[0]) / (t[1] - t[0]);
        else if (i == n - 1)
            dw = (w.values[n - 1] - w.values[n - 2]) / (t[n - 1] - t[n - 2]);
        else {
            // centered difference on a nonuniform grid
            double hl = t[i] - t[i - 1], hr = t[i + 1] - t[i];
            dw = (w.values[i + 1] * hl * hl - w.values[i - 1] * hr * hr +
                  w.values[i] * (hr * hr - hl * hl)) /
                 (hl * hr * (hl + hr));
        }
        double v2 = dot(traj.velocities[i], traj.velocities[i]);
        worst = std::max(worst, std::abs(dw + traj.alpha / t[i] * v2));
    }
    return worst;
}

IntegralEstimate integral_estimate(const Trajectory& traj, const ProblemSpec& spec, double p,
                                   IntegralKind kind) {
    IntegralEstimate out;
    double minv = 0.0;
    LyapunovParams lpB;
    if (kind == IntegralKind::Values) {
        minv = require_min_value(spec, "integral_estimate");
        lpB = LyapunovParams::family_b(traj.alpha, p);  // validates p <= 1, p < alpha/3
    }
    const auto& t = traj.times;
    auto integrand = [&](std::size_t i) {
        if (kind == IntegralKind::Values) {
            double gap = spec.smooth_value(traj.positions[i]) - minv;
            return std::pow(t[i], 2.0 * p - 1.0) * gap;
        }
        double v2 = dot(traj.velocities[i], traj.velocities[i]);
        return std::pow(t[i], p) * v2;
    };
    double q = 0.0;
    double prev = integrand(0);
    for (std::size_t i = 1; i < t.size(); ++i) {
        double cur = integrand(i);
        q += 0.5 * (prev + cur) * (t[i] - t[i - 1]);
        prev = cur;
    }
    out.quadrature = q;

    if (kind == IntegralKind::Values) {
        if (!spec.argmin_set)
            throw std::invalid_argument("integral_estimate: needs a declared argmin set");
        Vec z = spec.argmin_set->project(traj.positions[0]);
        double t0 = t[0];
        double tp = std::pow(t0, p);
        double gap0 = spec.smooth_value(traj.positions[0]) - minv;
        double lam = lpB.lambda(t0), xi = lpB.xi(t0);
        double mixed = 0.0, d2 = 0.0;
        for (std::size_t d = 0; d < z.size(); ++d) {
            double u = lam * (traj.positions[0][d] - z[d]) + tp * traj.velocities[0][d];
            mixed += u * u;
            d2 += (traj.positions[0][d] - z[d]) * (traj.positions[0][d] - z[d]);
        }
        double eb0 = tp * tp * gap0 + 0.5 * mixed + 0.5 * xi * d2;
        out.bound = eb0 / (traj.alpha - 3.0 * p);
        out.below_bound = q <= *out.bound * (1.0 + 1e-9);
    }
    return out;
}

double rate_bound_constant(const ProblemSpec& spec, const Vec& x0, const Vec& v0, double t0,
                           double alpha) {
    if (alpha > 3.0)
        throw std::invalid_argument(
            "rate_bound_constant: defined for alpha <= 3 (use the p=1 energy at t0 instead)");
    double minv = require_min_value(spec, "rate_bound_constant");
    if (!spec.argmin_set)
        throw std::invalid_argument("rate_bound_constant: needs a declared argmin set");
    double gap0 = spec.smooth_value(x0) - minv;
    double dist = spec.argmin_set->distance(x0);
    return std::pow(t0, 2.0 * alpha / 3.0) * (gap0 + dot(v0, v0)) +
           alpha * (alpha + 1.0) / 3.0 * dist * dist;
}

DiagnosticSeries perturbed_energy_E(const Trajectory& traj, const ProblemSpec& spec, const Vec& z,
                                    const Forcing& forcing) {
    double minv = require_min_value(spec, "perturbed_energy_E");
    require_in_argmin(spec, z, "perturbed_energy_E");
    LyapunovParams lp = LyapunovParams::family_a_default(traj.alpha);

    const auto& t = traj.times;
    const std::size_t n = t.size();
    const std::size_t dim = z.size();
    // integrand <lambda (x-z) + s^p x', s^p g(s)>
    std::vector<double> integrand(n);
    Vec g(dim);
    for (std::size_t i = 0; i < n; ++i) {
        double lam = lp.lambda(t[i]);
        double tp = std::pow(t[i], lp.p);
        forcing.eval(t[i], static_cast<int>(dim), g);
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d)
            s += (lam * (traj.positions[i][d] - z[d]) + tp * traj.velocities[i][d]) * tp * g[d];
        integrand[i] = s;
    }
    // trailing integral int_t^T by backward cumulative trapezoid
    std::vector<double> trail(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;)
        trail[i] = trail[i + 1] + 0.5 * (integrand[i] + integrand[i + 1]) * (t[i + 1] - t[i]);

    DiagnosticSeries s;
    s.name = "perturbed_lyapunov_energy";
    s.times = t;
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.values[i] = energy_at(traj, spec, z, lp, i, minv) + trail[i];
    flag_monotone_violations(s, traj.integrator_tolerance);
    return s;
}

}  // namespace avd
