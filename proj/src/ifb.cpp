#include "avd/ifb.hpp"

#include <cmath>
#include <stdexcept>

namespace avd {

PerturbationSchedule PerturbationSchedule::power_decay(double c, double q, Vec direction) {
    PerturbationSchedule p;
    p.kind = Kind::PowerDecay;
    p.c = c;
    p.q = q;
    p.direction = std::move(direction);
    return p;
}

void PerturbationSchedule::eval(std::size_t k, int dim, Vec& out) const {
    out.assign(static_cast<std::size_t>(dim), 0.0);
    if (kind == Kind::None) return;
    double s = c * std::pow(static_cast<double>(k), -q);
    if (direction.empty()) {
        out[0] = s;
    } else {
        require_dim(direction, out.size(), "PerturbationSchedule::eval");
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * direction[i];
    }
}

bool PerturbationSchedule::summable_against(double p) const {
    if (kind == Kind::None) return true;
    return q > p + 1.0;
}

double IterateLog::diff_norm(std::size_t k) const {
    if (k == 0 || k >= xs.size()) throw std::out_of_range("IterateLog::diff_norm");
    return norm(xs[k] - xs[k - 1]);
}

namespace {

void check_stepsize(const ProblemSpec& spec, double s) {
    double L = spec.smooth.lipschitz_bound;
    if (!(s > 0) || s > 1.0 / L * (1.0 + 1e-12))
        throw std::invalid_argument("stepsize must satisfy s in (0, 1/L]");
}

double require_min_value(const ProblemSpec& spec, const char* what) {
    if (!spec.min_value)
        throw std::invalid_argument(std::string(what) + ": problem has no known min value");
    return *spec.min_value;
}

}  // namespace

IterateLog run_ifb(const ProblemSpec& spec, double alpha, double s, const Vec& x0, std::size_t K,
                   const PerturbationSchedule& pert) {
    check_stepsize(spec, s);
    if (!(alpha > 0)) throw std::invalid_argument("run_ifb: alpha must be positive");
    if (K < 2) throw std::invalid_argument("run_ifb: K must be at least 2");
    const std::size_t n = static_cast<std::size_t>(spec.dimension());
    require_dim(x0, n, "run_ifb x0");

    IterateLog log;
    log.problem_name = spec.name;
    log.alpha = alpha;
    log.s = s;
    log.xs.reserve(K + 1);
    log.xs.push_back(x0);
    log.xs.push_back(x0);  // x_1 = x_0
    log.ys.assign(K, x0);
    if (!pert.is_none()) log.perturbations.assign(K, zeros(n));

    Vec g(n), step(n);
    for (std::size_t k = 1; k + 1 <= K; ++k) {
        const Vec& xk = log.xs[k];
        const Vec& xkm = log.xs[k - 1];
        double ak = 1.0 - alpha / static_cast<double>(k);
        Vec y = xk;
        for (std::size_t i = 0; i < n; ++i) y[i] += ak * (xk[i] - xkm[i]);
        log.ys[k] = y;
        Vec grad = spec.smooth_gradient(y);
        step = y;
        axpy(-s, grad, step);
        if (!pert.is_none()) {
            pert.eval(k, static_cast<int>(n), g);
            log.perturbations[k] = g;
            axpy(-s, g, step);
        }
        log.xs.push_back(spec.prox(s, step));
    }
    log.values.resize(log.xs.size());
    for (std::size_t k = 0; k < log.xs.size(); ++k)
        log.values[k] = composite_value(spec, log.xs[k]);
    return log;
}

Vec gs_operator(const ProblemSpec& spec, double s, const Vec& y) {
    check_stepsize(spec, s);
    Vec grad = spec.smooth_gradient(y);
    Vec step = y;
    axpy(-s, grad, step);
    Vec p = spec.prox(s, step);
    Vec out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - p[i]) / s;
    return out;
}

double verify_descent_rule(const ProblemSpec& spec, double s, const Vec& y, const Vec& x) {
    Vec gs = gs_operator(spec, s, y);
    Vec ynext = y;
    axpy(-s, gs, ynext);
    double lhs = composite_value(spec, ynext);
    double rhs = composite_value(spec, x) + dot(gs, y - x) - 0.5 * s * dot(gs, gs);
    return lhs - rhs;
}

std::vector<StepViolation> verify_energy_decay(const IterateLog& log, const ProblemSpec& spec) {
    double minv = require_min_value(spec, "verify_energy_decay");
    const std::size_t K = log.last_index();
    auto W = [&](std::size_t k) {
        double d = (k == 0) ? 0.0 : log.diff_norm(k);
        return log.values[k] - minv + d * d / (2.0 * log.s);
    };
    std::vector<StepViolation> out;
    double Wk = W(1);
    for (std::size_t k = 1; k + 1 <= K; ++k) {
        double Wk1 = W(k + 1);
        double ak = 1.0 - log.alpha / static_cast<double>(k);
        double d = log.diff_norm(k);
        double lhs = Wk1 - Wk + (1.0 - ak * ak) / (2.0 * log.s) * d * d;
        double slack = 1e-12 * (1.0 + std::abs(Wk));
        if (lhs > slack) out.push_back({k, lhs - slack});
        Wk = Wk1;
    }
    return out;
}

std::vector<StepViolation> verify_anchor_inequality(const IterateLog& log, const ProblemSpec& spec,
                                                    const Vec& z) {
    double minv = require_min_value(spec, "verify_anchor_inequality");
    if (!spec.argmin_set || !spec.argmin_set->contains(z, 1e-9))
        throw std::invalid_argument("verify_anchor_inequality: z is not in the argmin set");
    const std::size_t K = log.last_index();
    auto h = [&](std::size_t k) {
        double d = norm(log.xs[k] - z);
        return 0.5 * d * d;
    };
    std::vector<StepViolation> out;
    double hkm = h(0), hk = h(1);
    for (std::size_t k = 1; k + 1 <= K; ++k) {
        double hk1 = h(k + 1);
        double ak = 1.0 - log.alpha / static_cast<double>(k);
        double d = log.diff_norm(k);
        double lhs = hk1 - hk - ak * (hk - hkm);
        double rhs = 0.5 * (ak * ak + ak) * d * d - log.s * (log.values[k + 1] - minv);
        double slack = 1e-12 * (1.0 + std::abs(hk));
        if (lhs - rhs > slack) out.push_back({k, lhs - rhs - slack});
        hkm = hk;
        hk = hk1;
    }
    return out;
}

DiscreteEnergies discrete_lyapunov(const IterateLog& log, const ProblemSpec& spec, const Vec& z,
                                   double p) {
    double minv = require_min_value(spec, "discrete_lyapunov");
    if (!spec.argmin_set || !spec.argmin_set->contains(z, 1e-9))
        throw std::invalid_argument("discrete_lyapunov: z is not in the argmin set");
    const double alpha = log.alpha;
    const double pmax = std::min({1.0, alpha / 3.0, (alpha + 1.0) / 4.0});
    if (!(p > 0) || !(p < pmax))
        throw std::invalid_argument("discrete_lyapunov: p must lie in (0, min(1, alpha/3, (alpha+1)/4))");
    const double s = log.s;
    const std::size_t K = log.last_index();

    DiscreteEnergies de;
    de.p = p;
    auto lam = [&](std::size_t k) {
        double kd = static_cast<double>(k);
        // low-exponent branch, defined for k >= 2; the first index falls back
        // to the asymptotically equivalent primary form
        if (p < 0.5 && k >= 2)
            return 2.0 * p / std::pow(s, (1.0 - p) / 2.0) * std::pow(kd - 1.0, 2.0 * p - 1.0) /
                   std::pow(kd, p);
        return 2.0 * p / std::pow(s, (1.0 - p) / 2.0) * std::pow(kd, p - 1.0);
    };

    de.W.assign(K + 1, 0.0);
    de.h.assign(K + 1, 0.0);
    de.lambda.assign(K + 1, 0.0);
    de.xi.assign(K + 1, 0.0);
    de.E.assign(K + 1, 0.0);
    de.E_tilde.assign(K + 1, 0.0);

    for (std::size_t k = 0; k <= K; ++k) {
        double d = (k == 0) ? 0.0 : log.diff_norm(k);
        de.W[k] = log.values[k] - minv + d * d / (2.0 * s);
        double dz = norm(log.xs[k] - z);
        de.h[k] = 0.5 * dz * dz;
        if (k >= 1) de.lambda[k] = lam(k);
    }
    const double sp_half = std::pow(s, (p - 1.0) / 2.0);
    for (std::size_t k = 1; k + 1 <= K; ++k) {
        double ak = 1.0 - alpha / static_cast<double>(k);
        double kp = std::pow(static_cast<double>(k), p);
        double k1p = std::pow(static_cast<double>(k + 1), p);
        de.xi[k + 1] =
            -de.lambda[k + 1] * de.lambda[k + 1] - sp_half * (ak * de.lambda[k + 1] * k1p - de.lambda[k] * kp);
    }
    if (K >= 2) de.xi[1] = de.xi[2];  // first index has no recurrence; report the neighbor

    for (std::size_t k = 1; k <= K; ++k) {
        double kd = static_cast<double>(k);
        double k2p = std::pow(kd, 2.0 * p);
        double kp = std::pow(kd, p);
        de.E[k] = std::pow(s, p) * k2p * de.W[k] + sp_half * de.lambda[k] * kp * (de.h[k] - de.h[k - 1]) +
                  (de.lambda[k] * de.lambda[k] + de.xi[k]) * de.h[k - 1];
        double d = log.diff_norm(k);
        de.E_tilde[k] = de.E[k] - p / std::pow(s, 1.0 - p) * std::pow(kd, 2.0 * p - 1.0) * d * d;
    }

    // k0 for xi sign: smallest k with xi_j >= 0 for all j >= k
    de.k0_xi_nonneg = K + 1;
    for (std::size_t k = K + 1; k-- > 1;) {
        if (de.xi[k] >= 0.0)
            de.k0_xi_nonneg = k;
        else
            break;
    }
    // k0 for E_tilde monotonicity: last increase beyond slack, plus one
    std::size_t last_increase = 0;
    for (std::size_t k = 1; k + 1 <= K; ++k) {
        double slack = 1e-12 * (1.0 + std::abs(de.E_tilde[k]));
        if (de.E_tilde[k + 1] - de.E_tilde[k] > slack) last_increase = k + 1;
    }
    de.k0_monotone = last_increase + 1;
    if (K < de.k0_monotone + 100) de.k0_monotone = K;  // not enough trailing evidence
    return de;
}

DiagnosticSeries critical_energy(const IterateLog& log, const ProblemSpec& spec,
                                 const Vec& x_star) {
    if (log.alpha != 3.0)
        throw std::invalid_argument("critical_energy: defined for alpha = 3 only");
    double minv = require_min_value(spec, "critical_energy");
    if (!spec.argmin_set || !spec.argmin_set->contains(x_star, 1e-9))
        throw std::invalid_argument("critical_energy: x_star is not in the argmin set");
    const std::size_t K = log.last_index();
    DiagnosticSeries s;
    s.name = "critical_energy";
    s.times.resize(K);
    s.values.resize(K);
    for (std::size_t k = 1; k <= K; ++k) {
        double kd = static_cast<double>(k);
        double m = 0.0;
        for (std::size_t d = 0; d < x_star.size(); ++d) {
            double u = log.xs[k][d] - x_star[d] +
                       0.5 * (kd - 1.0) * (log.xs[k][d] - log.xs[k - 1][d]);
            m += u * u;
        }
        s.times[k - 1] = kd;
        s.values[k - 1] = log.s * (kd + 1.0) * (kd + 1.0) * (log.values[k] - minv) + 2.0 * m;
    }
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
        double slack = 1e-12 * (1.0 + std::abs(s.values[i]));
        double inc = s.values[i + 1] - s.values[i];
        if (inc > slack) s.monotone_violations.push_back({i + 1, inc - slack});
    }
    return s;
}

BoundednessReport iterate_boundedness_check(const IterateLog& log) {
    BoundednessReport r;
    for (std::size_t k = 0; k < log.xs.size(); ++k) {
        r.sup_norm = std::max(r.sup_norm, norm(log.xs[k]));
        if (k >= 1)
            r.sup_k_diff = std::max(r.sup_k_diff, static_cast<double>(k) * log.diff_norm(k));
    }
    return r;
}

}  // namespace avd
