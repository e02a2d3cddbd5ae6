#include "avd/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avd {

namespace {

constexpr std::size_t kMinFitSamples = 20;

PowerLawFit lsq_loglog(const std::vector<double>& ts, const std::vector<double>& vs,
                       bool envelope) {
    const std::size_t n = ts.size();
    if (n < kMinFitSamples)
        throw std::invalid_argument("fit_power_law: fewer than 20 usable samples in the window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(ts[i]);
        ly[i] = std::log(vs[i]);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    double den = n * sxx - sx * sx;
    double slope = (n * sxy - sx * sy) / den;
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_x = 0;
    double mx = sx / n;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ly[i] - (intercept + slope * lx[i]);
        ss_res += r * r;
        ss_x += (lx[i] - mx) * (lx[i] - mx);
    }
    double se = std::sqrt(ss_res / static_cast<double>(n > 2 ? n - 2 : 1) / ss_x);
    PowerLawFit fit;
    fit.exponent = slope;
    fit.halfwidth = 2.0 * se;
    fit.n_samples = n;
    fit.envelope = envelope;
    return fit;
}

void collect_maxima(const DiagnosticSeries& s, Window w, std::vector<double>& ts,
                    std::vector<double>& vs) {
    ts.clear();
    vs.clear();
    for (std::size_t i = 1; i + 1 < s.values.size(); ++i) {
        if (s.times[i] < w.lo || s.times[i] > w.hi) continue;
        if (s.values[i] > s.values[i - 1] && s.values[i] > s.values[i + 1] && s.values[i] > 0)
            ts.push_back(s.times[i]), vs.push_back(s.values[i]);
    }
}

}  // namespace

PowerLawFit fit_power_law(const DiagnosticSeries& series, Window window, FitMode mode) {
    if (!(window.lo < window.hi))
        throw std::invalid_argument("fit_power_law: empty window");
    std::vector<double> ts, vs;
    if (mode == FitMode::Auto || mode == FitMode::Envelope) {
        collect_maxima(series, window, ts, vs);
        if (mode == FitMode::Envelope || ts.size() >= kMinFitSamples)
            return lsq_loglog(ts, vs, true);
    }
    ts.clear();
    vs.clear();
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        if (series.times[i] < window.lo || series.times[i] > window.hi) continue;
        if (!(series.values[i] > 0))
            throw std::invalid_argument("fit_power_law: nonpositive value in the window");
        ts.push_back(series.times[i]);
        vs.push_back(series.values[i]);
    }
    return lsq_loglog(ts, vs, false);
}

namespace {

DiagnosticSeries gap_series(const Trajectory& traj, const ProblemSpec& spec) {
    if (!spec.min_value)
        throw std::invalid_argument("verify_value_rate: problem has no known min value");
    DiagnosticSeries s;
    s.name = "value_gap";
    s.times = traj.times;
    s.values.resize(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        s.values[i] = spec.smooth_value(traj.positions[i]) - *spec.min_value;
    return s;
}

}  // namespace

RateReport verify_value_rate(const Trajectory& traj, const ProblemSpec& spec, double alpha,
                             std::optional<Window> fit_window, double slack) {
    DiagnosticSeries gaps = gap_series(traj, spec);
    const Vec& x0 = traj.positions.front();
    const Vec& v0 = traj.velocities.front();

    RateReport r;
    r.label = "value_rate";
    double p = std::min(1.0, alpha / 3.0);
    r.theoretical_exponent = 2.0 * p;
    if (alpha <= 3.0) {
        r.bound_constant = rate_bound_constant(spec, x0, v0, traj.t0, alpha);
    } else {
        if (!spec.argmin_set)
            throw std::invalid_argument("verify_value_rate: needs a declared argmin set");
        Vec z = spec.argmin_set->project(x0);
        LyapunovParams lp = LyapunovParams::family_a_default(alpha);
        double lam = lp.lambda(traj.t0), xi = lp.xi(traj.t0), tp = std::pow(traj.t0, lp.p);
        double mixed = 0, d2 = 0;
        for (std::size_t d = 0; d < z.size(); ++d) {
            double u = lam * (x0[d] - z[d]) + tp * v0[d];
            mixed += u * u;
            d2 += (x0[d] - z[d]) * (x0[d] - z[d]);
        }
        r.bound_constant =
            tp * tp * (spec.smooth_value(x0) - *spec.min_value) + 0.5 * mixed + 0.5 * xi * d2;
    }

    double sup = 0.0;
    for (std::size_t i = 0; i < gaps.values.size(); ++i)
        sup = std::max(sup, std::pow(gaps.times[i], 2.0 * p) * gaps.values[i]);
    r.bound_satisfied = sup <= r.bound_constant * (1.0 + slack) + 1e-14;

    Window w = fit_window ? *fit_window : Window{std::max(10.0 * traj.t0, traj.t_end() / 100.0),
                                                 traj.t_end()};
    r.window = w;
    try {
        PowerLawFit fit = fit_power_law(gaps, w, FitMode::Auto);
        r.fitted_exponent = fit.exponent;
        r.fitted_halfwidth = fit.halfwidth;
        r.fit_samples = fit.n_samples;
    } catch (const std::invalid_argument&) {
        // Gap hit zero (or too few samples) inside the window: nothing to fit;
        // the sup bound above still stands.
        r.fitted_exponent = -kPlusInf;
        r.fit_samples = 0;
    }
    return r;
}

RateReport verify_value_rate(const IterateLog& log, const ProblemSpec& spec, double p) {
    if (!spec.min_value)
        throw std::invalid_argument("verify_value_rate: problem has no known min value");
    if (!(p < 2.0 * log.alpha / 3.0))
        throw std::invalid_argument("verify_value_rate: requested p must be below 2 alpha / 3");
    const std::size_t K = log.last_index();
    RateReport r;
    r.label = "discrete_value_rate";
    r.theoretical_exponent = p;
    r.window = {static_cast<double>(K / 10), static_cast<double>(K)};
    double sup = 0.0;
    for (std::size_t k = std::max<std::size_t>(K / 10, 1); k <= K; ++k)
        sup = std::max(sup, std::pow(static_cast<double>(k), p) * (log.values[k] - *spec.min_value));
    r.bound_constant = sup;
    r.bound_satisfied = std::isfinite(sup);

    DiagnosticSeries s;
    s.times.reserve(K);
    s.values.reserve(K);
    for (std::size_t k = 1; k <= K; ++k) {
        s.times.push_back(static_cast<double>(k));
        s.values.push_back(log.values[k] - *spec.min_value);
    }
    try {
        PowerLawFit fit = fit_power_law(s, r.window, FitMode::Auto);
        r.fitted_exponent = fit.exponent;
        r.fitted_halfwidth = fit.halfwidth;
        r.fit_samples = fit.n_samples;
    } catch (const std::invalid_argument&) {
        r.fitted_exponent = -kPlusInf;
        r.fit_samples = 0;
    }
    return r;
}

RateReport verify_speed_rate(const Trajectory& traj, double alpha) {
    RateReport r;
    r.label = "speed_rate";
    double q;
    if (alpha >= 3.0)
        q = 1.0;
    else if (alpha >= 1.0)
        q = (alpha - 1.0) / 2.0 - 0.05;
    else
        q = 0.0;  // no pointwise guarantee below alpha = 1
    r.theoretical_exponent = q;
    double t_end = traj.t_end();
    r.window = {t_end / 10.0, t_end};
    double sup_tail = 0.0, sup_prev_decade = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        double t = traj.times[i];
        double w = std::pow(t, q) * norm(traj.velocities[i]);
        if (t >= r.window.lo)
            sup_tail = std::max(sup_tail, w);
        else if (t >= t_end / 100.0)
            sup_prev_decade = std::max(sup_prev_decade, w);
    }
    r.bound_constant = sup_tail;
    if (alpha < 1.0)
        r.bound_satisfied = true;  // report only
    else if (alpha > 3.0)
        r.bound_satisfied = std::isfinite(sup_tail) && sup_tail < sup_prev_decade;
    else
        r.bound_satisfied = std::isfinite(sup_tail);

    DiagnosticSeries s;
    s.times = traj.times;
    s.values.resize(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        s.values[i] = norm(traj.velocities[i]);
    try {
        PowerLawFit fit = fit_power_law(s, r.window, FitMode::Auto);
        r.fitted_exponent = fit.exponent;
        r.fitted_halfwidth = fit.halfwidth;
        r.fit_samples = fit.n_samples;
    } catch (const std::invalid_argument&) {
        r.fitted_exponent = -kPlusInf;
        r.fit_samples = 0;
    }
    return r;
}

std::vector<double> loop_decrement(const std::vector<CrossingEvent>& events, double /*alpha*/,
                                   double /*a*/, double /*b*/) {
    using D = CrossingEvent::Direction;
    // A full loop: leave the interval at boundary X, re-enter at X, traverse
    // to the other boundary and exit there... equivalently four consecutive
    // crossings [X enter, Y leave, Y enter, X leave] starting and ending at
    // the same side with a full traverse in between. Both orientations count.
    std::vector<double> decs;
    std::size_t i = 0;
    auto matches = [&](std::size_t j, char bd, D dir) {
        return events[j].boundary == bd && events[j].direction == dir;
    };
    while (i + 3 < events.size()) {
        bool top = matches(i, 'b', D::Enter) && matches(i + 1, 'a', D::Leave) &&
                   matches(i + 2, 'a', D::Enter) && matches(i + 3, 'b', D::Leave);
        bool bottom = matches(i, 'a', D::Enter) && matches(i + 1, 'b', D::Leave) &&
                      matches(i + 2, 'b', D::Enter) && matches(i + 3, 'a', D::Leave);
        if (top || bottom) {
            decs.push_back(events[i].speed_measure - events[i + 3].speed_measure);
            i += 4;
        } else {
            ++i;
        }
    }
    return decs;
}

std::vector<double> discrete_pass_decrements(const IterateLog& log, double a, double b) {
    if (log.dimension() != 1)
        throw std::invalid_argument("discrete_pass_decrements: requires a 1-D run");
    const std::size_t K = log.last_index();
    auto y_in = [&](std::size_t k) {
        double y = log.ys[k][0];
        return y >= a && y <= b;
    };
    std::vector<double> decs;
    std::size_t k = 1;
    while (k + 1 <= K) {
        if (!y_in(k)) {
            ++k;
            continue;
        }
        std::size_t st = k;
        while (k + 1 <= K && y_in(k)) ++k;
        std::size_t en = k - 1;  // y_st..y_en inside; x_{st+1}..x_{en+1} are pure extrapolation
        if (en > st && en + 1 <= K && std::abs(log.xs[en + 1][0] - log.xs[st][0]) > 0.8 * (b - a)) {
            double v_in = static_cast<double>(st) * std::abs(log.xs[st][0] - log.xs[st - 1][0]);
            double v_out =
                static_cast<double>(en + 1) * std::abs(log.xs[en + 1][0] - log.xs[en][0]);
            decs.push_back(v_in - v_out);
        }
    }
    return decs;
}

StrongMinReport strong_min_rates(const Trajectory& traj, const ProblemSpec& spec) {
    if (!spec.strong_min_modulus)
        throw std::invalid_argument("strong_min_rates: problem declares no strong-minimum modulus");
    if (!spec.argmin_set || spec.argmin_set->kind != ArgminSet::Kind::Point)
        throw std::invalid_argument("strong_min_rates: needs a single-point argmin");
    const double mu = *spec.strong_min_modulus;
    const Vec& xstar = spec.argmin_set->point;
    const double alpha = traj.alpha;
    const double p23 = 2.0 * alpha / 3.0;

    StrongMinReport rep;
    rep.values = verify_value_rate(traj, spec, std::min(alpha, 3.0));

    double t_end = traj.t_end();
    Window tail{t_end / 10.0, t_end};
    double sup_dist = 0.0, sup_speed = 0.0, worst_growth = 0.0;
    double minv = *spec.min_value;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        double t = traj.times[i];
        double d2 = 0.0;
        for (std::size_t d = 0; d < xstar.size(); ++d)
            d2 += (traj.positions[i][d] - xstar[d]) * (traj.positions[i][d] - xstar[d]);
        double gap = spec.smooth_value(traj.positions[i]) - minv;
        worst_growth = std::max(worst_growth, d2 - 2.0 / mu * gap);
        if (t >= tail.lo) {
            sup_dist = std::max(sup_dist, std::pow(t, p23) * d2);
            sup_speed = std::max(sup_speed, std::pow(t, alpha / 3.0) * norm(traj.velocities[i]));
        }
    }
    rep.max_growth_residual = worst_growth;

    rep.distance.label = "strong_min_distance";
    rep.distance.theoretical_exponent = p23;
    rep.distance.window = tail;
    rep.distance.bound_constant = 2.0 / mu * rep.values.bound_constant;
    rep.distance.bound_satisfied = sup_dist <= rep.distance.bound_constant * 1.01 + 1e-14;

    rep.speed.label = "strong_min_speed";
    rep.speed.theoretical_exponent = alpha / 3.0;
    rep.speed.window = tail;
    rep.speed.bound_constant = sup_speed;
    rep.speed.bound_satisfied = std::isfinite(sup_speed);
    return rep;
}

RateReport verify_perturbed_rate(const Trajectory& traj, const ProblemSpec& spec,
                                 const Forcing& forcing, double p) {
    if (!forcing.integrable_against(p))
        throw std::invalid_argument(
            "verify_perturbed_rate: forcing fails the t^p integrability requirement");
    if (!spec.min_value)
        throw std::invalid_argument("verify_perturbed_rate: problem has no known min value");
    RateReport r;
    r.label = "perturbed_value_rate";
    r.theoretical_exponent = 2.0 * p;
    double t_end = traj.t_end();
    r.window = {t_end / 10.0, t_end};
    double sup = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        double t = traj.times[i];
        if (t < r.window.lo) continue;
        double gap = spec.smooth_value(traj.positions[i]) - *spec.min_value;
        sup = std::max(sup, std::pow(t, 2.0 * p) * gap);
    }
    r.bound_constant = sup;
    r.bound_satisfied = std::isfinite(sup);
    return r;
}

RateReport verify_perturbed_rate(const IterateLog& log, const ProblemSpec& spec,
                                 const PerturbationSchedule& pert, double p) {
    if (!pert.summable_against(p))
        throw std::invalid_argument(
            "verify_perturbed_rate: perturbation fails the k^p summability requirement");
    if (!spec.min_value)
        throw std::invalid_argument("verify_perturbed_rate: problem has no known min value");
    const std::size_t K = log.last_index();
    RateReport r;
    r.label = "perturbed_discrete_value_rate";
    r.theoretical_exponent = p;
    r.window = {static_cast<double>(K / 10), static_cast<double>(K)};
    double sup = 0.0;
    for (std::size_t k = std::max<std::size_t>(K / 10, 1); k <= K; ++k)
        sup = std::max(sup, std::pow(static_cast<double>(k), p) * (log.values[k] - *spec.min_value));
    r.bound_constant = sup;
    r.bound_satisfied = std::isfinite(sup);
    return r;
}

GronwallCheck gronwall_sqrt_bound_check(const std::vector<double>& times,
                                        const std::vector<double>& m,
                                        const std::vector<double>& w, double c) {
    if (times.size() != m.size() || times.size() != w.size() || times.size() < 2)
        throw std::invalid_argument("gronwall_sqrt_bound_check: inconsistent inputs");
    if (!(c > 0)) throw std::invalid_argument("gronwall_sqrt_bound_check: c must be positive");
    const std::size_t n = times.size();
    GronwallCheck out;
    out.hypothesis_holds = true;
    out.conclusion_holds = true;
    double int_mw = 0.0, int_m = 0.0;
    double worst = -kPlusInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i] < 0) throw std::invalid_argument("gronwall_sqrt_bound_check: m must be >= 0");
        if (i > 0) {
            double dt = times[i] - times[i - 1];
            int_mw += 0.5 * (m[i] * w[i] + m[i - 1] * w[i - 1]) * dt;
            int_m += 0.5 * (m[i] + m[i - 1]) * dt;
        }
        double hyp_slack = 1e-6 * (1.0 + 0.5 * c * c + std::abs(int_mw));
        if (0.5 * w[i] * w[i] > 0.5 * c * c + int_mw + hyp_slack) out.hypothesis_holds = false;
        double margin = std::abs(w[i]) - (c + int_m);
        worst = std::max(worst, margin);
        if (margin > 1e-6 * (1.0 + c + int_m)) out.conclusion_holds = false;
    }
    out.worst_conclusion_margin = worst;
    return out;
}

}  // namespace avd
