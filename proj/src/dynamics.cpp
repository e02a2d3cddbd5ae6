#include "avd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avd {

Forcing Forcing::power_decay(double c, double q, Vec direction) {
    Forcing f;
    f.kind = Kind::PowerDecay;
    f.c = c;
    f.q = q;
    f.direction = std::move(direction);
    return f;
}

Forcing Forcing::tabulated(std::vector<double> times, std::vector<Vec> values) {
    if (times.size() != values.size() || times.size() < 2)
        throw std::invalid_argument("Forcing::tabulated: need matching times/values, >= 2 rows");
    Forcing f;
    f.kind = Kind::Tabulated;
    f.table_times = std::move(times);
    f.table_values = std::move(values);
    return f;
}

void Forcing::eval(double t, int dim, Vec& out) const {
    out.assign(static_cast<std::size_t>(dim), 0.0);
    switch (kind) {
        case Kind::Zero:
            return;
        case Kind::PowerDecay: {
            double s = c * std::pow(t, -q);
            if (direction.empty()) {
                out[0] = s;
            } else {
                require_dim(direction, out.size(), "Forcing::eval");
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * direction[i];
            }
            return;
        }
        case Kind::Tabulated: {
            if (t <= table_times.front() || t >= table_times.back()) return;
            auto it = std::upper_bound(table_times.begin(), table_times.end(), t);
            std::size_t i = static_cast<std::size_t>(it - table_times.begin()) - 1;
            double w = (t - table_times[i]) / (table_times[i + 1] - table_times[i]);
            for (std::size_t d = 0; d < out.size(); ++d)
                out[d] = (1 - w) * table_values[i][d] + w * table_values[i + 1][d];
            return;
        }
    }
}

bool Forcing::integrable_against(double p) const {
    switch (kind) {
        case Kind::Zero:
            return true;
        case Kind::PowerDecay:
            return q > p + 1.0;
        case Kind::Tabulated:
            return false;
    }
    return false;
}

namespace {

// Quintic Hermite basis on sigma in [0,1]; value/derivative data scaled by h.
struct Quintic {
    // H(s) = p0*h00 + h*v0*h10 + h^2*a0*h20 + p1*h01 + h*v1*h11 + h^2*a1*h21
    static void weights(double s, double w[6]) {
        double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
        w[0] = 1 - 10 * s3 + 15 * s4 - 6 * s5;
        w[1] = s - 6 * s3 + 8 * s4 - 3 * s5;
        w[2] = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
        w[3] = 10 * s3 - 15 * s4 + 6 * s5;
        w[4] = -4 * s3 + 7 * s4 - 3 * s5;
        w[5] = 0.5 * s3 - s4 + 0.5 * s5;
    }
    static void dweights(double s, double w[6]) {
        double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
        w[0] = -30 * s2 + 60 * s3 - 30 * s4;
        w[1] = 1 - 18 * s2 + 32 * s3 - 15 * s4;
        w[2] = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
        w[3] = 30 * s2 - 60 * s3 + 30 * s4;
        w[4] = -12 * s2 + 28 * s3 - 15 * s4;
        w[5] = 1.5 * s2 - 4 * s3 + 2.5 * s4;
    }
    static void ddweights(double s, double w[6]) {
        double s2 = s * s, s3 = s2 * s;
        w[0] = -60 * s + 180 * s2 - 120 * s3;
        w[1] = -36 * s + 96 * s2 - 60 * s3;
        w[2] = 1 - 9 * s + 18 * s2 - 10 * s3;
        w[3] = 60 * s - 180 * s2 + 120 * s3;
        w[4] = -24 * s + 84 * s2 - 60 * s3;
        w[5] = 3 * s - 12 * s2 + 10 * s3;
    }
};

void hermite_eval(const Vec& x0, const Vec& v0, const Vec& a0, const Vec& x1, const Vec& v1,
                  const Vec& a1, double h, double s, Vec* x, Vec* v, Vec* a) {
    double w[6], dw[6], ddw[6];
    if (x) Quintic::weights(s, w);
    if (v) Quintic::dweights(s, dw);
    if (a) Quintic::ddweights(s, ddw);
    std::size_t n = x0.size();
    for (std::size_t i = 0; i < n; ++i) {
        double c0 = x0[i], c1 = h * v0[i], c2 = h * h * a0[i];
        double c3 = x1[i], c4 = h * v1[i], c5 = h * h * a1[i];
        if (x)
            (*x)[i] = c0 * w[0] + c1 * w[1] + c2 * w[2] + c3 * w[3] + c4 * w[4] + c5 * w[5];
        if (v)
            (*v)[i] = (c0 * dw[0] + c1 * dw[1] + c2 * dw[2] + c3 * dw[3] + c4 * dw[4] + c5 * dw[5]) / h;
        if (a)
            (*a)[i] = (c0 * ddw[0] + c1 * ddw[1] + c2 * ddw[2] + c3 * ddw[3] + c4 * ddw[4] +
                       c5 * ddw[5]) /
                      (h * h);
    }
}

// Dormand-Prince 5(4) coefficients.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84,  0.0};
constexpr double kB4[7] = {5179.0 / 57600,    0.0,          7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct StepState {
    double t;
    Vec x, v;      // state
    Vec ax, av;    // derivatives (ax = v, av = acceleration)
};

}  // namespace

void Trajectory::eval_dense(double t, Vec& x, Vec& v) const {
    if (node_times.empty())
        throw std::logic_error("Trajectory::eval_dense: step nodes were not retained");
    if (t < node_times.front() - 1e-12 || t > node_times.back() + 1e-12)
        throw std::out_of_range("Trajectory::eval_dense: t outside the integrated span");
    t = std::clamp(t, node_times.front(), node_times.back());
    auto it = std::upper_bound(node_times.begin(), node_times.end(), t);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - node_times.begin()),
                                          node_times.size() - 1);
    if (i == 0) i = 1;
    --i;  // step [i, i+1]
    double h = node_times[i + 1] - node_times[i];
    double s = (t - node_times[i]) / h;
    x.resize(node_x[i].size());
    v.resize(node_x[i].size());
    hermite_eval(node_x[i], node_v[i], node_a[i], node_x[i + 1], node_v[i + 1], node_a[i + 1], h, s,
                 &x, &v, nullptr);
}

double Trajectory::position1d(double t) const {
    Vec x, v;
    eval_dense(t, x, v);
    return x[0];
}

double Trajectory::velocity1d(double t) const {
    Vec x, v;
    eval_dense(t, x, v);
    return v[0];
}

double Trajectory::max_ode_residual(const ProblemSpec& spec, const Forcing& forcing) const {
    if (node_times.size() < 2)
        throw std::logic_error("max_ode_residual: step nodes were not retained");
    const std::size_t n = node_x[0].size();
    Vec x(n), v(n), a(n), g(n);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < node_times.size(); ++i) {
        double h = node_times[i + 1] - node_times[i];
        double tm = node_times[i] + 0.5 * h;
        hermite_eval(node_x[i], node_v[i], node_a[i], node_x[i + 1], node_v[i + 1], node_a[i + 1],
                     h, 0.5, &x, &v, &a);
        Vec grad = spec.smooth_gradient(x);
        forcing.eval(tm, static_cast<int>(n), g);
        for (std::size_t d = 0; d < n; ++d) {
            double r = std::abs(a[d] + (alpha / tm) * v[d] + grad[d] - g[d]);
            worst = std::max(worst, r);
        }
    }
    return worst;
}

Trajectory integrate(const ProblemSpec& spec, double alpha, const Vec& x0, const Vec& v0,
                     double t0, double t_end, double tol, const Forcing& forcing,
                     const IntegrateOptions& opts) {
    if (spec.has_nonsmooth())
        throw std::invalid_argument(
            "integrate: nonsmooth problems are handled by the discrete forward-backward "
            "solver (run_ifb), not by the continuous integrator");
    if (!(t0 > 0)) throw std::invalid_argument("integrate: t0 must be positive");
    if (!(t_end > t0)) throw std::invalid_argument("integrate: t_end must exceed t0");
    if (!(tol > 0)) throw std::invalid_argument("integrate: tol must be positive");
    const std::size_t n = static_cast<std::size_t>(spec.dimension());
    require_dim(x0, n, "integrate x0");
    require_dim(v0, n, "integrate v0");

    // Step policy: error-per-step acceptance at tol plus a cap ~ sqrt(tol).
    // The cap makes the observed accuracy scale like tol^(5/2) in the
    // moderate-tol range, with a floor below which accuracy saturates far
    // beyond any tolerance used by the checks.
    const double h_floor = 1e-3;
    const double h_max = 0.2;
    const double h_cap = std::clamp(0.5 * std::sqrt(tol), h_floor, h_max);

    auto rhs = [&](double t, const Vec& x, const Vec& v, Vec& dx, Vec& dv, Vec& gbuf) {
        dx = v;
        Vec grad = spec.smooth_gradient(x);
        forcing.eval(t, static_cast<int>(n), gbuf);
        dv.resize(n);
        for (std::size_t i = 0; i < n; ++i) dv[i] = -(alpha / t) * v[i] - grad[i] + gbuf[i];
    };

    Trajectory traj;
    traj.problem_name = spec.name;
    traj.alpha = alpha;
    traj.t0 = t0;
    traj.integrator_tolerance = tol;

    double t = t0;
    Vec x = x0, v = v0;
    Vec kx[7], kv[7];
    for (auto& k : kx) k.resize(n);
    for (auto& k : kv) k.resize(n);
    Vec gbuf(n), xs(n), vs(n), x5(n), v5(n), e(n * 2);

    rhs(t, x, v, kx[0], kv[0], gbuf);

    traj.node_times.push_back(t);
    traj.node_x.push_back(x);
    traj.node_v.push_back(v);
    traj.node_a.push_back(kv[0]);

    // Initial step small enough for the damping scale alpha/t0.
    double h = std::min(h_cap, t0 / (4.0 * std::max(1.0, alpha)));
    const double safety = 0.9;
    int consecutive_rejects = 0;
    while (t < t_end) {
        h = std::min(h, h_cap);
        if (t + h > t_end) h = t_end - t;

        for (int stage = 1; stage < 7; ++stage) {
            xs = x;
            vs = v;
            for (int j = 0; j < stage; ++j) {
                axpy(h * kA[stage][j], kx[j], xs);
                axpy(h * kA[stage][j], kv[j], vs);
            }
            rhs(t + kC[stage] * h, xs, vs, kx[stage], kv[stage], gbuf);
        }
        // 5th-order solution and embedded 4th-order error estimate
        x5 = x;
        v5 = v;
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dx5 = 0, dv5 = 0, dx4 = 0, dv4 = 0;
            for (int stage = 0; stage < 7; ++stage) {
                dx5 += kB5[stage] * kx[stage][i];
                dv5 += kB5[stage] * kv[stage][i];
                dx4 += kB4[stage] * kx[stage][i];
                dv4 += kB4[stage] * kv[stage][i];
            }
            x5[i] += h * dx5;
            v5[i] += h * dv5;
            err = std::max(err, std::abs(h * (dx5 - dx4)) / (tol * (1 + std::abs(x5[i]))));
            err = std::max(err, std::abs(h * (dv5 - dv4)) / (tol * (1 + std::abs(v5[i]))));
        }

        if (err <= 1.0) {
            t += h;
            x.swap(x5);
            v.swap(v5);
            // FSAL: stage 7 of the accepted step equals the first stage at (t, x, v)
            kx[0] = kx[6];
            kv[0] = kv[6];
            consecutive_rejects = 0;
            if (norm_inf(x) > opts.blowup_cap)
                throw std::runtime_error("integrate: trajectory norm exceeded the blow-up cap");
            traj.node_times.push_back(t);
            traj.node_x.push_back(x);
            traj.node_v.push_back(v);
            traj.node_a.push_back(kv[0]);
        } else if (++consecutive_rejects > 60 || h < 1e-14 * std::max(1.0, t)) {
            throw std::runtime_error("integrate: step size underflow");
        }
        double fac = safety * std::pow(std::max(err, 1e-10), -0.2);
        h = std::min(h * std::clamp(fac, 0.2, 5.0), h_cap);
    }

    // Resample to a log-uniform grid through the dense interpolant.
    const int N = std::max(opts.num_samples, 2);
    traj.times.resize(static_cast<std::size_t>(N));
    traj.positions.resize(static_cast<std::size_t>(N));
    traj.velocities.resize(static_cast<std::size_t>(N));
    const double lr = std::log(t_end / t0);
    for (int i = 0; i < N; ++i) {
        double ti = (i == 0) ? t0 : (i == N - 1 ? t_end : t0 * std::exp(lr * i / (N - 1)));
        Vec xi(n), vi(n);
        traj.eval_dense(ti, xi, vi);
        traj.times[static_cast<std::size_t>(i)] = ti;
        traj.positions[static_cast<std::size_t>(i)] = std::move(xi);
        traj.velocities[static_cast<std::size_t>(i)] = std::move(vi);
    }
    if (!opts.keep_nodes) {
        traj.node_times.clear();
        traj.node_x.clear();
        traj.node_v.clear();
        traj.node_a.clear();
    }
    return traj;
}

namespace {

// Bisection for x(t) = level inside [lo, hi] where the sign differs at the ends.
double bisect_crossing(const Trajectory& traj, double lo, double hi, double level) {
    double flo = traj.position1d(lo) - level;
    for (int it = 0; it < 200 && (hi - lo) > 1e-8; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = traj.position1d(mid) - level;
        if ((flo <= 0 && fm <= 0) || (flo >= 0 && fm >= 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<CrossingEvent> crossing_events(const Trajectory& traj, double a, double b) {
    if (traj.dimension() != 1)
        throw std::invalid_argument("crossing_events: requires a 1-D trajectory");
    if (!(a < b)) throw std::invalid_argument("crossing_events: requires a < b");
    if (traj.node_times.size() < 2)
        throw std::logic_error("crossing_events: step nodes were not retained");

    std::vector<CrossingEvent> events;
    auto scan_level = [&](double level, char name) {
        for (std::size_t i = 0; i + 1 < traj.node_times.size(); ++i) {
            // two sub-intervals per step to reduce missed double crossings
            double ts[3] = {traj.node_times[i], 0.5 * (traj.node_times[i] + traj.node_times[i + 1]),
                            traj.node_times[i + 1]};
            for (int half = 0; half < 2; ++half) {
                double f0 = traj.position1d(ts[half]) - level;
                double f1 = traj.position1d(ts[half + 1]) - level;
                if ((f0 < 0 && f1 > 0) || (f0 > 0 && f1 < 0)) {
                    double te = bisect_crossing(traj, ts[half], ts[half + 1], level);
                    CrossingEvent ev;
                    ev.time = te;
                    ev.boundary = name;
                    double vel = traj.velocity1d(te);
                    bool inside_after = (name == 'a') ? (vel > 0) : (vel < 0);
                    ev.direction = inside_after ? CrossingEvent::Direction::Enter
                                                : CrossingEvent::Direction::Leave;
                    ev.speed_measure = std::abs(te * vel);
                    events.push_back(ev);
                }
            }
        }
    };
    scan_level(a, 'a');
    scan_level(b, 'b');
    std::sort(events.begin(), events.end(),
              [](const CrossingEvent& l, const CrossingEvent& r) { return l.time < r.time; });
    return events;
}

}  // namespace avd
