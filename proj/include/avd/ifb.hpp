#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "avd/diagnostics.hpp"
#include "avd/problems.hpp"

namespace avd {

// Additive error g_k injected into the forward step.
struct PerturbationSchedule {
    enum class Kind { None, PowerDecay };
    Kind kind = Kind::None;
    double c = 0.0;
    double q = 0.0;
    Vec direction;

    static PerturbationSchedule none() { return {}; }
    static PerturbationSchedule power_decay(double c, double q, Vec direction = {});

    bool is_none() const { return kind == Kind::None; }
    void eval(std::size_t k, int dim, Vec& out) const;
    // sum_k k^p |g_k| < inf, decided on the kind.
    bool summable_against(double p) const;
};

// Full record of a run of the inertial forward-backward iteration
//   y_k = x_k + (1 - alpha/k)(x_k - x_{k-1})
//   x_{k+1} = prox_{s Psi}(y_k - s grad Phi(y_k) - s g_k)
// with x_1 = x_0 (zero initial velocity).
struct IterateLog {
    std::string problem_name;
    double alpha = 3.0;
    double s = 1.0;
    std::vector<Vec> xs;       // x_0 .. x_K
    std::vector<Vec> ys;       // ys[k] = y_k for 1 <= k <= K-1; ys[0] unused
    std::vector<double> values;  // Theta(x_k)
    std::vector<Vec> perturbations;  // g_k at index k (empty when unperturbed)

    std::size_t last_index() const { return xs.size() - 1; }
    int dimension() const { return xs.empty() ? 0 : static_cast<int>(xs[0].size()); }
    double diff_norm(std::size_t k) const;  // |x_k - x_{k-1}|
};

IterateLog run_ifb(const ProblemSpec& spec, double alpha, double s, const Vec& x0, std::size_t K,
                   const PerturbationSchedule& pert = PerturbationSchedule::none());

// Composite gradient mapping G_s(y) = (y - prox_{s Psi}(y - s grad Phi(y))) / s.
Vec gs_operator(const ProblemSpec& spec, double s, const Vec& y);

// lhs - rhs of the one-step descent rule
//   Theta(y - s G_s(y)) <= Theta(x) + <G_s(y), y-x> - (s/2)|G_s(y)|^2.
double verify_descent_rule(const ProblemSpec& spec, double s, const Vec& y, const Vec& x);

struct StepViolation {
    std::size_t k;
    double magnitude;
};

// Per-step check of W_{k+1} - W_k <= -(1-alpha_k^2)/(2s) |x_k - x_{k-1}|^2
// with W_k = Theta(x_k) - min + |x_k - x_{k-1}|^2/(2s); slack 1e-12 (1+|W_k|).
std::vector<StepViolation> verify_energy_decay(const IterateLog& log, const ProblemSpec& spec);

// Per-step check of the anchor inequality for h_k = |x_k - z|^2 / 2:
// h_{k+1}-h_k-alpha_k(h_k-h_{k-1})
//   <= (alpha_k^2+alpha_k)/2 |x_k-x_{k-1}|^2 - s (Theta(x_{k+1}) - min).
std::vector<StepViolation> verify_anchor_inequality(const IterateLog& log, const ProblemSpec& spec,
                                                    const Vec& z);

// Discrete energies built from the run; index k ranges over 1..K.
struct DiscreteEnergies {
    double p = 0.0;
    std::vector<double> W;        // W_k
    std::vector<double> h;        // h_k (k >= 0)
    std::vector<double> E;        // E_k
    std::vector<double> E_tilde;  // E_k - (p/s^{1-p}) k^{2p-1} |x_k - x_{k-1}|^2
    std::vector<double> lambda;   // lambda_k
    std::vector<double> xi;       // xi_k (xi_1 copies xi_2 by convention)
    // Smallest index after which E_tilde is nonincreasing for the rest of the
    // run (with >= 100 trailing samples), and after which xi_k >= 0.
    std::size_t k0_monotone = 0;
    std::size_t k0_xi_nonneg = 0;
    double value_at(const std::vector<double>& seq, std::size_t k) const { return seq.at(k); }
};

// Admissible p: 0 < p < min(1, alpha/3, (alpha+1)/4). The two lambda branches
// (p >= 1/2 and p < 1/2) are selected automatically.
DiscreteEnergies discrete_lyapunov(const IterateLog& log, const ProblemSpec& spec, const Vec& z,
                                   double p);

// E(k) = s (k+1)^2 (Theta(x_k) - min) + 2 |x_k - x* + (k-1)/2 (x_k - x_{k-1})|^2,
// defined for the critical damping alpha = 3; "times" carry the index k.
DiagnosticSeries critical_energy(const IterateLog& log, const ProblemSpec& spec, const Vec& x_star);

struct BoundednessReport {
    double sup_norm = 0.0;        // sup_k |x_k|
    double sup_k_diff = 0.0;      // sup_k k |x_k - x_{k-1}|
};

BoundednessReport iterate_boundedness_check(const IterateLog& log);

}  // namespace avd
