#include "avd/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <future>
#include <sstream>
#include <stdexcept>

#include "avd/io.hpp"

namespace avd {

void ExperimentConfig::validate() const {
    problem_by_id(problem_id);  // throws on unknown id
    if (alpha_grid.empty()) throw std::invalid_argument("config: alpha grid must not be empty");
    for (double a : alpha_grid)
        if (!(a > 0)) throw std::invalid_argument("config: alpha values must be positive");
    if (mode != RunMode::Discrete && !(t_end > 1.0))
        throw std::invalid_argument("config: t_end must exceed t0 = 1");
    if (mode != RunMode::Continuous && iterations < 2)
        throw std::invalid_argument("config: iteration count must be at least 2");
    if (!(tol > 0)) throw std::invalid_argument("config: tol must be positive");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (samples < 2) throw std::invalid_argument("config: samples must be >= 2");
    if (mode != RunMode::Continuous && step) {
        double L = problem_by_id(problem_id).smooth.lipschitz_bound;
        if (!(*step > 0) || *step > 1.0 / L * (1 + 1e-12))
            throw std::invalid_argument("config: step must satisfy s in (0, 1/L]");
    }
    parse_forcing(forcing);  // throws on malformed descriptor
}

Forcing parse_forcing(const std::string& text) {
    if (text.empty() || text == "none" || text == "zero") return Forcing::zero();
    if (text.rfind("power:", 0) == 0) {
        std::string body = text.substr(6);
        auto comma = body.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("forcing descriptor: expected power:<c>,<q>");
        double c = std::stod(body.substr(0, comma));
        double q = std::stod(body.substr(comma + 1));
        return Forcing::power_decay(c, q);
    }
    throw std::invalid_argument("forcing descriptor: unknown kind '" + text + "'");
}

PerturbationSchedule parse_perturbation(const std::string& text) {
    if (text.empty() || text == "none" || text == "zero") return PerturbationSchedule::none();
    if (text.rfind("power:", 0) == 0) {
        std::string body = text.substr(6);
        auto comma = body.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("perturbation descriptor: expected power:<c>,<q>");
        double c = std::stod(body.substr(0, comma));
        double q = std::stod(body.substr(comma + 1));
        return PerturbationSchedule::power_decay(c, q);
    }
    throw std::invalid_argument("perturbation descriptor: unknown kind '" + text + "'");
}

namespace {

std::string alpha_tag(double alpha) {
    std::ostringstream os;
    os << "alpha" << alpha;
    std::string s = os.str();
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

struct EntryOutput {
    std::vector<std::pair<std::string, std::string>> files;  // relative path, content
    std::size_t violations = 0;
    RegimeRow row;
};

EntryOutput run_entry(const ExperimentConfig& cfg, double alpha) {
    const ProblemSpec& spec = problem_by_id(cfg.problem_id);
    EntryOutput out;
    out.row.alpha = alpha;
    out.row.value_rate_theory = std::min(2.0 * alpha / 3.0, 2.0);
    out.row.little_o = alpha > 3.0;
    out.row.speed_rate_theory = alpha >= 3.0 ? 1.0 : std::max((alpha - 1.0) / 2.0 - 0.05, 0.0);
    const std::string tag = alpha_tag(alpha);
    Vec x0 = cfg.start ? *cfg.start : default_start(spec);

    if (cfg.mode != RunMode::Discrete && !spec.has_nonsmooth()) {
        Forcing forcing = parse_forcing(cfg.forcing);
        IntegrateOptions opts;
        opts.num_samples = cfg.samples;
        Trajectory traj =
            integrate(spec, alpha, x0, zeros(x0.size()), 1.0, cfg.t_end, cfg.tol, forcing, opts);
        out.files.emplace_back("trajectory_" + tag + ".csv", trajectory_to_csv(traj));

        DiagnosticSeries W = global_energy_W(traj, spec);
        out.files.emplace_back("energy_W_" + tag + ".csv", series_to_csv(W));
        out.violations += W.monotone_violations.size();

        if (spec.argmin_set) {
            Vec z = spec.argmin_set->project(x0);
            DiagnosticSeries E =
                forcing.is_zero()
                    ? energy_E(traj, spec, z, LyapunovParams::family_a_default(alpha))
                    : perturbed_energy_E(traj, spec, z, forcing);
            out.files.emplace_back("energy_E_" + tag + ".csv", series_to_csv(E));
            out.files.emplace_back("violations_E_" + tag + ".json",
                                   violations_to_json(E.name, E.monotone_violations));
            out.violations += E.monotone_violations.size();
        }
        double p = std::min(1.0, alpha / 3.0);
        DiagnosticSeries G = scaled_energy_Gamma(traj, spec, p);
        out.files.emplace_back("energy_Gamma_" + tag + ".csv", series_to_csv(G));

        RateReport values = verify_value_rate(traj, spec, alpha);
        RateReport speed = verify_speed_rate(traj, alpha);
        out.files.emplace_back("rate_values_" + tag + ".json", rate_report_to_json(values));
        out.files.emplace_back("rate_speed_" + tag + ".json", rate_report_to_json(speed));
        if (!values.bound_satisfied) ++out.violations;

        double pint = 0.9 * std::min(1.0, alpha / 3.0);
        IntegralEstimate ip = integral_estimate(traj, spec, pint, IntegralKind::Values);
        double pspd = alpha >= 3.0 ? 1.0 : alpha - 2.0 - 0.1;
        IntegralEstimate jp = integral_estimate(traj, spec, pspd, IntegralKind::Speed);
        if (ip.below_bound && !*ip.below_bound) ++out.violations;

        out.row.value_exponent_fitted = values.fitted_exponent;
        out.row.value_bound_ok = values.bound_satisfied;
        out.row.integral_values = ip.quadrature;
        out.row.integral_below_bound = ip.below_bound.value_or(false);
        out.row.speed_sup_tail = speed.bound_constant;
        out.row.integral_speed = jp.quadrature;
    }

    if (cfg.mode != RunMode::Continuous) {
        double s = cfg.step ? *cfg.step : 1.0 / spec.smooth.lipschitz_bound;
        PerturbationSchedule pert = parse_perturbation(cfg.forcing);
        IterateLog log = run_ifb(spec, alpha, s, x0, cfg.iterations, pert);
        out.files.emplace_back("iterates_" + tag + ".csv", iterates_to_csv(log));

        auto wv = verify_energy_decay(log, spec);
        out.violations += wv.size();
        if (spec.argmin_set) {
            Vec z = spec.argmin_set->project(x0);
            auto av = verify_anchor_inequality(log, spec, z);
            out.violations += av.size();

            double pmax = std::min({1.0, alpha / 3.0, (alpha + 1.0) / 4.0});
            DiscreteEnergies de = discrete_lyapunov(log, spec, z, 0.9 * pmax);
            if (alpha == 3.0) {
                DiagnosticSeries crit = critical_energy(log, spec, z);
                out.violations += crit.monotone_violations.size();
                out.files.emplace_back("energies_" + tag + ".csv", energies_to_csv(de, &crit));
            } else {
                out.files.emplace_back("energies_" + tag + ".csv", energies_to_csv(de));
            }
        }
        double preq = std::min(2.0 * alpha / 3.0 - 0.1, 1.9);
        RateReport dv = pert.is_none() ? verify_value_rate(log, spec, preq)
                                       : verify_perturbed_rate(log, spec, pert, preq);
        out.files.emplace_back("rate_discrete_" + tag + ".json", rate_report_to_json(dv));
        if (cfg.mode == RunMode::Discrete) {
            out.row.value_exponent_fitted = dv.fitted_exponent;
            out.row.value_bound_ok = dv.bound_satisfied;
        }
    }
    return out;
}

}  // namespace

std::string report_regime_table(const std::vector<RegimeRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("report_regime_table: no rows");
    std::ostringstream os;
    os << "alpha,value_rate_theory,value_exponent_fitted,value_bound_ok,little_o,"
          "I_p,I_p_below_bound,speed_rate_theory,speed_sup_tail,J_p\n";
    for (const auto& r : rows) {
        os << format_double(r.alpha) << ',' << format_double(r.value_rate_theory) << ','
           << format_double(r.value_exponent_fitted) << ',' << (r.value_bound_ok ? 1 : 0) << ','
           << (r.little_o ? 1 : 0) << ',' << format_double(r.integral_values) << ','
           << (r.integral_below_bound ? 1 : 0) << ',' << format_double(r.speed_rate_theory) << ','
           << format_double(r.speed_sup_tail) << ',' << format_double(r.integral_speed) << "\n";
    }
    return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);

    std::vector<EntryOutput> outputs(config.alpha_grid.size());
    const int workers = std::min<int>(config.workers, static_cast<int>(config.alpha_grid.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < config.alpha_grid.size(); ++i)
            outputs[i] = run_entry(config, config.alpha_grid[i]);
    } else {
        std::vector<std::future<EntryOutput>> futs;
        futs.reserve(config.alpha_grid.size());
        for (std::size_t i = 0; i < config.alpha_grid.size(); ++i)
            futs.push_back(std::async(std::launch::async, run_entry, std::cref(config),
                                      config.alpha_grid[i]));
        for (std::size_t i = 0; i < futs.size(); ++i) outputs[i] = futs[i].get();
    }

    // single collector writes everything in grid order
    ExperimentResult result;
    for (auto& o : outputs) {
        for (auto& [rel, content] : o.files) {
            fs::path p = fs::path(config.output_dir) / rel;
            write_file(p.string(), content);
            result.files_written.push_back(p.string());
        }
        result.violation_count += o.violations;
        result.rows.push_back(o.row);
    }
    std::string table = report_regime_table(result.rows);
    fs::path p = fs::path(config.output_dir) / "regime_table.csv";
    write_file(p.string(), table);
    result.files_written.push_back(p.string());
    return result;
}

}  // namespace avd
