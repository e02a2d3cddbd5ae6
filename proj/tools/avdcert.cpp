#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "avd/experiment.hpp"
#include "avd/io.hpp"

namespace {

namespace fs = std::filesystem;

int run_config(avd::ExperimentConfig& cfg, std::vector<double>& alphas) {
    if (!alphas.empty()) cfg.alpha_grid = alphas;
    if (cfg.alpha_grid.empty()) cfg.alpha_grid = {3.0};
    try {
        avd::ExperimentResult res = avd::run_experiment(cfg);
        std::cout << "wrote " << res.files_written.size() << " files to " << cfg.output_dir
                  << "\n";
        if (res.violation_count > 0) {
            std::cerr << "inequality violations detected: " << res.violation_count << "\n";
            return 2;
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_diagnose(const std::string& input, const std::string& outdir) {
    try {
        std::string csv = avd::read_file(input);
        fs::create_directories(outdir);
        std::size_t violations = 0;
        auto first_line = csv.substr(0, csv.find('\n'));
        if (first_line.find(" s=") != std::string::npos) {
            avd::IterateLog log = avd::iterates_from_csv(csv);
            const avd::ProblemSpec& spec = avd::problem_by_id(log.problem_name);
            auto wv = avd::verify_energy_decay(log, spec);
            violations += wv.size();
            if (spec.argmin_set) {
                avd::Vec z = spec.argmin_set->project(log.xs.front());
                auto av = avd::verify_anchor_inequality(log, spec, z);
                violations += av.size();
                double a = log.alpha;
                double pmax = std::min({1.0, a / 3.0, (a + 1.0) / 4.0});
                avd::DiscreteEnergies de = avd::discrete_lyapunov(log, spec, z, 0.9 * pmax);
                avd::write_file((fs::path(outdir) / "energies.csv").string(),
                                avd::energies_to_csv(de));
            }
            std::cout << "per-step inequality violations: " << violations << "\n";
        } else {
            avd::Trajectory traj = avd::trajectory_from_csv(csv);
            const avd::ProblemSpec& spec = avd::problem_by_id(traj.problem_name);
            avd::DiagnosticSeries W = avd::global_energy_W(traj, spec);
            avd::write_file((fs::path(outdir) / "energy_W.csv").string(), avd::series_to_csv(W));
            violations += W.monotone_violations.size();
            if (spec.argmin_set) {
                avd::Vec z = spec.argmin_set->project(traj.positions.front());
                avd::DiagnosticSeries E = avd::energy_E(
                    traj, spec, z, avd::LyapunovParams::family_a_default(traj.alpha));
                avd::write_file((fs::path(outdir) / "energy_E.csv").string(),
                                avd::series_to_csv(E));
                avd::write_file((fs::path(outdir) / "violations_E.json").string(),
                                avd::violations_to_json(E.name, E.monotone_violations));
                violations += E.monotone_violations.size();
            }
            std::cout << "monotonicity violations: " << violations << "\n";
        }
        return violations == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_report(const std::string& indir, const std::string& outfile) {
    try {
        std::string table = avd::read_file((fs::path(indir) / "regime_table.csv").string());
        if (outfile.empty() || outfile == "-")
            std::cout << table;
        else
            avd::write_file(outfile, table);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convergence-rate experiments for inertial gradient dynamics and the "
                 "inertial forward-backward iteration"};
    app.require_subcommand(1);
    app.fallthrough();

    // Experiment options live on the app so they are shared by the run
    // subcommands and by the key=value config file; flags override the file.
    avd::ExperimentConfig cfg;
    std::vector<double> alphas;
    std::vector<double> x0;
    std::string mode = "both";
    app.add_option("--problem", cfg.problem_id, "catalog problem id")->capture_default_str();
    app.add_option("--alpha", alphas, "damping exponent(s)")->expected(-1);
    app.add_option("--t-end", cfg.t_end, "integration horizon")->capture_default_str();
    app.add_option("--iters", cfg.iterations, "iteration count")->capture_default_str();
    app.add_option("--step", cfg.step, "stepsize s (default 1/L)");
    app.add_option("--tol", cfg.tol, "integrator tolerance")->capture_default_str();
    app.add_option("--forcing", cfg.forcing, "none | power:<c>,<q>")->capture_default_str();
    app.add_option("--out", cfg.output_dir, "output directory")->capture_default_str();
    app.add_option("--workers", cfg.workers, "concurrent sweep entries")->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for randomized searches")->capture_default_str();
    app.add_option("--samples", cfg.samples, "log-uniform sample count")->capture_default_str();
    app.add_option("--mode", mode, "continuous | discrete | both (sweep)")
        ->capture_default_str();
    app.add_option("--x0", x0, "initial point (defaults per problem)")->expected(-1);
    app.set_config("--config", "", "key=value config file (flags override it)");

    auto* simulate = app.add_subcommand("simulate", "integrate the continuous dynamics");
    simulate->fallthrough();
    auto* iterate = app.add_subcommand("iterate", "run the forward-backward iteration");
    iterate->fallthrough();
    auto* sweep = app.add_subcommand("sweep", "run a grid of experiments");
    sweep->fallthrough();

    std::string diag_in, diag_out = "diagnostics";
    auto* diagnose = app.add_subcommand("diagnose", "recompute energies on a saved run");
    diagnose->add_option("--in", diag_in, "trajectory or iterates CSV")->required();
    diagnose->add_option("--out", diag_out, "output directory")->capture_default_str();

    std::string rep_in, rep_out = "-";
    auto* report = app.add_subcommand("report", "print the regime table of a sweep");
    report->add_option("--in", rep_in, "sweep output directory")->required();
    report->add_option("--out", rep_out, "output file ('-' for stdout)")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (!x0.empty()) cfg.start = avd::Vec(x0.begin(), x0.end());

    if (simulate->parsed()) {
        cfg.mode = avd::RunMode::Continuous;
        return run_config(cfg, alphas);
    }
    if (iterate->parsed()) {
        cfg.mode = avd::RunMode::Discrete;
        return run_config(cfg, alphas);
    }
    if (sweep->parsed()) {
        if (mode == "continuous")
            cfg.mode = avd::RunMode::Continuous;
        else if (mode == "discrete")
            cfg.mode = avd::RunMode::Discrete;
        else if (mode == "both")
            cfg.mode = avd::RunMode::Both;
        else {
            std::cerr << "config error: unknown mode '" << mode << "'\n";
            return 1;
        }
        return run_config(cfg, alphas);
    }
    if (diagnose->parsed()) return cmd_diagnose(diag_in, diag_out);
    if (report->parsed()) return cmd_report(rep_in, rep_out);
    return 1;
}
