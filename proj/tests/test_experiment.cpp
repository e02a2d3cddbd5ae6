#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>

#include "avd/experiment.hpp"
#include "avd/io.hpp"
#include "doctest.h"

using namespace avd;
namespace fs = std::filesystem;

namespace {
ExperimentConfig base_config(const std::string& dir) {
    ExperimentConfig cfg;
    cfg.problem_id = "quadratic";
    cfg.mode = RunMode::Continuous;
    cfg.alpha_grid = {3.0};
    cfg.t_end = 50.0;
    cfg.tol = 1e-6;
    cfg.samples = 500;
    cfg.output_dir = dir;
    return cfg;
}
}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig cfg = base_config("/tmp/avd_test_cfg");
    CHECK_NOTHROW(cfg.validate());
    ExperimentConfig bad = cfg;
    bad.alpha_grid.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.problem_id = "nope";
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.mode = RunMode::Discrete;
    bad.step = 2.0;  // > 1/L for the quadratic
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.forcing = "wavelet:1";
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("forcing and perturbation descriptors parse") {
    Forcing f = parse_forcing("power:0.1,2.5");
    CHECK(f.kind == Forcing::Kind::PowerDecay);
    CHECK(f.c == doctest::Approx(0.1));
    CHECK(f.q == doctest::Approx(2.5));
    CHECK(parse_forcing("none").is_zero());
    CHECK(parse_perturbation("power:0.1,2.7").q == doctest::Approx(2.7));
    CHECK_THROWS_AS(parse_forcing("power:1"), std::invalid_argument);
}

TEST_CASE("reruns produce byte-identical artifacts") {
    std::string d1 = "/tmp/avd_test_rerun1", d2 = "/tmp/avd_test_rerun2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    ExperimentConfig cfg = base_config(d1);
    cfg.mode = RunMode::Both;
    cfg.iterations = 2000;
    ExperimentResult r1 = run_experiment(cfg);
    cfg.output_dir = d2;
    ExperimentResult r2 = run_experiment(cfg);
    REQUIRE(r1.files_written.size() == r2.files_written.size());
    CHECK(r1.violation_count == 0);
    for (std::size_t i = 0; i < r1.files_written.size(); ++i) {
        std::string a = read_file(r1.files_written[i]);
        std::string b = read_file(r2.files_written[i]);
        CHECK(a == b);
    }
}

TEST_CASE("workers do not change the artifacts") {
    std::string d1 = "/tmp/avd_test_w1", d2 = "/tmp/avd_test_w2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    ExperimentConfig cfg = base_config(d1);
    cfg.alpha_grid = {2.0, 3.0, 4.0};
    cfg.workers = 1;
    run_experiment(cfg);
    cfg.output_dir = d2;
    cfg.workers = 3;
    run_experiment(cfg);
    for (const auto& e : fs::directory_iterator(d1)) {
        std::string rel = e.path().filename().string();
        CHECK(read_file((fs::path(d2) / rel).string()) == read_file(e.path().string()));
    }
}

TEST_CASE("full pipeline row on the critical quadratic") {
    std::string dir = "/tmp/avd_test_pipeline";
    fs::remove_all(dir);
    ExperimentConfig cfg = base_config(dir);
    cfg.t_end = 1e3;
    cfg.tol = 1e-9;
    cfg.samples = 20000;
    ExperimentResult res = run_experiment(cfg);
    CHECK(res.violation_count == 0);
    REQUIRE(res.rows.size() == 1);
    const RegimeRow& row = res.rows[0];
    CHECK(row.value_rate_theory == doctest::Approx(2.0));
    CHECK(std::abs(row.value_exponent_fitted + 3.0) <= 0.25);
    CHECK(row.value_bound_ok);
    CHECK(row.integral_below_bound);
    CHECK(fs::exists(fs::path(dir) / "regime_table.csv"));
    CHECK(fs::exists(fs::path(dir) / "trajectory_alpha3.csv"));
}

TEST_CASE("trajectory and iterate CSV round trips") {
    const ProblemSpec& quad = problem_by_id("quadratic");
    IntegrateOptions o;
    o.num_samples = 50;
    Trajectory t = integrate(quad, 2.5, {1.0}, {0.0}, 1.0, 20.0, 1e-7, Forcing::zero(), o);
    Trajectory back = trajectory_from_csv(trajectory_to_csv(t));
    CHECK(back.problem_name == "quadratic");
    CHECK(back.alpha == t.alpha);
    CHECK(back.integrator_tolerance == t.integrator_tolerance);
    REQUIRE(back.times.size() == t.times.size());
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        CHECK(back.times[i] == t.times[i]);  // %.17g round-trips doubles exactly
        CHECK(back.positions[i][0] == t.positions[i][0]);
        CHECK(back.velocities[i][0] == t.velocities[i][0]);
    }

    IterateLog log = run_ifb(quad, 3.0, 1.0, {2.0}, 100);
    IterateLog lback = iterates_from_csv(iterates_to_csv(log));
    CHECK(lback.s == log.s);
    REQUIRE(lback.xs.size() == log.xs.size());
    for (std::size_t k = 0; k < log.xs.size(); ++k) {
        CHECK(lback.xs[k][0] == log.xs[k][0]);
        CHECK(lback.values[k] == log.values[k]);
    }
}

TEST_CASE("regime table rows") {
    std::vector<RegimeRow> rows(3);
    rows[0].alpha = 1.5;
    rows[0].value_rate_theory = std::min(2.0 * 1.5 / 3.0, 2.0);
    rows[1].alpha = 3.0;
    rows[1].value_rate_theory = std::min(2.0 * 3.0 / 3.0, 2.0);
    rows[2].alpha = 4.0;
    rows[2].value_rate_theory = std::min(2.0 * 4.0 / 3.0, 2.0);
    rows[2].little_o = true;
    std::string csv = report_regime_table(rows);
    CHECK(csv.find("\n1.5,1,") != std::string::npos);
    CHECK(csv.find("\n3,2,") != std::string::npos);
    CHECK(csv.find("\n4,2,") != std::string::npos);
    // little-o flag column set only on the last row
    CHECK(csv.find("4,2,0,0,1,") != std::string::npos);
    CHECK_THROWS_AS(report_regime_table({}), std::invalid_argument);
}

TEST_CASE("discrete mode artifacts include energies") {
    std::string dir = "/tmp/avd_test_disc";
    fs::remove_all(dir);
    ExperimentConfig cfg = base_config(dir);
    cfg.problem_id = "lasso-small";
    cfg.mode = RunMode::Discrete;
    cfg.alpha_grid = {3.0};
    cfg.iterations = 3000;
    ExperimentResult res = run_experiment(cfg);
    CHECK(res.violation_count == 0);
    CHECK(fs::exists(fs::path(dir) / "iterates_alpha3.csv"));
    CHECK(fs::exists(fs::path(dir) / "energies_alpha3.csv"));
    std::string csv = read_file((fs::path(dir) / "energies_alpha3.csv").string());
    CHECK(csv.rfind("k,W,h,E,E_tilde,E_crit", 0) == 0);  // critical column at alpha=3
}
