#include "avd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace avd {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

// metadata row: "# key=value key=value ..."
std::map<std::string, std::string> parse_meta(const std::string& line) {
    std::map<std::string, std::string> meta;
    std::istringstream is(line);
    std::string tok;
    is >> tok;  // '#'
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq != std::string::npos) meta[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return meta;
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream os;
    int n = traj.dimension();
    os << "# problem=" << traj.problem_name << " alpha=" << format_double(traj.alpha)
       << " tol=" << format_double(traj.integrator_tolerance)
       << " t0=" << format_double(traj.t0) << "\n";
    os << "t";
    for (int d = 1; d <= n; ++d) os << ",x_" << d;
    for (int d = 1; d <= n; ++d) os << ",v_" << d;
    os << "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        os << format_double(traj.times[i]);
        for (int d = 0; d < n; ++d) os << ',' << format_double(traj.positions[i][static_cast<std::size_t>(d)]);
        for (int d = 0; d < n; ++d) os << ',' << format_double(traj.velocities[i][static_cast<std::size_t>(d)]);
        os << "\n";
    }
    return os.str();
}

Trajectory trajectory_from_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line) || line.empty() || line[0] != '#')
        throw std::invalid_argument("trajectory_from_csv: missing metadata row");
    auto meta = parse_meta(line);
    Trajectory traj;
    traj.problem_name = meta.count("problem") ? meta["problem"] : "";
    traj.alpha = meta.count("alpha") ? std::stod(meta["alpha"]) : 0.0;
    traj.integrator_tolerance = meta.count("tol") ? std::stod(meta["tol"]) : 0.0;
    traj.t0 = meta.count("t0") ? std::stod(meta["t0"]) : 1.0;
    if (!std::getline(is, line)) throw std::invalid_argument("trajectory_from_csv: missing header");
    std::size_t cols = split(line, ',').size();
    if (cols < 3 || cols % 2 == 0)
        throw std::invalid_argument("trajectory_from_csv: malformed header");
    std::size_t n = (cols - 1) / 2;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (f.size() != cols) throw std::invalid_argument("trajectory_from_csv: ragged row");
        traj.times.push_back(std::stod(f[0]));
        Vec x(n), v(n);
        for (std::size_t d = 0; d < n; ++d) {
            x[d] = std::stod(f[1 + d]);
            v[d] = std::stod(f[1 + n + d]);
        }
        traj.positions.push_back(std::move(x));
        traj.velocities.push_back(std::move(v));
    }
    return traj;
}

std::string iterates_to_csv(const IterateLog& log) {
    std::ostringstream os;
    int n = log.dimension();
    os << "# problem=" << log.problem_name << " alpha=" << format_double(log.alpha)
       << " s=" << format_double(log.s) << "\n";
    os << "k";
    for (int d = 1; d <= n; ++d) os << ",x_" << d;
    os << ",theta,dx_norm\n";
    for (std::size_t k = 0; k < log.xs.size(); ++k) {
        os << k;
        for (int d = 0; d < n; ++d) os << ',' << format_double(log.xs[k][static_cast<std::size_t>(d)]);
        os << ',' << format_double(log.values[k]);
        os << ',' << format_double(k == 0 ? 0.0 : log.diff_norm(k));
        os << "\n";
    }
    return os.str();
}

IterateLog iterates_from_csv(const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line) || line.empty() || line[0] != '#')
        throw std::invalid_argument("iterates_from_csv: missing metadata row");
    auto meta = parse_meta(line);
    IterateLog log;
    log.problem_name = meta.count("problem") ? meta["problem"] : "";
    log.alpha = meta.count("alpha") ? std::stod(meta["alpha"]) : 0.0;
    log.s = meta.count("s") ? std::stod(meta["s"]) : 0.0;
    if (!std::getline(is, line)) throw std::invalid_argument("iterates_from_csv: missing header");
    std::size_t cols = split(line, ',').size();
    if (cols < 4) throw std::invalid_argument("iterates_from_csv: malformed header");
    std::size_t n = cols - 3;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (f.size() != cols) throw std::invalid_argument("iterates_from_csv: ragged row");
        Vec x(n);
        for (std::size_t d = 0; d < n; ++d) x[d] = std::stod(f[1 + d]);
        log.xs.push_back(std::move(x));
        log.values.push_back(std::stod(f[1 + n]));
    }
    return log;
}

std::string series_to_csv(const DiagnosticSeries& s) {
    std::ostringstream os;
    os << "# series=" << s.name << "\n";
    os << "t,value\n";
    for (std::size_t i = 0; i < s.times.size(); ++i)
        os << format_double(s.times[i]) << ',' << format_double(s.values[i]) << "\n";
    return os.str();
}

std::string energies_to_csv(const DiscreteEnergies& de, const DiagnosticSeries* crit) {
    std::ostringstream os;
    os << "k,W,h,E,E_tilde";
    if (crit) os << ",E_crit";
    os << "\n";
    for (std::size_t k = 1; k < de.W.size(); ++k) {
        os << k << ',' << format_double(de.W[k]) << ',' << format_double(de.h[k]) << ','
           << format_double(de.E[k]) << ',' << format_double(de.E_tilde[k]);
        if (crit) os << ',' << format_double(crit->values[k - 1]);
        os << "\n";
    }
    return os.str();
}

std::string rate_report_to_json(const RateReport& r) {
    nlohmann::json j;
    j["label"] = r.label;
    j["fitted_exponent"] = r.fitted_exponent;
    j["fitted_halfwidth"] = r.fitted_halfwidth;
    j["theoretical_exponent"] = r.theoretical_exponent;
    j["bound_constant"] = r.bound_constant;
    j["bound_satisfied"] = r.bound_satisfied;
    j["window"] = {r.window.lo, r.window.hi};
    j["fit_samples"] = r.fit_samples;
    return j.dump(2);
}

std::string violations_to_json(const std::string& quantity,
                               const std::vector<DiagnosticSeries::Violation>& v) {
    nlohmann::json j;
    j["quantity"] = quantity;
    j["count"] = v.size();
    j["violations"] = nlohmann::json::array();
    for (const auto& x : v)
        j["violations"].push_back({{"index", x.index}, {"magnitude", x.magnitude}});
    return j.dump(2);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace avd
