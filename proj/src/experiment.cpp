#include "kbgk/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kbgk {

namespace {

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.solver.right.e = 2.0;
    apply_preset(cfg, 1);
    cfg.test_preset = 0;
    return cfg;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("config key '" + key + "': expected a boolean, got '" + v + "'");
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& val) {
    SolverConfig& s = cfg.solver;
    if (key == "preset") return;  // handled in a first pass
    else if (key == "cfl") s.cfl = parse_double(key, val);
    else if (key == "t_final") s.t_final = parse_double(key, val);
    else if (key == "nx") s.n_x = static_cast<int>(parse_int(key, val));
    else if (key == "nv") s.n_v = static_cast<int>(parse_int(key, val));
    else if (key == "vmax") s.v_max = parse_double(key, val);
    else if (key == "a") s.domain_a = parse_double(key, val);
    else if (key == "b") s.domain_b = parse_double(key, val);
    else if (key == "diaphragm") s.diaphragm = parse_double(key, val);
    else if (key == "tau_mode") {
        if (val == "constant") s.tau_mode = TauMode::constant;
        else if (val == "variable") s.tau_mode = TauMode::variable;
        else throw std::runtime_error("config key 'tau_mode': expected constant|variable");
    } else if (key == "reconstruction") {
        if (val == "spline") s.reconstruction = Reconstruction::spline;
        else if (val == "mls") s.reconstruction = Reconstruction::mls;
        else throw std::runtime_error("config key 'reconstruction': expected spline|mls");
    } else if (key == "maxwellian") {
        if (val == "continuous") s.maxwellian_mode = MaxwellianMode::continuous;
        else if (val == "discrete") s.maxwellian_mode = MaxwellianMode::discrete;
        else throw std::runtime_error("config key 'maxwellian': expected continuous|discrete");
    } else if (key == "grid") {
        if (val == "regular") s.jittered_grid = false;
        else if (val == "jittered") s.jittered_grid = true;
        else throw std::runtime_error("config key 'grid': expected regular|jittered");
    }
    else if (key == "mls_alpha") s.mls_alpha = parse_double(key, val);
    else if (key == "mls_radius_factor") s.mls_radius_factor = parse_double(key, val);
    else if (key == "upwind") s.upwind_stencil = parse_bool(key, val);
    else if (key == "seed") s.rng_seed = static_cast<std::uint64_t>(parse_int(key, val));
    else if (key == "rho_l") s.left.rho = parse_double(key, val);
    else if (key == "rho_r") s.right.rho = parse_double(key, val);
    else if (key == "e_l") s.left.e = parse_double(key, val);
    else if (key == "e_r") s.right.e = parse_double(key, val);
    else if (key == "ux_l") s.left.U[0] = parse_double(key, val);
    else if (key == "ux_r") s.right.U[0] = parse_double(key, val);
    else if (key == "lambda_l") s.lambda_l = parse_double(key, val);
    else if (key == "lambda_r") s.lambda_r = parse_double(key, val);
    else if (key == "tau_l") s.tau_l_override = parse_double(key, val);
    else if (key == "tau_r") s.tau_r_override = parse_double(key, val);
    else if (key == "R") s.gas.R = parse_double(key, val);
    else if (key == "diameter") s.gas.d = parse_double(key, val);
    else if (key == "kB") s.gas.k_B = parse_double(key, val);
    else if (key == "output_dir") cfg.output_dir = val;
    else if (key == "emit_reference") cfg.emit_reference = parse_bool(key, val);
    else throw std::runtime_error("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> parse_pairs(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return pairs;
}

double trapezoid_weight(const std::vector<ProfilePoint>& p, std::size_t i) {
    const std::size_t n = p.size();
    if (i == 0) return 0.5 * (p[1].x - p[0].x);
    if (i == n - 1) return 0.5 * (p[n - 1].x - p[n - 2].x);
    return 0.5 * (p[i + 1].x - p[i - 1].x);
}

}  // namespace

void apply_preset(RunConfig& cfg, int preset) {
    SolverConfig& s = cfg.solver;
    cfg.test_preset = preset;
    switch (preset) {
        case 1:
        case 2:
            s.left.rho = 1e-4;
            s.right.rho = 0.125e-4;
            s.lambda_l = 0.001;
            s.lambda_r = 0.008;
            s.n_x = 200;
            break;
        case 3:
        case 4:
            s.left.rho = 5e-6;
            s.right.rho = 0.625e-6;
            s.lambda_l = 0.02;
            s.lambda_r = 0.17;
            s.n_x = 200;
            break;
        case 5:
            s.left.rho = 1e-5;
            s.right.rho = 0.125e-5;
            s.lambda_l = 0.01;
            s.lambda_r = 0.08;
            s.n_x = 400;
            break;
        case 6:
            s.left.rho = 1.0;
            s.right.rho = 0.125;
            s.lambda_l = 1e-7;
            s.lambda_r = 8e-7;
            s.n_x = 800;
            cfg.emit_reference = true;
            break;
        case 7:
            apply_preset(cfg, 6);
            cfg.test_preset = 7;
            s.maxwellian_mode = MaxwellianMode::discrete;
            s.n_v = 13;
            break;
        default:
            throw std::runtime_error("unknown preset " + std::to_string(preset) +
                                     " (expected 1..7)");
    }
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg = default_run_config();
    auto pairs = parse_pairs(text);

    for (const auto& [key, val] : pairs)
        if (key == "preset") apply_preset(cfg, static_cast<int>(parse_int(key, val)));
    for (const auto& [key, val] : pairs) apply_key(cfg, key, val);

    cfg.solver.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ExperimentResult run_experiment(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    SemiLagrangianSolver solver(cfg.solver);

    ExperimentResult res;
    try {
        solver.run_to_final();
    } catch (const std::exception& ex) {
        res.failed = true;
        res.error = ex.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    res.wall_clock_s = std::chrono::duration<double>(t1 - t0).count();
    res.diagnostics = solver.diagnostics_history();

    const auto& xs = solver.xgrid().points;
    const auto& macro = solver.macro();
    res.profile.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        res.profile.push_back({xs[i], macro[i].rho, macro[i].U[0], macro[i].T, macro[i].p});
    return res;
}

EulerState euler_state_from_side(const SideState& s, double gamma) {
    return {s.rho, s.U[0], (gamma - 1.0) * s.rho * s.e};
}

std::vector<ProfilePoint> euler_reference(const RunConfig& cfg, double gamma) {
    const SolverConfig& s = cfg.solver;
    EulerState l = euler_state_from_side(s.left, gamma);
    EulerState r = euler_state_from_side(s.right, gamma);

    PhysicalGrid xg = build_regular_grid(s.domain_a, s.domain_b, s.n_x);
    if (s.jittered_grid) xg = jitter_grid(xg, s.rng_seed);

    auto states = sample_solution(l, r, gamma, s.diaphragm, s.t_final, xg.points);
    std::vector<ProfilePoint> out;
    out.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const EulerState& e = states[i];
        // T from p = rho R T, matching the kinetic output columns.
        out.push_back({xg.points[i], e.rho, e.u, e.p / (e.rho * s.gas.R), e.p});
    }
    return out;
}

ErrorNorms error_norms(const std::vector<ProfilePoint>& a,
                       const std::vector<ProfilePoint>& b, const RunConfig& cfg) {
    if (a.size() != b.size())
        throw std::runtime_error("error_norms: profile lengths differ");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i].x - b[i].x) > 1e-12)
            throw std::runtime_error("error_norms: x coordinates differ at index " +
                                     std::to_string(i));

    const SolverConfig& s = cfg.solver;
    const double R = s.gas.R;
    ErrorNorms n;
    n.rho.jump = std::abs(s.left.rho - s.right.rho);
    n.T.jump = std::abs((2.0 / 3.0) * (s.left.e - s.right.e) / R);
    n.p.jump = std::abs((2.0 / 3.0) * (s.left.rho * s.left.e - s.right.rho * s.right.e));

    // The initial velocity jump is zero in Sod data; normalize by the
    // velocity range the two profiles actually span.
    double umin = a[0].ux, umax = a[0].ux;
    for (const auto& p : a) { umin = std::min(umin, p.ux); umax = std::max(umax, p.ux); }
    for (const auto& p : b) { umin = std::min(umin, p.ux); umax = std::max(umax, p.ux); }
    n.ux.jump = umax - umin;

    for (std::size_t i = 0; i < a.size(); ++i) {
        const double w = trapezoid_weight(a, i);
        auto acc = [&](FieldNorms& f, double da) {
            da = std::abs(da);
            f.l1 += da * w;
            f.linf = std::max(f.linf, da);
        };
        acc(n.rho, a[i].rho - b[i].rho);
        acc(n.ux, a[i].ux - b[i].ux);
        acc(n.T, a[i].T - b[i].T);
        acc(n.p, a[i].p - b[i].p);
    }
    return n;
}

std::string csv_basename(const RunConfig& cfg) {
    const SolverConfig& s = cfg.solver;
    std::string preset =
        cfg.test_preset > 0 ? "preset" + std::to_string(cfg.test_preset) : "custom";
    std::string rec = s.reconstruction == Reconstruction::spline ? "spline" : "mls";
    std::string max = s.maxwellian_mode == MaxwellianMode::continuous ? "continuous" : "discrete";
    return preset + "_" + rec + "_" + max + "_nv" + std::to_string(s.n_v);
}

void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& profile) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    std::fprintf(f, "x,rho,ux,T,p\n");
    for (const auto& p : profile)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", p.x, p.rho, p.ux, p.T, p.p);
    std::fclose(f);
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<StepDiagnostics>& diags) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    std::fprintf(f, "t,total_mass,min_f,max_f,max_moment_mismatch,"
                    "dmax_solves,dmax_total_iterations,dmax_max_iterations,dmax_fallbacks\n");
    for (const auto& d : diags)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%ld,%d,%d\n", d.t, d.total_mass,
                     d.min_f, d.max_f, d.max_moment_mismatch, d.dmax_solves,
                     d.dmax_total_iterations, d.dmax_max_iterations, d.dmax_fallbacks);
    std::fclose(f);
}

std::vector<ProfilePoint> read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line) != "x,rho,ux,T,p")
        throw std::runtime_error("'" + path + "': expected header x,rho,ux,T,p");
    std::vector<ProfilePoint> out;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        ProfilePoint p;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &p.x, &p.rho, &p.ux, &p.T,
                        &p.p) != 5)
            throw std::runtime_error("'" + path + "': malformed row '" + line + "'");
        out.push_back(p);
    }
    return out;
}

}  // namespace kbgk
