// Experiment harness for the 1D3V BGK shock-tube solver.
//
//   kbgk run --config sod.cfg [--preset N] [--output DIR] [--seed S] ...
//   kbgk compare --a left.csv --b right.csv

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kbgk/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, int preset, const std::string& output,
            long seed, const std::string& cfl, const std::string& nx,
            const std::string& nv, const std::string& reconstruction,
            const std::string& maxwellian, const std::string& tau_mode,
            const std::string& grid, const std::string& upwind) {
    // Flags override file values by appending to the parsed key list.
    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config file '" << config_path << "'\n";
            return 2;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    if (preset > 0) text += "\npreset = " + std::to_string(preset);
    if (seed >= 0) text += "\nseed = " + std::to_string(seed);
    if (!output.empty()) text += "\noutput_dir = " + output;
    if (!cfl.empty()) text += "\ncfl = " + cfl;
    if (!nx.empty()) text += "\nnx = " + nx;
    if (!nv.empty()) text += "\nnv = " + nv;
    if (!reconstruction.empty()) text += "\nreconstruction = " + reconstruction;
    if (!maxwellian.empty()) text += "\nmaxwellian = " + maxwellian;
    if (!tau_mode.empty()) text += "\ntau_mode = " + tau_mode;
    if (!grid.empty()) text += "\ngrid = " + grid;
    if (!upwind.empty()) text += "\nupwind = " + upwind;

    kbgk::RunConfig cfg = kbgk::parse_config(text);
    std::filesystem::create_directories(cfg.output_dir);

    kbgk::ExperimentResult res = kbgk::run_experiment(cfg);

    const std::string base = (std::filesystem::path(cfg.output_dir) /
                              kbgk::csv_basename(cfg)).string();
    kbgk::write_profile_csv(base + ".csv", res.profile);
    kbgk::write_diagnostics_csv(base + ".diag.csv", res.diagnostics);

    if (cfg.emit_reference) {
        kbgk::write_profile_csv(base + "_euler.csv", kbgk::euler_reference(cfg));
        std::cout << "reference: " << base << "_euler.csv\n";
    }

    std::cout << "profile:   " << base << ".csv\n"
              << "diag:      " << base << ".diag.csv\n"
              << "steps:     " << res.diagnostics.size() << "\n"
              << "wall s:    " << res.wall_clock_s << "\n";

    if (res.failed) {
        std::ofstream marker(base + ".FAILED");
        marker << res.error << "\n";
        std::cerr << "error: run aborted: " << res.error << "\n"
                  << "partial output flushed, marker: " << base << ".FAILED\n";
        return 1;
    }
    return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path) {
    auto a = kbgk::read_profile_csv(a_path);
    auto b = kbgk::read_profile_csv(b_path);
    if (a.size() != b.size()) {
        std::cerr << "error: profiles have different lengths\n";
        return 2;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i].x - b[i].x) > 1e-12) {
            std::cerr << "error: x coordinates differ at row " << i << "\n";
            return 2;
        }
    }

    auto report = [&](const char* name, auto getter) {
        double l1 = 0.0, linf = 0.0, lo = getter(a[0]), hi = lo;
        for (std::size_t i = 0; i < a.size(); ++i) {
            double w;
            if (i == 0) w = 0.5 * (a[1].x - a[0].x);
            else if (i == a.size() - 1) w = 0.5 * (a[i].x - a[i - 1].x);
            else w = 0.5 * (a[i + 1].x - a[i - 1].x);
            const double d = std::abs(getter(a[i]) - getter(b[i]));
            l1 += d * w;
            linf = std::max(linf, d);
            for (const auto& p : {getter(a[i]), getter(b[i])}) {
                lo = std::min(lo, p);
                hi = std::max(hi, p);
            }
        }
        const double range = hi - lo;
        std::printf("%-4s L1 = %.6e  Linf = %.6e  Linf/range = %.6e\n", name, l1, linf,
                    range > 0.0 ? linf / range : 0.0);
    };
    report("rho", [](const kbgk::ProfilePoint& p) { return p.rho; });
    report("ux", [](const kbgk::ProfilePoint& p) { return p.ux; });
    report("T", [](const kbgk::ProfilePoint& p) { return p.T; });
    report("p", [](const kbgk::ProfilePoint& p) { return p.p; });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-Lagrangian BGK shock-tube solver"};
    app.require_subcommand(1);

    // KBGK_THREADS caps worker parallelism; this build runs single-threaded,
    // which satisfies any cap, but the value is still validated.
    if (const char* env = std::getenv("KBGK_THREADS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end == env || n < 1) {
            std::cerr << "error: KBGK_THREADS must be a positive integer\n";
            return 2;
        }
    }

    auto* run = app.add_subcommand("run", "run one experiment");
    std::string config_path, output, cfl, nx, nv, rec, maxw, tau_mode, grid, upwind;
    int preset = 0;
    long seed = -1;
    run->add_option("--config", config_path, "config file (flat key = value)");
    run->add_option("--preset", preset, "paper test preset 1..7");
    run->add_option("--output", output, "output directory");
    run->add_option("--seed", seed, "RNG seed for jittered grids");
    run->add_option("--cfl", cfl, "CFL number");
    run->add_option("--nx", nx, "number of spatial intervals");
    run->add_option("--nv", nv, "velocity intervals per axis");
    run->add_option("--reconstruction", rec, "spline|mls");
    run->add_option("--maxwellian", maxw, "continuous|discrete");
    run->add_option("--tau-mode", tau_mode, "constant|variable");
    run->add_option("--grid", grid, "regular|jittered");
    run->add_option("--upwind", upwind, "true|false");

    auto* compare = app.add_subcommand("compare", "norms between two profile CSVs");
    std::string a_path, b_path;
    compare->add_option("--a", a_path, "first profile")->required();
    compare->add_option("--b", b_path, "second profile")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, preset, output, seed, cfl, nx, nv, rec, maxw,
                           tau_mode, grid, upwind);
        return cmd_compare(a_path, b_path);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
