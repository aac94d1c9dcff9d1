#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kbgk/core.hpp"
#include "kbgk/riemann.hpp"
#include "kbgk/solver.hpp"

namespace kbgk {

struct RunConfig {
    SolverConfig solver;
    int test_preset = 0;           // 0 = custom, 1..7 = paper tests
    std::string output_dir = ".";
    bool emit_reference = false;   // exact Euler profile alongside
};

/// Sets the fields a paper test pins; everything else keeps its current
/// value so explicit keys override preset values.
void apply_preset(RunConfig& cfg, int preset);

/// Flat key=value text; '#' starts a comment. Unknown keys and type errors
/// are reported with the offending key.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

struct ProfilePoint {
    double x = 0.0;
    double rho = 0.0;
    double ux = 0.0;
    double T = 0.0;
    double p = 0.0;
};

struct ExperimentResult {
    std::vector<ProfilePoint> profile;
    std::vector<StepDiagnostics> diagnostics;
    double wall_clock_s = 0.0;
    bool failed = false;       // solver abort; profile holds the last state
    std::string error;
};

ExperimentResult run_experiment(const RunConfig& cfg);

/// Exact Euler reference for the same config, sampled at the kinetic grid.
/// The kinetic and Euler runs consume one config block: p = (gamma-1) rho e.
std::vector<ProfilePoint> euler_reference(const RunConfig& cfg,
                                          double gamma = 5.0 / 3.0);

EulerState euler_state_from_side(const SideState& s, double gamma = 5.0 / 3.0);

struct FieldNorms {
    double l1 = 0.0;     // sum |delta| dx_i
    double linf = 0.0;
    double jump = 0.0;   // |left - right| of the field's initial states
};

struct ErrorNorms {
    FieldNorms rho, ux, T, p;
};

/// Both profiles must share x-coordinates.
ErrorNorms error_norms(const std::vector<ProfilePoint>& a,
                       const std::vector<ProfilePoint>& b, const RunConfig& cfg);

std::string csv_basename(const RunConfig& cfg);
void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& profile);
void write_diagnostics_csv(const std::string& path,
                           const std::vector<StepDiagnostics>& diags);
std::vector<ProfilePoint> read_profile_csv(const std::string& path);

}  // namespace kbgk
