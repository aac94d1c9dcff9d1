#pragma once

#include <array>
#include <span>
#include <vector>

#include "kbgk/core.hpp"
#include "kbgk/dmaxwell.hpp"
#include "kbgk/interp.hpp"
#include "kbgk/moments.hpp"

namespace kbgk {

/// Diffuse-reflection wall. `normal` is the x-component of the unit normal
/// pointing into the domain: +1 at the left wall, -1 at the right.
struct WallSpec {
    Vec3 U_w{0.0, 0.0, 0.0};
    double T_w = 0.0;
    double normal = 1.0;
    int point_index = 0;
};

double timestep_from_cfl(double cfl, double dx_avg, double v_max);

/// Backward characteristic origin x - v dt; depends on (i, j) only.
double foot_point(double x, double v, double dt);

/// f^{n+1} = (tau f~ + dt M) / (tau + dt), elementwise.
void relax(std::span<const double> f_tilde, std::span<const double> m_new,
           double tau, double dt, std::span<double> out);

/// Wall density of the diffuse-reflection closure: incoming mass flux of
/// f_gamma divided by the outgoing flux of the unit wall Maxwellian.
double wall_density(std::span<const double> f_gamma, const WallSpec& wall,
                    const VelocityGrid& vgrid, double R);

/// Precomputed per-(i, j) reconstruction stencil. Indices >= 0 refer to grid
/// points; -1 and -2 select the left/right wall emission cube (out-of-domain
/// foot points are populated from the wall half-Maxwellian).
struct Stencil {
    std::vector<int> idx;
    std::vector<double> coeff;
};

struct AdvectionPlan {
    double dt = 0.0;
    int n_space = 0;
    int n_vel = 0;
    std::vector<Stencil> stencils;  // (i, j) row-major

    const Stencil& at(int i, int j) const { return stencils[static_cast<std::size_t>(i) * n_vel + j]; }
};

AdvectionPlan build_advection_plan(const PhysicalGrid& xgrid, const VelocityGrid& vgrid,
                                   double dt, Reconstruction method,
                                   const MlsConfig& mls, double h);

/// Semi-Lagrangian transport step: f~[i,jkl] = reconstruction of f[.,jkl]
/// at the foot point of (i, j). Wall cubes supply values for characteristics
/// entering through the boundary; they must be (N_v+1)^3 each.
void advect(const DistributionField& f, const AdvectionPlan& plan,
            const std::array<std::vector<double>, 2>& wall_cubes,
            DistributionField& f_tilde);

/// Maxwellian with the same discrete moments as the given cube. Continuous
/// mode samples the closed form; discrete mode solves the five-parameter
/// moment-matching system.
struct TargetMaxwellian {
    MacroState macro;
    int dmax_iterations = 0;   // 0 in continuous mode
    bool dmax_fallback = false;
};

TargetMaxwellian build_target_maxwellian(std::span<const double> f_tilde_cube,
                                         const VelocityGrid& vgrid, MaxwellianMode mode,
                                         double R, std::span<double> out);

struct StepDiagnostics {
    double t = 0.0;
    double dt = 0.0;
    double total_mass = 0.0;
    double min_f = 0.0;
    double max_f = 0.0;
    double max_moment_mismatch = 0.0;  // relative, f^{n+1} vs f~
    int dmax_solves = 0;
    long dmax_total_iterations = 0;
    int dmax_max_iterations = 0;
    int dmax_fallbacks = 0;
};

class SemiLagrangianSolver {
  public:
    explicit SemiLagrangianSolver(const SolverConfig& cfg);

    /// Advance one step (clipped so t never exceeds t_final). Returns false
    /// when t_final has been reached.
    bool step();
    void run_to_final();

    double time() const { return t_; }
    double nominal_dt() const { return dt_nominal_; }
    const DistributionField& field() const { return f_; }
    const std::vector<MacroState>& macro() const { return macro_; }
    const std::vector<double>& tau_field() const { return tau_; }
    const std::array<double, 2>& wall_densities() const { return rho_w_; }
    const StepDiagnostics& last_diagnostics() const { return diag_; }
    const std::vector<StepDiagnostics>& diagnostics_history() const { return history_; }
    const SolverConfig& config() const { return cfg_; }
    const PhysicalGrid& xgrid() const { return f_.xgrid; }
    const VelocityGrid& vgrid() const { return f_.vgrid; }

    /// Re-applies the diffuse-reflection closure to the wall points of `f`.
    void apply_diffuse_boundary(DistributionField& f);

  private:
    void init_field();
    void init_tau();
    void ensure_plan(double dt);
    void refresh_wall_emission();
    void update_tau_variable();

    SolverConfig cfg_;
    double t_ = 0.0;
    double dt_nominal_ = 0.0;
    DistributionField f_;
    DistributionField f_tilde_;
    std::vector<double> m_cube_;              // scratch Maxwellian cube
    std::vector<MacroState> macro_;
    std::vector<double> tau_;
    std::array<WallSpec, 2> walls_;
    std::array<double, 2> rho_w_{0.0, 0.0};
    std::array<std::vector<double>, 2> wall_unit_cube_;  // unit-density emission
    std::array<std::vector<double>, 2> wall_cube_;       // scaled by rho_w
    AdvectionPlan plan_;
    bool plan_valid_ = false;
    MlsConfig mls_;
    double h_ = 0.0;
    StepDiagnostics diag_;
    std::vector<StepDiagnostics> history_;
};

}  // namespace kbgk
