#pragma once

#include <span>
#include <vector>

#include "kbgk/core.hpp"

namespace kbgk {

/// Macroscopic state at one spatial point.
struct MacroState {
    double rho = 0.0;
    Vec3 U{0.0, 0.0, 0.0};
    double T = 0.0;
    double e = 0.0;   // specific internal energy, e = (3/2) R T
    double E = 0.0;   // total energy density, rho e = E - 1/2 rho |U|^2
    double p = 0.0;   // p = rho R T
};

/// Conservative moments (rho, rho U, E).
struct Moments {
    double rho = 0.0;
    Vec3 rhoU{0.0, 0.0, 0.0};
    double E = 0.0;
};

/// Distribution values indexed (space point, v_x, v_y, v_z), space-major,
/// velocity cube contiguous per point.
struct DistributionField {
    PhysicalGrid xgrid;
    VelocityGrid vgrid;
    std::vector<double> values;

    std::span<double> cube(int i) {
        std::size_t n = vgrid.cube_size();
        return {values.data() + static_cast<std::size_t>(i) * n, n};
    }
    std::span<const double> cube(int i) const {
        std::size_t n = vgrid.cube_size();
        return {values.data() + static_cast<std::size_t>(i) * n, n};
    }
};

/// Plain node sums times dv^3 over all (N_v+1)^3 nodes.
Moments compute_moments(std::span<const double> cube, const VelocityGrid& vgrid);

/// Recover (U, e, T, p) from conservative moments. Throws on nonpositive
/// density or nonpositive derived temperature; never clamps.
MacroState macro_from_moments(const Moments& m, double R);

MacroState macro_from_primitive(double rho, const Vec3& U, double e, double R);

/// M(v) = rho / (2 pi R T)^{3/2} exp(-|v - U|^2 / (2 R T))
double eval_maxwellian(const MacroState& state, const Vec3& v, double R);

/// Fill a velocity cube with the Maxwellian of `state`, factored per axis.
void fill_maxwellian_cube(const MacroState& state, const VelocityGrid& vgrid,
                          double R, std::span<double> out);

DistributionField init_maxwellian_field(const std::vector<MacroState>& macro,
                                        const PhysicalGrid& xgrid,
                                        const VelocityGrid& vgrid, double R);

}  // namespace kbgk
