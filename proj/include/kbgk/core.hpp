#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace kbgk {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec3& a) { return dot(a, a); }

/// Uniform tensor-product velocity grid on [-v_max, v_max]^3.
/// The same 1D node set is shared by the x, y and z axes.
struct VelocityGrid {
    double v_max = 0.0;
    int n_intervals = 0;           // N_v; nodes per axis = N_v + 1
    double dv = 0.0;               // 2 v_max / N_v
    std::vector<double> nodes;     // nodes[j] = -v_max + j dv, mirrored exactly

    int count() const { return n_intervals + 1; }
    std::size_t cube_size() const {
        std::size_t n = static_cast<std::size_t>(count());
        return n * n * n;
    }
};

VelocityGrid build_velocity_grid(double v_max, int n_v);

/// Sorted 1D point set on [a, b], regular or jittered.
struct PhysicalGrid {
    double a = 0.0;
    double b = 0.0;
    std::vector<double> points;    // strictly increasing, endpoints = a, b
    double dx_avg = 0.0;

    int count() const { return static_cast<int>(points.size()); }
    int n_intervals() const { return count() - 1; }
};

PhysicalGrid build_regular_grid(double a, double b, int n_x);

/// Displace interior points by (dx/4) * u, u uniform on [-1, 1], two sweeps.
/// Endpoints stay fixed; monotonicity is verified after each sweep.
PhysicalGrid jitter_grid(const PhysicalGrid& grid, std::uint64_t seed);

struct GasConstants {
    double R = 208.0;              // specific gas constant, J/(kg K)
    double d = 0.368e-9;           // molecular diameter, m (Argon)
    double k_B = 1.3806e-23;       // Boltzmann constant, J/K
};

/// lambda = k_B / (sqrt(2) pi rho R d^2)
double mean_free_path(double rho, const GasConstants& gas);

/// tau = 4 lambda / (pi Cbar), Cbar = sqrt(8 R T / pi)
double relaxation_time(double lambda, double T, double R);

enum class TauMode { constant, variable };
enum class Reconstruction { spline, mls };
enum class MaxwellianMode { continuous, discrete };

/// Initial data on one half of the tube (specific internal energy form).
struct SideState {
    double rho = 1.0;
    Vec3 U{0.0, 0.0, 0.0};
    double e = 2.5;                // specific internal energy, T = (2/3) e / R
};

/// Diffuse wall: velocity and temperature of the re-emitting surface.
struct WallSetting {
    Vec3 U_w{0.0, 0.0, 0.0};
    double T_w = 0.0;
};

struct SolverConfig {
    double cfl = 1.0;
    double t_final = 0.17;
    int n_x = 200;
    int n_v = 20;
    double v_max = 10.0;
    double domain_a = 0.0;
    double domain_b = 1.0;
    double diaphragm = 0.5;

    TauMode tau_mode = TauMode::constant;
    Reconstruction reconstruction = Reconstruction::mls;
    MaxwellianMode maxwellian_mode = MaxwellianMode::continuous;

    double mls_alpha = 6.0;
    double mls_radius_factor = 2.5;
    bool upwind_stencil = false;
    std::uint64_t rng_seed = 0;
    bool jittered_grid = false;

    SideState left;
    SideState right;
    // Mean free paths are first-class inputs; tau is always derived from
    // them through relaxation_time(), never from the lambda formula.
    double lambda_l = 0.001;
    double lambda_r = 0.008;
    // Optional direct overrides for the constant-tau baseline (<= 0: unset).
    double tau_l_override = -1.0;
    double tau_r_override = -1.0;

    WallSetting wall_left;
    WallSetting wall_right;
    bool walls_from_initial_state = true;  // derive T_w from left/right e

    GasConstants gas;

    void validate() const;  // throws std::invalid_argument on bad fields
};

}  // namespace kbgk
