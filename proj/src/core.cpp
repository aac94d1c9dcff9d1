#include "kbgk/core.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace kbgk {

VelocityGrid build_velocity_grid(double v_max, int n_v) {
    if (v_max <= 0.0)
        throw std::invalid_argument("build_velocity_grid: v_max must be positive");
    if (n_v < 2)
        throw std::invalid_argument("build_velocity_grid: N_v must be >= 2 to bracket zero velocity");

    VelocityGrid g;
    g.v_max = v_max;
    g.n_intervals = n_v;
    g.dv = 2.0 * v_max / n_v;
    g.nodes.resize(n_v + 1);
    // Fill half and mirror so nodes[j] == -nodes[n_v - j] bit-exactly.
    for (int j = 0; 2 * j <= n_v; ++j) {
        double v = -v_max + j * g.dv;
        g.nodes[j] = v;
        g.nodes[n_v - j] = -v;
    }
    if (n_v % 2 == 0) g.nodes[n_v / 2] = 0.0;
    return g;
}

PhysicalGrid build_regular_grid(double a, double b, int n_x) {
    if (!(a < b))
        throw std::invalid_argument("build_regular_grid: need a < b");
    if (n_x < 2)
        throw std::invalid_argument("build_regular_grid: need N_x >= 2");

    PhysicalGrid g;
    g.a = a;
    g.b = b;
    g.points.resize(n_x + 1);
    double dx = (b - a) / n_x;
    for (int i = 0; i <= n_x; ++i) g.points[i] = a + i * dx;
    g.points.front() = a;
    g.points.back() = b;
    g.dx_avg = (b - a) / n_x;
    return g;
}

PhysicalGrid jitter_grid(const PhysicalGrid& grid, std::uint64_t seed) {
    PhysicalGrid out = grid;
    const int n = grid.count();
    if (n < 3) return out;
    const double dx = grid.dx_avg;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    for (int sweep = 0; sweep < 2; ++sweep) {
        for (int i = 1; i < n - 1; ++i)
            out.points[i] += (dx / 4.0) * uni(rng);
        for (int i = 0; i < n - 1; ++i)
            if (!(out.points[i] < out.points[i + 1]))
                throw std::runtime_error("jitter_grid: ordering broken");
    }
    return out;
}

double mean_free_path(double rho, const GasConstants& gas) {
    if (rho <= 0.0)
        throw std::invalid_argument("mean_free_path: rho must be positive");
    return gas.k_B / (std::sqrt(2.0) * M_PI * rho * gas.R * gas.d * gas.d);
}

double relaxation_time(double lambda, double T, double R) {
    if (lambda <= 0.0 || T <= 0.0)
        throw std::invalid_argument("relaxation_time: lambda and T must be positive");
    double cbar = std::sqrt(8.0 * R * T / M_PI);
    return 4.0 * lambda / (M_PI * cbar);
}

void SolverConfig::validate() const {
    if (cfl <= 0.0) throw std::invalid_argument("SolverConfig: cfl must be > 0");
    if (n_v < 2) throw std::invalid_argument("SolverConfig: N_v must be >= 2");
    if (n_x < 2) throw std::invalid_argument("SolverConfig: N_x must be >= 2");
    if (v_max <= 0.0) throw std::invalid_argument("SolverConfig: v_max must be > 0");
    if (!(domain_a < domain_b)) throw std::invalid_argument("SolverConfig: need a < b");
    if (t_final <= 0.0) throw std::invalid_argument("SolverConfig: t_final must be > 0");
    if (mls_alpha <= 0.0) throw std::invalid_argument("SolverConfig: mls_alpha must be > 0");
    if (mls_radius_factor < 1.0)
        throw std::invalid_argument("SolverConfig: mls_radius_factor must be >= 1");
    if (left.rho <= 0.0 || right.rho <= 0.0)
        throw std::invalid_argument("SolverConfig: densities must be positive");
    if (left.e <= 0.0 || right.e <= 0.0)
        throw std::invalid_argument("SolverConfig: internal energies must be positive");
    if (lambda_l <= 0.0 || lambda_r <= 0.0)
        throw std::invalid_argument("SolverConfig: mean free paths must be positive");
    // Radius must admit at least an anchor plus one neighbor.
    double dx = (domain_b - domain_a) / n_x;
    if (mls_radius_factor * dx < dx)
        throw std::invalid_argument("SolverConfig: MLS radius too small for a 2-point stencil");
}

}  // namespace kbgk
