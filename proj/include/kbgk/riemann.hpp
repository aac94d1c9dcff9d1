#pragma once

#include <span>
#include <vector>

namespace kbgk {

/// Primitive state for the 1D compressible Euler equations.
struct EulerState {
    double rho = 0.0;
    double u = 0.0;
    double p = 0.0;
};

struct StarState {
    double p = 0.0;
    double u = 0.0;
};

/// Two-wave pressure function Phi(p) = f_L(p) + f_R(p) + (u_R - u_L); its
/// root is the star pressure.
double pressure_function(double p, const EulerState& left, const EulerState& right,
                         double gamma);

/// Star pressure/velocity by Newton iteration safeguarded by a bracket,
/// relative tolerance 1e-12. Throws on vacuum-forming data.
StarState star_region(const EulerState& left, const EulerState& right,
                      double gamma = 5.0 / 3.0);

/// Bisection-only root of the pressure function; independent reference path.
StarState star_region_bisection(const EulerState& left, const EulerState& right,
                                double gamma = 5.0 / 3.0, double tol = 1e-13);

/// Self-similar sampling of the exact solution at (x - x0)/t.
std::vector<EulerState> sample_solution(const EulerState& left, const EulerState& right,
                                        double gamma, double x0, double t,
                                        std::span<const double> xs);

EulerState sample_at(const EulerState& left, const EulerState& right, const StarState& star,
                     double gamma, double xi);

/// Shock position of the right (or left) nonlinear wave if that wave is a
/// shock; returns false otherwise.
bool shock_position(const EulerState& left, const EulerState& right, double gamma,
                    double x0, double t, bool right_wave, double& x_shock);

}  // namespace kbgk
