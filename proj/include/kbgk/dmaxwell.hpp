#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>

#include "kbgk/core.hpp"
#include "kbgk/moments.hpp"

namespace kbgk {

/// Exponential-family parameters: node value
///   exp(a0 + a1 vx + a2 vy + a3 vz + a4 |v|^2),  a4 < 0.
struct DMaxParams {
    std::array<double, 5> alpha{0.0, 0.0, 0.0, 0.0, -1.0};
};

struct MomentTarget {
    double rho = 0.0;
    Vec3 rhoU{0.0, 0.0, 0.0};
    double E = 0.0;

    void validate() const {
        if (rho <= 0.0)
            throw std::invalid_argument("MomentTarget: rho must be positive");
        if (E - 0.5 * norm2(rhoU) / rho <= 0.0)
            throw std::invalid_argument("MomentTarget: nonpositive internal energy");
    }
};

struct DMaxDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fill the velocity cube; throws DMaxDivergence if any exponent exceeds 700.
void eval_discrete_maxwellian(const DMaxParams& params, const VelocityGrid& vgrid,
                              std::span<double> out);

/// Residual (discrete moments minus target, order rho, rhoU, E) and the
/// Jacobian with respect to the parameters conjugate to
/// phi = (1, vx, vy, vz, |v|^2/2), i.e. (a0..a3, 2 a4). In that
/// parametrization J_ab = sum phi_a phi_b M dv^3, symmetric positive definite.
struct ResidualJacobian {
    std::array<double, 5> residual{};
    std::array<std::array<double, 5>, 5> jacobian{};
};

ResidualJacobian residual_and_jacobian(const DMaxParams& params,
                                       const MomentTarget& target,
                                       const VelocityGrid& vgrid);

std::array<double, 5> discrete_moment_residual(const DMaxParams& params,
                                               const MomentTarget& target,
                                               const VelocityGrid& vgrid);

/// Armijo backtracking on ||r||^2 over t in {1, 1/2, ...}, t >= 2^-30, also
/// keeping a4 + t d4 < 0. `direction` is in alpha-space. Throws on failure.
double backtracking_search(const DMaxParams& params,
                           const std::array<double, 5>& direction,
                           const MomentTarget& target, const VelocityGrid& vgrid);

/// Parameters whose node values equal the continuous Maxwellian of the
/// macro state with the target's moments.
DMaxParams continuous_maxwellian_params(const MomentTarget& target);
DMaxParams continuous_maxwellian_params(const MacroState& state, double R);

struct DMaxSolveResult {
    DMaxParams params;
    int iterations = 0;
    double residual_norm = 0.0;
};

/// Newton iteration with backtracking; converged when every residual
/// component satisfies |r_a| <= max(1e-10 |target_a|, 1e-12 rho).
/// Throws std::runtime_error (with the last residual norm) after 100
/// iterations or on line-search failure.
DMaxSolveResult solve_discrete_maxwellian(const MomentTarget& target,
                                          const VelocityGrid& vgrid,
                                          std::optional<DMaxParams> guess = {});

}  // namespace kbgk
