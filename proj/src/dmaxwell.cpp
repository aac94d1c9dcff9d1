#include "kbgk/dmaxwell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace kbgk {

namespace {

constexpr double kExpGuard = 700.0;
constexpr int kMaxIterations = 100;
constexpr double kArmijoSlope = 1e-4;
constexpr double kMinStep = 1.0 / (1024.0 * 1024.0 * 1024.0);  // 2^-30

// Power sums S[p] = sum_j v_j^p exp(a_lin v_j + a4 v_j^2), p = 0..4.
// Odd powers are accumulated in mirrored pairs so they vanish exactly
// when a_lin = 0 (the grid nodes are bit-exact negatives of each other).
struct AxisSums {
    std::array<double, 5> s{};
};

AxisSums axis_power_sums(const VelocityGrid& vgrid, double a_lin, double a4) {
    const int n = vgrid.count();
    AxisSums out;
    std::vector<double> g(n);
    for (int j = 0; j < n; ++j) {
        const double v = vgrid.nodes[j];
        const double ex = a_lin * v + a4 * v * v;
        if (ex > kExpGuard)
            throw DMaxDivergence("discrete Maxwellian: exponent overflow");
        g[j] = std::exp(ex);
    }
    for (int j = 0; j < n; ++j) {
        const double v = vgrid.nodes[j];
        const double v2 = v * v;
        out.s[0] += g[j];
        out.s[2] += v2 * g[j];
        out.s[4] += v2 * v2 * g[j];
    }
    for (int j = 0, k = n - 1; j <= k; ++j, --k) {
        const double v = vgrid.nodes[j];
        if (j == k) {
            out.s[1] += v * g[j];
            out.s[3] += v * v * v * g[j];
        } else {
            const double w = vgrid.nodes[k];
            out.s[1] += v * g[j] + w * g[k];
            out.s[3] += v * v * v * g[j] + w * w * w * g[k];
        }
    }
    return out;
}

struct FactoredMoments {
    std::array<double, 5> m{};    // rho, rhoUx, rhoUy, rhoUz, E
    AxisSums x, y, z;
    double aw = 0.0;              // exp(a0) dv^3
};

FactoredMoments factored_moments(const DMaxParams& p, const VelocityGrid& vgrid) {
    if (p.alpha[0] > kExpGuard)
        throw DMaxDivergence("discrete Maxwellian: exponent overflow");
    FactoredMoments fm;
    fm.x = axis_power_sums(vgrid, p.alpha[1], p.alpha[4]);
    fm.y = axis_power_sums(vgrid, p.alpha[2], p.alpha[4]);
    fm.z = axis_power_sums(vgrid, p.alpha[3], p.alpha[4]);
    fm.aw = std::exp(p.alpha[0]) * vgrid.dv * vgrid.dv * vgrid.dv;

    const auto& X = fm.x.s;
    const auto& Y = fm.y.s;
    const auto& Z = fm.z.s;
    fm.m[0] = fm.aw * X[0] * Y[0] * Z[0];
    fm.m[1] = fm.aw * X[1] * Y[0] * Z[0];
    fm.m[2] = fm.aw * X[0] * Y[1] * Z[0];
    fm.m[3] = fm.aw * X[0] * Y[0] * Z[1];
    fm.m[4] = 0.5 * fm.aw * (X[2] * Y[0] * Z[0] + X[0] * Y[2] * Z[0] + X[0] * Y[0] * Z[2]);
    return fm;
}

// Cholesky factorization in place; false if a pivot is not strictly positive.
bool cholesky5(std::array<std::array<double, 5>, 5>& a) {
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                a[i][i] = std::sqrt(s);
            } else {
                a[i][j] = s / a[j][j];
            }
        }
    }
    return true;
}

void cholesky5_solve(const std::array<std::array<double, 5>, 5>& l,
                     std::array<double, 5>& b) {
    for (int i = 0; i < 5; ++i) {
        for (int k = 0; k < i; ++k) b[i] -= l[i][k] * b[k];
        b[i] /= l[i][i];
    }
    for (int i = 4; i >= 0; --i) {
        for (int k = i + 1; k < 5; ++k) b[i] -= l[k][i] * b[k];
        b[i] /= l[i][i];
    }
}

// LDL^T with symmetric diagonal pivoting, the fallback for near-singular
// systems.
bool ldlt5_solve(std::array<std::array<double, 5>, 5> a, std::array<double, 5> b,
                 std::array<double, 5>& x) {
    std::array<int, 5> perm{0, 1, 2, 3, 4};
    std::array<std::array<double, 5>, 5> l{};
    std::array<double, 5> d{};

    for (int step = 0; step < 5; ++step) {
        int piv = step;
        for (int i = step + 1; i < 5; ++i)
            if (std::abs(a[perm[i]][perm[i]]) > std::abs(a[perm[piv]][perm[piv]])) piv = i;
        std::swap(perm[step], perm[piv]);

        const int p = perm[step];
        double dk = a[p][p];
        for (int k = 0; k < step; ++k) dk -= l[step][k] * l[step][k] * d[k];
        if (dk == 0.0 || !std::isfinite(dk)) return false;
        d[step] = dk;
        l[step][step] = 1.0;
        for (int i = step + 1; i < 5; ++i) {
            double s = a[perm[i]][p];
            for (int k = 0; k < step; ++k) s -= l[i][k] * l[step][k] * d[k];
            l[i][step] = s / dk;
        }
    }

    std::array<double, 5> y{};
    for (int i = 0; i < 5; ++i) {
        y[i] = b[perm[i]];
        for (int k = 0; k < i; ++k) y[i] -= l[i][k] * y[k];
    }
    for (int i = 0; i < 5; ++i) y[i] /= d[i];
    for (int i = 4; i >= 0; --i)
        for (int k = i + 1; k < 5; ++k) y[i] -= l[k][i] * y[k];
    for (int i = 0; i < 5; ++i) x[perm[i]] = y[i];
    return true;
}

double norm2_5(const std::array<double, 5>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

}  // namespace

void eval_discrete_maxwellian(const DMaxParams& params, const VelocityGrid& vgrid,
                              std::span<double> out) {
    if (!(params.alpha[4] < 0.0))
        throw std::invalid_argument("eval_discrete_maxwellian: a4 must be negative");
    const int n = vgrid.count();
    if (out.size() != vgrid.cube_size())
        throw std::invalid_argument("eval_discrete_maxwellian: cube dimension mismatch");

    std::vector<double> gx(n), gy(n), gz(n);
    double mx = -std::numeric_limits<double>::infinity();
    double my = mx, mz = mx;
    for (int j = 0; j < n; ++j) {
        const double v = vgrid.nodes[j];
        const double q = params.alpha[4] * v * v;
        const double ex = params.alpha[1] * v + q;
        const double ey = params.alpha[2] * v + q;
        const double ez = params.alpha[3] * v + q;
        mx = std::max(mx, ex);
        my = std::max(my, ey);
        mz = std::max(mz, ez);
        gx[j] = ex;
        gy[j] = ey;
        gz[j] = ez;
    }
    if (params.alpha[0] + mx + my + mz > kExpGuard)
        throw DMaxDivergence("eval_discrete_maxwellian: exponent overflow");

    const double a = std::exp(params.alpha[0]);
    for (int j = 0; j < n; ++j) gx[j] = std::exp(gx[j]);
    for (int j = 0; j < n; ++j) gy[j] = std::exp(gy[j]);
    for (int j = 0; j < n; ++j) gz[j] = std::exp(gz[j]);

    double* o = out.data();
    for (int j = 0; j < n; ++j) {
        const double aj = a * gx[j];
        for (int k = 0; k < n; ++k) {
            const double ajk = aj * gy[k];
            for (int l = 0; l < n; ++l) *o++ = ajk * gz[l];
        }
    }
}

std::array<double, 5> discrete_moment_residual(const DMaxParams& params,
                                               const MomentTarget& target,
                                               const VelocityGrid& vgrid) {
    FactoredMoments fm = factored_moments(params, vgrid);
    return {fm.m[0] - target.rho, fm.m[1] - target.rhoU[0], fm.m[2] - target.rhoU[1],
            fm.m[3] - target.rhoU[2], fm.m[4] - target.E};
}

ResidualJacobian residual_and_jacobian(const DMaxParams& params,
                                       const MomentTarget& target,
                                       const VelocityGrid& vgrid) {
    FactoredMoments fm = factored_moments(params, vgrid);
    const auto& X = fm.x.s;
    const auto& Y = fm.y.s;
    const auto& Z = fm.z.s;
    const double aw = fm.aw;

    ResidualJacobian out;
    out.residual = {fm.m[0] - target.rho, fm.m[1] - target.rhoU[0],
                    fm.m[2] - target.rhoU[1], fm.m[3] - target.rhoU[2],
                    fm.m[4] - target.E};

    auto& J = out.jacobian;
    J[0][0] = fm.m[0];
    J[0][1] = fm.m[1];
    J[0][2] = fm.m[2];
    J[0][3] = fm.m[3];
    J[0][4] = fm.m[4];
    J[1][1] = aw * X[2] * Y[0] * Z[0];
    J[2][2] = aw * X[0] * Y[2] * Z[0];
    J[3][3] = aw * X[0] * Y[0] * Z[2];
    J[1][2] = aw * X[1] * Y[1] * Z[0];
    J[1][3] = aw * X[1] * Y[0] * Z[1];
    J[2][3] = aw * X[0] * Y[1] * Z[1];
    J[1][4] = 0.5 * aw * (X[3] * Y[0] * Z[0] + X[1] * Y[2] * Z[0] + X[1] * Y[0] * Z[2]);
    J[2][4] = 0.5 * aw * (X[0] * Y[3] * Z[0] + X[2] * Y[1] * Z[0] + X[0] * Y[1] * Z[2]);
    J[3][4] = 0.5 * aw * (X[0] * Y[0] * Z[3] + X[2] * Y[0] * Z[1] + X[0] * Y[2] * Z[1]);
    J[4][4] = 0.25 * aw *
              (X[4] * Y[0] * Z[0] + X[0] * Y[4] * Z[0] + X[0] * Y[0] * Z[4] +
               2.0 * (X[2] * Y[2] * Z[0] + X[2] * Y[0] * Z[2] + X[0] * Y[2] * Z[2]));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < i; ++j) J[i][j] = J[j][i];
    return out;
}

double backtracking_search(const DMaxParams& params,
                           const std::array<double, 5>& direction,
                           const MomentTarget& target, const VelocityGrid& vgrid) {
    const double r0 = norm2_5(discrete_moment_residual(params, target, vgrid));
    for (double t = 1.0; t >= kMinStep; t *= 0.5) {
        DMaxParams trial = params;
        for (int i = 0; i < 5; ++i) trial.alpha[i] += t * direction[i];
        if (!(trial.alpha[4] < 0.0)) continue;
        double rt;
        try {
            rt = norm2_5(discrete_moment_residual(trial, target, vgrid));
        } catch (const DMaxDivergence&) {
            continue;
        }
        if (rt <= (1.0 - kArmijoSlope * t) * r0) return t;
    }
    throw std::runtime_error("backtracking_search: no admissible step length");
}

DMaxParams continuous_maxwellian_params(const MomentTarget& target) {
    target.validate();
    const Vec3 U{target.rhoU[0] / target.rho, target.rhoU[1] / target.rho,
                 target.rhoU[2] / target.rho};
    const double e = target.E / target.rho - 0.5 * norm2(U);
    const double rt = (2.0 / 3.0) * e;  // R T
    DMaxParams p;
    p.alpha[1] = U[0] / rt;
    p.alpha[2] = U[1] / rt;
    p.alpha[3] = U[2] / rt;
    p.alpha[4] = -1.0 / (2.0 * rt);
    p.alpha[0] = std::log(target.rho / std::pow(2.0 * M_PI * rt, 1.5)) - norm2(U) / (2.0 * rt);
    return p;
}

DMaxParams continuous_maxwellian_params(const MacroState& state, double R) {
    MomentTarget t;
    t.rho = state.rho;
    t.rhoU = {state.rho * state.U[0], state.rho * state.U[1], state.rho * state.U[2]};
    t.E = state.E;
    return continuous_maxwellian_params(t);
}

DMaxSolveResult solve_discrete_maxwellian(const MomentTarget& target,
                                          const VelocityGrid& vgrid,
                                          std::optional<DMaxParams> guess) {
    target.validate();
    DMaxParams p = guess ? *guess : continuous_maxwellian_params(target);

    // The floor scales with rho so small densities are not let off early.
    const double floor_tol = 1e-12 * target.rho;
    const std::array<double, 5> tol = {
        std::max(1e-10 * std::abs(target.rho), floor_tol),
        std::max(1e-10 * std::abs(target.rhoU[0]), floor_tol),
        std::max(1e-10 * std::abs(target.rhoU[1]), floor_tol),
        std::max(1e-10 * std::abs(target.rhoU[2]), floor_tol),
        std::max(1e-10 * std::abs(target.E), floor_tol)};

    double last_norm = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        ResidualJacobian rj = residual_and_jacobian(p, target, vgrid);
        last_norm = std::sqrt(norm2_5(rj.residual));

        bool done = true;
        for (int a = 0; a < 5; ++a)
            if (std::abs(rj.residual[a]) > tol[a]) { done = false; break; }
        if (done) return {p, it, last_norm};

        std::array<double, 5> rhs;
        for (int a = 0; a < 5; ++a) rhs[a] = -rj.residual[a];

        std::array<double, 5> d_beta;
        auto chol = rj.jacobian;
        if (cholesky5(chol)) {
            d_beta = rhs;
            cholesky5_solve(chol, d_beta);
        } else if (!ldlt5_solve(rj.jacobian, rhs, d_beta)) {
            throw std::runtime_error(
                "solve_discrete_maxwellian: singular Jacobian, |r| = " +
                std::to_string(last_norm));
        }

        // The Jacobian is taken with respect to (a0..a3, 2 a4).
        std::array<double, 5> d_alpha = {d_beta[0], d_beta[1], d_beta[2], d_beta[3],
                                         0.5 * d_beta[4]};
        double t = backtracking_search(p, d_alpha, target, vgrid);
        for (int a = 0; a < 5; ++a) p.alpha[a] += t * d_alpha[a];
    }
    throw std::runtime_error("solve_discrete_maxwellian: no convergence after 100 iterations, |r| = " +
                             std::to_string(last_norm));
}

}  // namespace kbgk
