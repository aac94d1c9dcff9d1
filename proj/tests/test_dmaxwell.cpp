#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kbgk/dmaxwell.hpp"

using namespace kbgk;

namespace {
const double R = 208.0;

MomentTarget target_from(double rho, const Vec3& U, double T) {
    MomentTarget t;
    t.rho = rho;
    t.rhoU = {rho * U[0], rho * U[1], rho * U[2]};
    t.E = rho * (1.5 * R * T + 0.5 * norm2(U));
    return t;
}

std::array<double, 5> moments_of(const DMaxParams& p, const VelocityGrid& vg) {
    std::vector<double> cube(vg.cube_size());
    eval_discrete_maxwellian(p, vg, cube);
    const int n = vg.count();
    std::array<double, 5> m{};
    for (int j = 0, q = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l, ++q) {
                const double vx = vg.nodes[j], vy = vg.nodes[k], vz = vg.nodes[l];
                m[0] += cube[q];
                m[1] += vx * cube[q];
                m[2] += vy * cube[q];
                m[3] += vz * cube[q];
                m[4] += 0.5 * (vx * vx + vy * vy + vz * vz) * cube[q];
            }
    const double dv3 = vg.dv * vg.dv * vg.dv;
    for (double& v : m) v *= dv3;
    return m;
}
}  // namespace

TEST_CASE("continuous params reproduce the Maxwellian pointwise") {
    VelocityGrid vg = build_velocity_grid(10.0, 13);
    MacroState s = macro_from_primitive(0.3, {0.4, -0.2, 0.1}, 2.2, R);
    DMaxParams p = continuous_maxwellian_params(s, R);
    CHECK(p.alpha[4] < 0.0);
    std::vector<double> cube(vg.cube_size());
    eval_discrete_maxwellian(p, vg, cube);
    const int n = vg.count();
    for (int j = 0, q = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l, ++q) {
                const double ref =
                    eval_maxwellian(s, {vg.nodes[j], vg.nodes[k], vg.nodes[l]}, R);
                REQUIRE(cube[q] > 0.0);
                REQUIRE(std::abs(cube[q] / ref - 1.0) < 1e-12);
            }
}

TEST_CASE("continuous params from a target match the macro route") {
    MacroState s = macro_from_primitive(1e-4, {0.1, 0, 0}, 2.5, R);
    MomentTarget t = target_from(s.rho, s.U, s.T);
    DMaxParams a = continuous_maxwellian_params(t);
    DMaxParams b = continuous_maxwellian_params(s, R);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(a.alpha[i] - b.alpha[i]) < 1e-12 * std::max(1.0, std::abs(b.alpha[i])));
}

TEST_CASE("overflow guard throws instead of producing inf") {
    VelocityGrid vg = build_velocity_grid(10.0, 4);
    DMaxParams p;
    p.alpha = {800.0, 0.0, 0.0, 0.0, -1.0};
    std::vector<double> cube(vg.cube_size());
    CHECK_THROWS_AS(eval_discrete_maxwellian(p, vg, cube), DMaxDivergence);
}

TEST_CASE("residual vanishes at self-consistent parameters") {
    VelocityGrid vg = build_velocity_grid(10.0, 13);
    DMaxParams p;
    p.alpha = {-2.0, 0.3, -0.1, 0.2, -4.0};
    auto m = moments_of(p, vg);
    MomentTarget t;
    t.rho = m[0];
    t.rhoU = {m[1], m[2], m[3]};
    t.E = m[4];
    auto r = discrete_moment_residual(p, t, vg);
    for (int a = 0; a < 5; ++a) CHECK(std::abs(r[a]) < 1e-14 * std::max(1.0, m[0]));
}

TEST_CASE("Jacobian is symmetric and matches central finite differences") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    VelocityGrid vg = build_velocity_grid(10.0, 13);
    for (int trial = 0; trial < 100; ++trial) {
        DMaxParams p;
        p.alpha = {-1.0 - 2.0 * uni(rng), uni(rng) - 0.5, uni(rng) - 0.5,
                   uni(rng) - 0.5, -0.5 - 3.0 * uni(rng)};
        MomentTarget t = target_from(0.5, {0, 0, 0}, 0.008);  // residual offset only
        ResidualJacobian rj = residual_and_jacobian(p, t, vg);

        double scale = 0.0;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) scale = std::max(scale, std::abs(rj.jacobian[a][b]));
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                REQUIRE(std::abs(rj.jacobian[a][b] - rj.jacobian[b][a]) < 1e-12 * scale);

        // central differences in the conjugate parameters (a0..a3, 2 a4)
        const double eps = 1e-6;
        for (int b = 0; b < 5; ++b) {
            DMaxParams hi = p, lo = p;
            const double step = (b == 4) ? 0.5 * eps : eps;  // a4 = beta4 / 2
            hi.alpha[b] += step;
            lo.alpha[b] -= step;
            auto rhi = discrete_moment_residual(hi, t, vg);
            auto rlo = discrete_moment_residual(lo, t, vg);
            for (int a = 0; a < 5; ++a) {
                const double fd = (rhi[a] - rlo[a]) / (2.0 * eps);
                REQUIRE(std::abs(fd - rj.jacobian[a][b]) <
                        1e-5 * std::max(1.0, std::abs(rj.jacobian[a][b])));
            }
        }
    }
}

TEST_CASE("backtracking accepts the full step near a solution") {
    VelocityGrid vg = build_velocity_grid(10.0, 13);
    DMaxParams p;
    p.alpha = {-2.0, 0.0, 0.0, 0.0, -3.0};
    auto m = moments_of(p, vg);
    MomentTarget t;
    t.rho = m[0] * 1.001;  // slightly off: Newton step is tiny and downhill
    t.rhoU = {m[1], m[2], m[3]};
    t.E = m[4] * 1.001;
    // a small pure-a0 increase moves all moments toward the larger target
    std::array<double, 5> dir{1e-4, 0.0, 0.0, 0.0, 0.0};
    CHECK(backtracking_search(p, dir, t, vg) == 1.0);
}

TEST_CASE("backtracking respects the a4 < 0 constraint") {
    VelocityGrid vg = build_velocity_grid(10.0, 13);
    DMaxParams p;
    p.alpha = {-2.0, 0.0, 0.0, 0.0, -0.5};
    auto m = moments_of(p, vg);
    MomentTarget t;
    t.rho = m[0];
    t.rhoU = {m[1], m[2], m[3]};
    t.E = m[4] * 1.1;
    // direction that would push a4 past zero at t = 1
    std::array<double, 5> dir{0.0, 0.0, 0.0, 0.0, 2.0};
    double step = backtracking_search(p, dir, t, vg);
    CHECK(step < 1.0);
    CHECK(p.alpha[4] + step * dir[4] < 0.0);
}

TEST_CASE("backtracking shortens an overshooting step") {
    VelocityGrid vg = build_velocity_grid(10.0, 13);
    DMaxParams p;
    p.alpha = {-2.0, 0.0, 0.0, 0.0, -3.0};
    auto m = moments_of(p, vg);
    MomentTarget t;
    t.rho = m[0] * 1.0001;
    t.rhoU = {m[1], m[2], m[3]};
    t.E = m[4] * 1.0001;
    // grossly overshooting a0 direction: full step increases the residual
    std::array<double, 5> dir{5.0, 0.0, 0.0, 0.0, 0.0};
    double step = backtracking_search(p, dir, t, vg);
    CHECK(step < 1.0);
    CHECK(step >= std::pow(2.0, -30));
}

TEST_CASE("solver matches its own discrete moments") {
    VelocityGrid vg = build_velocity_grid(10.0, 20);
    MomentTarget t = target_from(1e-4, {0.2, -0.1, 0.05}, 0.0075);
    DMaxSolveResult res = solve_discrete_maxwellian(t, vg);
    CHECK(res.iterations <= 15);
    auto m = moments_of(res.params, vg);
    CHECK(std::abs(m[0] / t.rho - 1.0) < 1e-10);
    CHECK(std::abs(m[4] / t.E - 1.0) < 1e-10);
    for (int c = 0; c < 3; ++c)
        CHECK(std::abs(m[1 + c] - t.rhoU[c]) < 1e-10 * std::max(std::abs(t.rhoU[c]), t.rho));
}

TEST_CASE("zero mean velocity gives vanishing linear coefficients") {
    VelocityGrid vg = build_velocity_grid(10.0, 20);
    MomentTarget t = target_from(0.01, {0, 0, 0}, 0.008);
    DMaxSolveResult res = solve_discrete_maxwellian(t, vg);
    for (int c = 1; c <= 3; ++c) CHECK(std::abs(res.params.alpha[c]) < 1e-10);
}

TEST_CASE("coarse grid, shock-tube left state") {
    VelocityGrid vg = build_velocity_grid(10.0, 13);
    MomentTarget t = target_from(1e-4, {0, 0, 0}, 0.008012);
    DMaxSolveResult res = solve_discrete_maxwellian(t, vg);
    CHECK(res.iterations <= 15);
    auto m = moments_of(res.params, vg);
    CHECK(std::abs(m[0] / t.rho - 1.0) < 1e-10);
    CHECK(std::abs(m[4] / t.E - 1.0) < 1e-10);
}

TEST_CASE("solution is independent of the starting guess") {
    VelocityGrid vg = build_velocity_grid(10.0, 13);
    MomentTarget t = target_from(0.5, {0.3, 0, 0}, 0.007);
    DMaxSolveResult a = solve_discrete_maxwellian(t, vg);
    // second start: continuous guess of a deliberately wrong nearby state
    DMaxParams guess = continuous_maxwellian_params(target_from(1.2, {0.0, 0.1, 0.0}, 0.0095));
    DMaxSolveResult b = solve_discrete_maxwellian(t, vg, guess);
    CHECK(b.iterations > 0);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(a.params.alpha[i] - b.params.alpha[i]) <
              1e-8 * std::max(1.0, std::abs(a.params.alpha[i])));
}

TEST_CASE("discrete parameters approach the continuous ones as N_v grows") {
    MomentTarget t = target_from(1.0, {0.2, 0, 0}, 0.008);
    DMaxParams cont = continuous_maxwellian_params(t);
    double prev = 1e300;
    for (int nv : {13, 20, 40}) {
        VelocityGrid vg = build_velocity_grid(10.0, nv);
        DMaxSolveResult res = solve_discrete_maxwellian(t, vg);
        double dist = 0.0;
        for (int i = 0; i < 5; ++i)
            dist = std::max(dist, std::abs(res.params.alpha[i] - cont.alpha[i]) /
                                      std::max(1.0, std::abs(cont.alpha[i])));
        CHECK(dist <= prev);  // may already sit at the tolerance plateau
        prev = dist;
    }
    CHECK(prev < 1e-8);
}

TEST_CASE("random target sweep: full convergence at required accuracy") {
    std::mt19937_64 rng(31415);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int converged = 0;
    std::vector<int> iters;
    for (int trial = 0; trial < 200; ++trial) {
        const int nv = (trial % 2 == 0) ? 13 : 20;
        VelocityGrid vg = build_velocity_grid(10.0, nv);
        const double rho = std::pow(10.0, -6.0 * uni(rng));  // [1e-6, 1]
        Vec3 U{4.0 * uni(rng) - 2.0, 4.0 * uni(rng) - 2.0, 4.0 * uni(rng) - 2.0};
        const double T = 0.00641 + (0.008012 - 0.00641) * uni(rng);
        MomentTarget t = target_from(rho, U, T);
        DMaxSolveResult res = solve_discrete_maxwellian(t, vg);
        iters.push_back(res.iterations);
        auto m = moments_of(res.params, vg);
        REQUIRE(std::abs(m[0] / t.rho - 1.0) < 1e-10);
        REQUIRE(std::abs(m[4] / t.E - 1.0) < 1e-10);
        for (int c = 0; c < 3; ++c)
            REQUIRE(std::abs(m[1 + c] - t.rhoU[c]) <
                    1e-10 * std::max(std::abs(t.rhoU[c]), t.rho));
        ++converged;
    }
    CHECK(converged == 200);
    std::sort(iters.begin(), iters.end());
    CHECK(iters[iters.size() / 2] <= 15);
}

TEST_CASE("invalid targets are rejected up front") {
    MomentTarget bad;
    bad.rho = -1.0;
    bad.E = 1.0;
    CHECK_THROWS(bad.validate());
    MomentTarget cold;
    cold.rho = 1.0;
    cold.rhoU = {2.0, 0, 0};
    cold.E = 1.9;  // E < |rhoU|^2 / (2 rho)
    CHECK_THROWS(cold.validate());
}
