// Acceptance gate: end-to-end checks of the shock-tube solver against its
// stated tolerances. Each criterion prints one PASS/FAIL line with the
// measured quantity; the exit code is nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "kbgk/dmaxwell.hpp"
#include "kbgk/experiment.hpp"
#include "kbgk/interp.hpp"
#include "kbgk/riemann.hpp"
#include "kbgk/solver.hpp"

using namespace kbgk;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-34s %s\n", ok ? "PASS" : "FAIL", id, name,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}

// Linear resampling of (x, field) onto target coordinates.
std::vector<double> resample(const std::vector<ProfilePoint>& prof,
                             double ProfilePoint::*field,
                             const std::vector<double>& xq) {
    std::vector<double> xs(prof.size()), fs(prof.size());
    for (std::size_t i = 0; i < prof.size(); ++i) {
        xs[i] = prof[i].x;
        fs[i] = prof[i].*field;
    }
    std::vector<double> out(xq.size());
    for (std::size_t i = 0; i < xq.size(); ++i)
        out[i] = spline_interpolate(xs, fs, std::clamp(xq[i], xs.front(), xs.back()));
    return out;
}

double linf_diff(const std::vector<ProfilePoint>& a, const std::vector<ProfilePoint>& b,
                 double ProfilePoint::*field) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i].*field - b[i].*field));
    return m;
}

double l1_diff(const std::vector<ProfilePoint>& a, const std::vector<ProfilePoint>& b,
               double ProfilePoint::*field) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double w;
        if (i == 0) w = 0.5 * (a[1].x - a[0].x);
        else if (i + 1 == a.size()) w = 0.5 * (a[i].x - a[i - 1].x);
        else w = 0.5 * (a[i + 1].x - a[i - 1].x);
        s += w * std::abs(a[i].*field - b[i].*field);
    }
    return s;
}

// ---------------------------------------------------------------------------

void criterion_1_equilibrium() {
    SolverConfig cfg;
    cfg.n_x = 200;
    cfg.n_v = 20;
    cfg.cfl = 1.0;
    cfg.left.rho = 1e-4;
    cfg.left.e = 1.5 * cfg.gas.R * 0.008012;
    cfg.right = cfg.left;
    cfg.lambda_l = cfg.lambda_r = 0.001;
    cfg.t_final = 1.0;  // stepped manually

    SemiLagrangianSolver solver(cfg);
    std::vector<MacroState> initial = solver.macro();
    const double vth = std::sqrt(cfg.gas.R * initial[0].T);
    for (int s = 0; s < 100; ++s) solver.step();

    double max_rel = 0.0;
    const auto& now = solver.macro();
    for (std::size_t i = 0; i < now.size(); ++i) {
        max_rel = std::max(max_rel, std::abs(now[i].rho / initial[i].rho - 1.0));
        max_rel = std::max(max_rel, std::abs(now[i].T / initial[i].T - 1.0));
        // U starts at zero; measure its drift against the thermal speed
        max_rel = std::max(max_rel,
                           std::sqrt(norm2(now[i].U) - 0.0) / vth);
    }
    report(1, "equilibrium fixed point", max_rel <= 1e-6,
           fmt("max rel change = %.3e (tol 1e-6)", max_rel));
}

void criterion_2_conservation() {
    RunConfig cfg = parse_config("preset = 1\nmaxwellian = discrete");
    ExperimentResult r = run_experiment(cfg);
    double worst = 0.0;
    for (const auto& d : r.diagnostics) worst = std::max(worst, d.max_moment_mismatch);
    report(2, "relaxation conserves moments", !r.failed && worst <= 1e-10,
           fmt("max per-step mismatch = %.3e (tol 1e-10)", worst));
}

void criterion_3_cfl() {
    RunConfig c1 = parse_config("preset = 1\ncfl = 1");
    RunConfig c2 = parse_config("preset = 1\ncfl = 2");
    ExperimentResult r1 = run_experiment(c1);
    ExperimentResult r2 = run_experiment(c2);
    const double jump =
        (2.0 / 3.0) * (c1.solver.left.e - c1.solver.right.e) / c1.solver.gas.R;
    const double linf = linf_diff(r1.profile, r2.profile, &ProfilePoint::T);
    report(3, "CFL 1 vs 2 robustness", !r1.failed && !r2.failed && linf <= 0.02 * jump,
           fmt("T Linf diff = %.3e = %.2f%% of jump (tol 2%%)", linf,
               100.0 * linf / jump));
}

void criterion_4_jitter() {
    RunConfig reg = parse_config("preset = 3");
    RunConfig jit = parse_config("preset = 3\ngrid = jittered\nseed = 12345");
    ExperimentResult rr = run_experiment(reg);
    ExperimentResult rj = run_experiment(jit);
    // compare on the regular grid coordinates
    std::vector<double> xq(rr.profile.size());
    for (std::size_t i = 0; i < xq.size(); ++i) xq[i] = rr.profile[i].x;
    std::vector<double> rho_j = resample(rj.profile, &ProfilePoint::rho, xq);
    double linf = 0.0;
    for (std::size_t i = 0; i < xq.size(); ++i)
        linf = std::max(linf, std::abs(rr.profile[i].rho - rho_j[i]));
    const double jump = reg.solver.left.rho - reg.solver.right.rho;
    report(4, "regular vs jittered grid", !rr.failed && !rj.failed && linf <= 0.02 * jump,
           fmt("rho Linf diff = %.3e = %.2f%% of jump (tol 2%%)", linf,
               100.0 * linf / jump));
}

struct FluidRuns {
    ExperimentResult mls, spline, disc13, cont13;
    RunConfig cfg6;
};

void criterion_5_fluid_limit(FluidRuns& runs) {
    runs.cfg6 = parse_config("preset = 6");
    runs.mls = run_experiment(runs.cfg6);
    RunConfig spline_cfg = parse_config("preset = 6\nreconstruction = spline");
    runs.spline = run_experiment(spline_cfg);
    auto euler = euler_reference(runs.cfg6);

    const double l1_rho_mls = l1_diff(runs.mls.profile, euler, &ProfilePoint::rho);
    const double l1_rho_spl = l1_diff(runs.spline.profile, euler, &ProfilePoint::rho);
    const double l1_ux_mls = l1_diff(runs.mls.profile, euler, &ProfilePoint::ux);
    const double l1_ux_spl = l1_diff(runs.spline.profile, euler, &ProfilePoint::ux);
    double l1_ref = 0.0;
    for (std::size_t i = 0; i < euler.size(); ++i) {
        double w;
        if (i == 0) w = 0.5 * (euler[1].x - euler[0].x);
        else if (i + 1 == euler.size()) w = 0.5 * (euler[i].x - euler[i - 1].x);
        else w = 0.5 * (euler[i + 1].x - euler[i - 1].x);
        l1_ref += w * std::abs(euler[i].rho);
    }
    const double rel_l1 = l1_rho_mls / l1_ref;

    // exact shock position of the right wave
    const double gamma = 5.0 / 3.0;
    EulerState el = euler_state_from_side(runs.cfg6.solver.left, gamma);
    EulerState er = euler_state_from_side(runs.cfg6.solver.right, gamma);
    double x_shock = 0.0;
    bool has_shock = shock_position(el, er, gamma, runs.cfg6.solver.diaphragm,
                                    runs.cfg6.solver.t_final, true, x_shock);

    // kinetic shock: crossing of the midpoint density between the post-shock
    // plateau and the undisturbed right state, scanning from the right
    StarState st = star_region(el, er, gamma);
    const double pr = st.p / er.p;
    const double gm = (gamma - 1.0) / (gamma + 1.0);
    const double rho_behind = er.rho * (pr + gm) / (gm * pr + 1.0);
    const double mid = 0.5 * (rho_behind + er.rho);
    double x_kin = runs.mls.profile.back().x;
    for (std::size_t i = runs.mls.profile.size() - 1; i > 0; --i) {
        if (runs.mls.profile[i - 1].rho >= mid && runs.mls.profile[i].rho < mid) {
            const double r0 = runs.mls.profile[i - 1].rho, r1 = runs.mls.profile[i].rho;
            const double t = (mid - r0) / (r1 - r0);
            x_kin = runs.mls.profile[i - 1].x +
                    t * (runs.mls.profile[i].x - runs.mls.profile[i - 1].x);
            break;
        }
    }
    const double dx = 1.0 / runs.cfg6.solver.n_x;
    const double shock_err = std::abs(x_kin - x_shock);

    const bool ok = !runs.mls.failed && !runs.spline.failed && rel_l1 <= 0.05 &&
                    has_shock && shock_err <= 2.0 * dx && l1_rho_mls <= l1_rho_spl &&
                    l1_ux_mls <= l1_ux_spl;
    report(5, "fluid limit vs exact Euler", ok,
           fmt("rel L1 rho = %.3f%% (tol 5%%), shock offset = %.2f cells (tol 2)",
               100.0 * rel_l1, shock_err / dx) +
               fmt(", L1 mls/spline rho = %.3f, ux = %.3f", l1_rho_mls / l1_rho_spl,
                   l1_ux_mls / l1_ux_spl));
}

void criterion_6_grid_reduction(FluidRuns& runs) {
    RunConfig d13 = parse_config("preset = 7");
    runs.disc13 = run_experiment(d13);
    RunConfig c13 = parse_config("preset = 6\nnv = 13");
    runs.cont13 = run_experiment(c13);

    const double jump = runs.cfg6.solver.left.rho - runs.cfg6.solver.right.rho;
    const double linf_d =
        linf_diff(runs.disc13.profile, runs.mls.profile, &ProfilePoint::rho);
    const double linf_c =
        linf_diff(runs.cont13.profile, runs.mls.profile, &ProfilePoint::rho);
    const bool faster = runs.disc13.wall_clock_s < runs.mls.wall_clock_s;

    const bool ok = !runs.disc13.failed && linf_d <= 0.02 * jump &&
                    linf_c > 0.02 * jump && faster;
    report(6, "discrete Maxwellian at N_v=13", ok,
           fmt("rho Linf: discrete13 = %.2f%%, continuous13 = %.2f%% of jump",
               100.0 * linf_d / jump, 100.0 * linf_c / jump) +
               fmt(" (tol 2%%); wall clock %.0fs vs %.0fs", runs.disc13.wall_clock_s,
                   runs.mls.wall_clock_s));
}

void criterion_7_mls_suite() {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    MlsConfig cfg;
    double worst_lin = 0.0, worst_shift = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        PhysicalGrid g = jitter_grid(build_regular_grid(0.0, 1.0, 50), rng());
        const double a = 4.0 * uni(rng) - 2.0, b = 4.0 * uni(rng) - 2.0;
        std::vector<double> fs(g.count());
        for (int i = 0; i < g.count(); ++i) fs[i] = a * g.points[i] + b;
        const double h = cfg.radius_factor * g.dx_avg;
        const double xq = 0.1 + 0.8 * uni(rng);
        NeighborSet n = find_stencil(g, xq, h, UpwindSign::none);
        const double exact = a * xq + b;
        const double got = mls_interpolate(n, g, fs, xq, cfg);
        worst_lin = std::max(worst_lin,
                             std::abs(got - exact) / std::max(1.0, std::abs(exact)));

        // translation invariance
        const double shift = 3.0 + uni(rng);
        PhysicalGrid gs = g;
        gs.a += shift;
        gs.b += shift;
        for (double& x : gs.points) x += shift;
        NeighborSet ns = find_stencil(gs, xq + shift, h, UpwindSign::none);
        const double moved = mls_interpolate(ns, gs, fs, xq + shift, cfg);
        worst_shift = std::max(worst_shift,
                               std::abs(moved - got) / std::max(1.0, std::abs(got)));
    }

    // weight cutoff exactness at exact binary offsets
    const bool cutoff_ok = mls_weight(0.7501, 0.5, 0.25, 6.0) == 0.0 &&
                           mls_weight(0.2499, 0.5, 0.25, 6.0) == 0.0 &&
                           mls_weight(0.75, 0.5, 0.25, 6.0) > 0.0 &&
                           mls_weight(0.5, 0.5, 0.25, 6.0) == 1.0;

    const bool ok = worst_lin <= 1e-12 && worst_shift <= 1e-12 && cutoff_ok;
    report(7, "MLS reproduction suite", ok,
           fmt("linear err = %.2e, shift err = %.2e (tol 1e-12)", worst_lin,
               worst_shift) + (cutoff_ok ? ", cutoff exact" : ", CUTOFF BROKEN"));
}

void criterion_8_dmaxwell() {
    const double R = 208.0;
    std::mt19937_64 rng(271828);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int converged = 0;
    double worst_match = 0.0;
    std::vector<int> iters;
    for (int trial = 0; trial < 1000; ++trial) {
        const int nv = (trial % 2 == 0) ? 13 : 20;
        VelocityGrid vg = build_velocity_grid(10.0, nv);
        MomentTarget t;
        t.rho = std::pow(10.0, -6.0 * uni(rng));
        Vec3 U{4.0 * uni(rng) - 2.0, 4.0 * uni(rng) - 2.0, 4.0 * uni(rng) - 2.0};
        const double T = 0.00641 + (0.008012 - 0.00641) * uni(rng);
        t.rhoU = {t.rho * U[0], t.rho * U[1], t.rho * U[2]};
        t.E = t.rho * (1.5 * R * T + 0.5 * norm2(U));
        try {
            DMaxSolveResult res = solve_discrete_maxwellian(t, vg);
            iters.push_back(res.iterations);
            auto r = discrete_moment_residual(res.params, t, vg);
            worst_match = std::max(worst_match, std::abs(r[0]) / t.rho);
            worst_match = std::max(worst_match, std::abs(r[4]) / t.E);
            for (int c = 1; c <= 3; ++c)
                worst_match = std::max(
                    worst_match,
                    std::abs(r[c]) / std::max(std::abs(t.rhoU[c - 1]), t.rho));
            ++converged;
        } catch (const std::exception&) {
        }
    }
    std::sort(iters.begin(), iters.end());
    const int median = iters.empty() ? 999 : iters[iters.size() / 2];

    // Jacobian vs central finite differences, 100 spot checks
    VelocityGrid vg = build_velocity_grid(10.0, 13);
    MomentTarget dummy;
    dummy.rho = 0.5;
    dummy.E = 1.0;
    double worst_jac = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        DMaxParams p;
        p.alpha = {-1.0 - 2.0 * uni(rng), uni(rng) - 0.5, uni(rng) - 0.5,
                   uni(rng) - 0.5, -0.5 - 3.0 * uni(rng)};
        ResidualJacobian rj = residual_and_jacobian(p, dummy, vg);
        const double eps = 1e-6;
        for (int b = 0; b < 5; ++b) {
            DMaxParams hi = p, lo = p;
            const double step = (b == 4) ? 0.5 * eps : eps;
            hi.alpha[b] += step;
            lo.alpha[b] -= step;
            auto rhi = discrete_moment_residual(hi, dummy, vg);
            auto rlo = discrete_moment_residual(lo, dummy, vg);
            for (int a = 0; a < 5; ++a) {
                const double fd = (rhi[a] - rlo[a]) / (2.0 * eps);
                worst_jac = std::max(worst_jac,
                                     std::abs(fd - rj.jacobian[a][b]) /
                                         std::max(1.0, std::abs(rj.jacobian[a][b])));
            }
        }
    }

    const bool ok = converged == 1000 && worst_match <= 1e-10 && median <= 15 &&
                    worst_jac <= 1e-5;
    report(8, "discrete-Maxwellian solver sweep", ok,
           fmt("converged %4.0f/1000, worst match = %.2e", double(converged),
               worst_match) +
               fmt(", median iters = %.0f, jac err = %.2e", double(median), worst_jac));
}

void criterion_9_riemann() {
    const double gamma = 5.0 / 3.0;
    std::mt19937_64 rng(161803);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst_star = 0.0, worst_rh = 0.0;
    int pairs = 0;
    while (pairs < 100) {
        EulerState l{0.1 + 2.0 * uni(rng), 2.0 * uni(rng) - 1.0, 0.1 + 3.0 * uni(rng)};
        EulerState r{0.1 + 2.0 * uni(rng), 2.0 * uni(rng) - 1.0, 0.1 + 3.0 * uni(rng)};
        const double a_l = std::sqrt(gamma * l.p / l.rho);
        const double a_r = std::sqrt(gamma * r.p / r.rho);
        if (r.u - l.u >= 2.0 * (a_l + a_r) / (gamma - 1.0)) continue;
        ++pairs;

        StarState a = star_region(l, r, gamma);
        StarState b = star_region_bisection(l, r, gamma);
        worst_star = std::max(worst_star, std::abs(a.p / b.p - 1.0));
        worst_star = std::max(worst_star,
                              std::abs(a.u - b.u) / std::max(1.0, std::abs(b.u)));

        if (a.p > r.p) {  // right shock: Rankine-Hugoniot residual
            const double prr = a.p / r.p;
            const double gm = (gamma - 1.0) / (gamma + 1.0);
            EulerState behind{r.rho * (prr + gm) / (gm * prr + 1.0), a.u, a.p};
            const double s = r.u + a_r * std::sqrt((gamma + 1.0) / (2.0 * gamma) * prr +
                                                   (gamma - 1.0) / (2.0 * gamma));
            const double Eb = behind.p / (gamma - 1.0) +
                              0.5 * behind.rho * behind.u * behind.u;
            const double Er = r.p / (gamma - 1.0) + 0.5 * r.rho * r.u * r.u;
            const double r1 = (behind.rho * behind.u - r.rho * r.u) -
                              s * (behind.rho - r.rho);
            const double r2 = (behind.rho * behind.u * behind.u + behind.p -
                               r.rho * r.u * r.u - r.p) -
                              s * (behind.rho * behind.u - r.rho * r.u);
            const double r3 = (behind.u * (Eb + behind.p) - r.u * (Er + r.p)) -
                              s * (Eb - Er);
            const double scale = std::max(behind.p, r.p);
            worst_rh = std::max(worst_rh,
                                std::max({std::abs(r1), std::abs(r2), std::abs(r3)}) /
                                    scale);
        }
    }
    const bool ok = worst_star <= 1e-10 && worst_rh <= 1e-8;
    report(9, "Riemann Newton vs bisection", ok,
           fmt("star diff = %.2e (tol 1e-10), RH residual = %.2e (tol 1e-8)",
               worst_star, worst_rh));
}

void criterion_10_tau_modes() {
    // near the fluid limit (lambda ~ 1e-7 at rho ~ 1) both tau treatments
    // give the same profile; at lambda = 0.02 they measurably differ
    RunConfig a_const = parse_config("preset = 6\nnx = 200\ntau_mode = constant");
    RunConfig a_var = parse_config("preset = 6\nnx = 200\ntau_mode = variable");
    ExperimentResult ra_c = run_experiment(a_const);
    ExperimentResult ra_v = run_experiment(a_var);
    const double jump_a = (2.0 / 3.0) *
                          (a_const.solver.left.e - a_const.solver.right.e) /
                          a_const.solver.gas.R;
    const double linf_a = linf_diff(ra_c.profile, ra_v.profile, &ProfilePoint::T);

    RunConfig b_const = parse_config("preset = 3\ntau_mode = constant");
    RunConfig b_var = parse_config("preset = 3\ntau_mode = variable");
    ExperimentResult rb_c = run_experiment(b_const);
    ExperimentResult rb_v = run_experiment(b_var);
    const double jump_b = (2.0 / 3.0) *
                          (b_const.solver.left.e - b_const.solver.right.e) /
                          b_const.solver.gas.R;
    const double linf_b = linf_diff(rb_c.profile, rb_v.profile, &ProfilePoint::T);

    const bool ok = !ra_c.failed && !ra_v.failed && !rb_c.failed && !rb_v.failed &&
                    linf_a <= 0.01 * jump_a && linf_b / jump_b > linf_a / jump_a;
    report(10, "variable vs constant tau", ok,
           fmt("T Linf/jump: lambda=1e-7 -> %.3f%% (tol 1%%), lambda=0.02 -> %.3f%%",
               100.0 * linf_a / jump_a, 100.0 * linf_b / jump_b));
}

}  // namespace

int main() {
    std::printf("acceptance suite: 10 criteria\n");
    criterion_7_mls_suite();
    criterion_8_dmaxwell();
    criterion_9_riemann();
    criterion_1_equilibrium();
    criterion_2_conservation();
    criterion_3_cfl();
    criterion_4_jitter();
    FluidRuns runs;
    criterion_5_fluid_limit(runs);
    criterion_6_grid_reduction(runs);
    criterion_10_tau_modes();

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
