#include "kbgk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kbgk {

double timestep_from_cfl(double cfl, double dx_avg, double v_max) {
    if (cfl <= 0.0 || dx_avg <= 0.0 || v_max <= 0.0)
        throw std::invalid_argument("timestep_from_cfl: arguments must be positive");
    return cfl * dx_avg / v_max;
}

double foot_point(double x, double v, double dt) { return x - v * dt; }

void relax(std::span<const double> f_tilde, std::span<const double> m_new,
           double tau, double dt, std::span<double> out) {
    if (tau <= 0.0) throw std::invalid_argument("relax: tau must be positive");
    const double wf = tau / (tau + dt);
    const double wm = dt / (tau + dt);
    for (std::size_t q = 0; q < out.size(); ++q)
        out[q] = wf * f_tilde[q] + wm * m_new[q];
}

double wall_density(std::span<const double> f_gamma, const WallSpec& wall,
                    const VelocityGrid& vgrid, double R) {
    const int n = vgrid.count();
    if (f_gamma.size() != vgrid.cube_size())
        throw std::invalid_argument("wall_density: cube dimension mismatch");

    MacroState unit = macro_from_primitive(1.0, wall.U_w, 1.5 * R * wall.T_w, R);
    std::vector<double> mhat(vgrid.cube_size());
    fill_maxwellian_cube(unit, vgrid, R, mhat);

    double num = 0.0, den = 0.0;
    std::size_t q = 0;
    for (int j = 0; j < n; ++j) {
        const double s = wall.normal * (vgrid.nodes[j] - wall.U_w[0]);
        if (s < 0.0) {
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l, ++q) num -= s * f_gamma[q];
        } else if (s > 0.0) {
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l, ++q) den += s * mhat[q];
        } else {
            q += static_cast<std::size_t>(n) * n;
        }
    }
    if (den <= 0.0)
        throw std::runtime_error("wall_density: degenerate grid, no outgoing flux");
    return num / den;
}

AdvectionPlan build_advection_plan(const PhysicalGrid& xgrid, const VelocityGrid& vgrid,
                                   double dt, Reconstruction method,
                                   const MlsConfig& mls, double h) {
    const auto& xs = xgrid.points;
    const int np = xgrid.count();
    const int nv = vgrid.count();

    AdvectionPlan plan;
    plan.dt = dt;
    plan.n_space = np;
    plan.n_vel = nv;
    plan.stencils.resize(static_cast<std::size_t>(np) * nv);

    // Ghost positions for the spline path are mirrored grid points; every
    // ghost carries the same wall-emission value, so only the first ghost
    // interval needs an explicit blend.
    const double pg_left = 2.0 * xgrid.a - xs[1];
    const double pg_right = 2.0 * xgrid.b - xs[np - 2];

    for (int j = 0; j < nv; ++j) {
        const double v = vgrid.nodes[j];
        UpwindSign sign = UpwindSign::none;
        if (mls.upwind) {
            if (v > 0.0) sign = UpwindSign::plus;
            else if (v < 0.0) sign = UpwindSign::minus;
        }

        for (int i = 0; i < np; ++i) {
            Stencil& st = plan.stencils[static_cast<std::size_t>(i) * nv + j];
            const double xq = foot_point(xs[i], v, dt);

            if (xq >= xgrid.a && xq <= xgrid.b) {
                if (method == Reconstruction::spline) {
                    auto it = std::upper_bound(xs.begin(), xs.end(), xq);
                    int k = (it == xs.end()) ? np - 2 : static_cast<int>(it - xs.begin()) - 1;
                    const double w = xs[k + 1] - xs[k];
                    st.idx = {k, k + 1};
                    st.coeff = {(xs[k + 1] - xq) / w, (xq - xs[k]) / w};
                } else {
                    NeighborSet ns = find_stencil(xgrid, xq, h, sign);
                    MlsCoefficients c = mls_coefficients(ns, xgrid, xq, mls);
                    st.idx = std::move(c.indices);
                    st.coeff = std::move(c.coeff);
                }
            } else if (xq < xgrid.a) {
                if (method == Reconstruction::spline && xq > pg_left) {
                    const double w = xgrid.a - pg_left;
                    st.idx = {-1, 0};
                    st.coeff = {(xgrid.a - xq) / w, (xq - pg_left) / w};
                } else {
                    st.idx = {-1};
                    st.coeff = {1.0};
                }
            } else {
                if (method == Reconstruction::spline && xq < pg_right) {
                    const double w = pg_right - xgrid.b;
                    st.idx = {-2, np - 1};
                    st.coeff = {(xq - xgrid.b) / w, (pg_right - xq) / w};
                } else {
                    st.idx = {-2};
                    st.coeff = {1.0};
                }
            }
        }
    }
    return plan;
}

void advect(const DistributionField& f, const AdvectionPlan& plan,
            const std::array<std::vector<double>, 2>& wall_cubes,
            DistributionField& f_tilde) {
    const int np = plan.n_space;
    const int nv = plan.n_vel;
    const std::size_t plane = static_cast<std::size_t>(nv) * nv;
    const std::size_t cube = plane * nv;

    f_tilde.xgrid = f.xgrid;
    f_tilde.vgrid = f.vgrid;
    f_tilde.values.assign(f.values.size(), 0.0);

    for (int i = 0; i < np; ++i) {
        double* dst_pt = f_tilde.values.data() + static_cast<std::size_t>(i) * cube;
        for (int j = 0; j < nv; ++j) {
            const Stencil& st = plan.at(i, j);
            double* dst = dst_pt + static_cast<std::size_t>(j) * plane;
            for (std::size_t m = 0; m < st.idx.size(); ++m) {
                const double c = st.coeff[m];
                const int idx = st.idx[m];
                const double* src;
                if (idx >= 0) {
                    src = f.values.data() + static_cast<std::size_t>(idx) * cube +
                          static_cast<std::size_t>(j) * plane;
                } else {
                    const auto& wc = wall_cubes[static_cast<std::size_t>(-idx - 1)];
                    if (wc.size() != cube)
                        throw std::runtime_error("advect: wall emission cube missing");
                    src = wc.data() + static_cast<std::size_t>(j) * plane;
                }
                for (std::size_t q = 0; q < plane; ++q) dst[q] += c * src[q];
            }
        }
    }
}

TargetMaxwellian build_target_maxwellian(std::span<const double> f_tilde_cube,
                                         const VelocityGrid& vgrid, MaxwellianMode mode,
                                         double R, std::span<double> out) {
    Moments m = compute_moments(f_tilde_cube, vgrid);
    TargetMaxwellian result;
    result.macro = macro_from_moments(m, R);

    if (mode == MaxwellianMode::continuous) {
        fill_maxwellian_cube(result.macro, vgrid, R, out);
        return result;
    }

    MomentTarget target;
    target.rho = m.rho;
    target.rhoU = m.rhoU;
    target.E = m.E;
    try {
        DMaxSolveResult sol = solve_discrete_maxwellian(target, vgrid);
        eval_discrete_maxwellian(sol.params, vgrid, out);
        result.dmax_iterations = sol.iterations;
    } catch (const std::exception&) {
        // Keep the run alive with the continuous closure; the caller counts
        // these fallbacks in the diagnostics.
        fill_maxwellian_cube(result.macro, vgrid, R, out);
        result.dmax_fallback = true;
    }
    return result;
}

SemiLagrangianSolver::SemiLagrangianSolver(const SolverConfig& cfg) : cfg_(cfg) {
    cfg_.validate();

    PhysicalGrid xg = build_regular_grid(cfg_.domain_a, cfg_.domain_b, cfg_.n_x);
    if (cfg_.jittered_grid) xg = jitter_grid(xg, cfg_.rng_seed);
    VelocityGrid vg = build_velocity_grid(cfg_.v_max, cfg_.n_v);

    f_.xgrid = xg;
    f_.vgrid = vg;
    f_tilde_.xgrid = xg;
    f_tilde_.vgrid = vg;

    dt_nominal_ = timestep_from_cfl(cfg_.cfl, xg.dx_avg, cfg_.v_max);
    mls_ = MlsConfig{cfg_.mls_alpha, cfg_.mls_radius_factor, cfg_.upwind_stencil};
    h_ = cfg_.mls_radius_factor * xg.dx_avg;

    const double R = cfg_.gas.R;
    walls_[0].point_index = 0;
    walls_[0].normal = 1.0;
    walls_[1].point_index = xg.count() - 1;
    walls_[1].normal = -1.0;
    if (cfg_.walls_from_initial_state) {
        walls_[0].U_w = {0.0, 0.0, 0.0};
        walls_[0].T_w = (2.0 / 3.0) * cfg_.left.e / R;
        walls_[1].U_w = {0.0, 0.0, 0.0};
        walls_[1].T_w = (2.0 / 3.0) * cfg_.right.e / R;
    } else {
        walls_[0].U_w = cfg_.wall_left.U_w;
        walls_[0].T_w = cfg_.wall_left.T_w;
        walls_[1].U_w = cfg_.wall_right.U_w;
        walls_[1].T_w = cfg_.wall_right.T_w;
    }

    init_field();
    init_tau();

    for (int w = 0; w < 2; ++w) {
        MacroState unit = macro_from_primitive(1.0, walls_[w].U_w,
                                               1.5 * R * walls_[w].T_w, R);
        wall_unit_cube_[w].resize(vg.cube_size());
        fill_maxwellian_cube(unit, vg, R, wall_unit_cube_[w]);
        rho_w_[w] = wall_density(f_.cube(walls_[w].point_index), walls_[w], vg, R);
        wall_cube_[w].resize(vg.cube_size());
    }

    m_cube_.resize(vg.cube_size());
}

void SemiLagrangianSolver::init_field() {
    const double R = cfg_.gas.R;
    macro_.clear();
    macro_.reserve(f_.xgrid.count());
    for (double x : f_.xgrid.points) {
        const SideState& s = (x < cfg_.diaphragm) ? cfg_.left : cfg_.right;
        macro_.push_back(macro_from_primitive(s.rho, s.U, s.e, R));
    }
    f_ = init_maxwellian_field(macro_, f_.xgrid, f_.vgrid, R);
    f_tilde_.values.resize(f_.values.size());
}

void SemiLagrangianSolver::init_tau() {
    const double R = cfg_.gas.R;
    const double T_l = (2.0 / 3.0) * cfg_.left.e / R;
    const double T_r = (2.0 / 3.0) * cfg_.right.e / R;
    double tau_l = cfg_.tau_l_override > 0.0 ? cfg_.tau_l_override
                                             : relaxation_time(cfg_.lambda_l, T_l, R);
    double tau_r = cfg_.tau_r_override > 0.0 ? cfg_.tau_r_override
                                             : relaxation_time(cfg_.lambda_r, T_r, R);
    tau_.clear();
    tau_.reserve(f_.xgrid.count());
    for (double x : f_.xgrid.points)
        tau_.push_back(x <= cfg_.diaphragm ? tau_l : tau_r);
}

void SemiLagrangianSolver::ensure_plan(double dt) {
    if (plan_valid_ && plan_.dt == dt) return;
    plan_ = build_advection_plan(f_.xgrid, f_.vgrid, dt, cfg_.reconstruction, mls_, h_);
    plan_valid_ = true;
}

void SemiLagrangianSolver::refresh_wall_emission() {
    for (int w = 0; w < 2; ++w) {
        const double rw = rho_w_[w];
        const auto& unit = wall_unit_cube_[w];
        auto& cube = wall_cube_[w];
        for (std::size_t q = 0; q < cube.size(); ++q) cube[q] = rw * unit[q];
    }
}

void SemiLagrangianSolver::update_tau_variable() {
    const double R = cfg_.gas.R;
    for (int i = 0; i < f_.xgrid.count(); ++i) {
        const double lam = mean_free_path(macro_[i].rho, cfg_.gas);
        tau_[i] = relaxation_time(lam, macro_[i].T, R);
    }
}

void SemiLagrangianSolver::apply_diffuse_boundary(DistributionField& f) {
    const double R = cfg_.gas.R;
    const VelocityGrid& vg = f.vgrid;
    const auto& xs = f.xgrid.points;
    const int np = f.xgrid.count();
    const int n = vg.count();

    for (int w = 0; w < 2; ++w) {
        const WallSpec& wall = walls_[w];
        const double pos = xs[wall.point_index];

        // Interior-only stencil for the extrapolated incoming half.
        std::vector<int> cand;
        double h = h_;
        for (int widen = 0; widen < 2 && cand.size() < 2; ++widen) {
            cand.clear();
            for (int i = 1; i < np - 1; ++i)
                if (std::abs(xs[i] - pos) <= h) cand.push_back(i);
            if (cand.size() < 2) h *= 1.5;
        }
        if (cand.size() < 2)
            throw std::runtime_error("apply_diffuse_boundary: too few interior neighbors");
        std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
            return std::abs(xs[a] - pos) < std::abs(xs[b] - pos);
        });

        NeighborSet ns;
        ns.indices = cand;
        ns.query = pos;
        ns.h = h;
        MlsCoefficients c = mls_coefficients(ns, f.xgrid, pos, mls_);

        std::vector<double> f_gamma(vg.cube_size(), 0.0);
        for (std::size_t m = 0; m < c.indices.size(); ++m) {
            const double cm = c.coeff[m];
            auto src = f.cube(c.indices[m]);
            for (std::size_t q = 0; q < f_gamma.size(); ++q) f_gamma[q] += cm * src[q];
        }

        const double rw = wall_density(f_gamma, wall, vg, R);
        rho_w_[w] = rw;

        auto dst = f.cube(wall.point_index);
        const auto& unit = wall_unit_cube_[w];
        std::size_t q = 0;
        for (int j = 0; j < n; ++j) {
            const double s = wall.normal * (vg.nodes[j] - wall.U_w[0]);
            const std::size_t plane = static_cast<std::size_t>(n) * n;
            if (s > 0.0) {
                for (std::size_t r = 0; r < plane; ++r, ++q) dst[q] = rw * unit[q];
            } else {
                for (std::size_t r = 0; r < plane; ++r, ++q) dst[q] = f_gamma[q];
            }
        }

        macro_[wall.point_index] =
            macro_from_moments(compute_moments(dst, vg), R);
    }
}

bool SemiLagrangianSolver::step() {
    const double remaining = cfg_.t_final - t_;
    if (remaining <= 1e-14 * cfg_.t_final) return false;
    const double dt = std::min(dt_nominal_, remaining);

    ensure_plan(dt);
    refresh_wall_emission();
    advect(f_, plan_, wall_cube_, f_tilde_);

    StepDiagnostics d;
    d.dt = dt;

    const double R = cfg_.gas.R;
    const int np = f_.xgrid.count();
    for (int i = 0; i < np; ++i) {
        auto ft = f_tilde_.cube(i);
        TargetMaxwellian tm;
        try {
            tm = build_target_maxwellian(ft, f_.vgrid, cfg_.maxwellian_mode, R, m_cube_);
        } catch (const std::exception& ex) {
            throw std::runtime_error("step aborted at t=" + std::to_string(t_) +
                                     ", point " + std::to_string(i) + ": " + ex.what());
        }
        macro_[i] = tm.macro;
        if (cfg_.maxwellian_mode == MaxwellianMode::discrete) {
            ++d.dmax_solves;
            d.dmax_total_iterations += tm.dmax_iterations;
            d.dmax_max_iterations = std::max(d.dmax_max_iterations, tm.dmax_iterations);
            if (tm.dmax_fallback) ++d.dmax_fallbacks;
        }

        // Relaxation conservation: moments of f^{n+1} differ from those of
        // f~ by dt/(tau+dt) times the Maxwellian moment error. Scales:
        // rho for mass, rho v_max for momentum, E for energy.
        Moments mm = compute_moments(m_cube_, f_.vgrid);
        const double wfac = dt / (tau_[i] + dt);
        const double mom_scale = tm.macro.rho * cfg_.v_max;
        double mis = std::abs(mm.rho - tm.macro.rho) / tm.macro.rho;
        for (int a = 0; a < 3; ++a)
            mis = std::max(mis, std::abs(mm.rhoU[a] - tm.macro.rho * tm.macro.U[a]) / mom_scale);
        mis = std::max(mis, std::abs(mm.E - tm.macro.E) / tm.macro.E);
        d.max_moment_mismatch = std::max(d.max_moment_mismatch, wfac * mis);

        relax(ft, m_cube_, tau_[i], dt, f_.cube(i));
    }

    apply_diffuse_boundary(f_);
    if (cfg_.tau_mode == TauMode::variable) update_tau_variable();

    t_ += dt;
    d.t = t_;

    // Trapezoid mass and field extrema.
    const auto& xs = f_.xgrid.points;
    double mass = 0.0;
    for (int i = 0; i < np; ++i) {
        double wgt;
        if (i == 0) wgt = 0.5 * (xs[1] - xs[0]);
        else if (i == np - 1) wgt = 0.5 * (xs[np - 1] - xs[np - 2]);
        else wgt = 0.5 * (xs[i + 1] - xs[i - 1]);
        mass += macro_[i].rho * wgt;
    }
    d.total_mass = mass;
    auto [mn, mx] = std::minmax_element(f_.values.begin(), f_.values.end());
    d.min_f = *mn;
    d.max_f = *mx;

    diag_ = d;
    history_.push_back(d);
    return true;
}

void SemiLagrangianSolver::run_to_final() {
    while (step()) {
    }
}

}  // namespace kbgk
