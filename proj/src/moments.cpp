#include "kbgk/moments.hpp"

#include <cmath>
#include <stdexcept>

namespace kbgk {

Moments compute_moments(std::span<const double> cube, const VelocityGrid& vgrid) {
    const int n = vgrid.count();
    const std::size_t expect = vgrid.cube_size();
    if (cube.size() != expect)
        throw std::invalid_argument("compute_moments: cube dimension mismatch");

    const double* v = vgrid.nodes.data();
    double s0 = 0.0, sx = 0.0, sy = 0.0, sz = 0.0, s2 = 0.0;

    const double* f = cube.data();
    for (int j = 0; j < n; ++j) {
        const double vj = v[j];
        const double vj2 = vj * vj;
        for (int k = 0; k < n; ++k) {
            const double vk = v[k];
            double r0 = 0.0, r1 = 0.0, r2 = 0.0;
            for (int l = 0; l < n; ++l) {
                const double fv = f[l];
                r0 += fv;
                r1 += v[l] * fv;
                r2 += v[l] * v[l] * fv;
            }
            f += n;
            s0 += r0;
            sx += vj * r0;
            sy += vk * r0;
            sz += r1;
            s2 += (vj2 + vk * vk) * r0 + r2;
        }
    }

    const double w = vgrid.dv * vgrid.dv * vgrid.dv;
    Moments m;
    m.rho = s0 * w;
    m.rhoU = {sx * w, sy * w, sz * w};
    m.E = 0.5 * s2 * w;
    return m;
}

MacroState macro_from_moments(const Moments& m, double R) {
    if (m.rho <= 0.0)
        throw std::runtime_error("macro_from_moments: nonpositive density");
    MacroState s;
    s.rho = m.rho;
    s.U = {m.rhoU[0] / m.rho, m.rhoU[1] / m.rho, m.rhoU[2] / m.rho};
    s.E = m.E;
    s.e = m.E / m.rho - 0.5 * norm2(s.U);
    if (s.e <= 0.0)
        throw std::runtime_error("macro_from_moments: nonpositive internal energy");
    s.T = (2.0 / 3.0) * s.e / R;
    s.p = s.rho * R * s.T;
    return s;
}

MacroState macro_from_primitive(double rho, const Vec3& U, double e, double R) {
    if (rho <= 0.0 || e <= 0.0)
        throw std::invalid_argument("macro_from_primitive: rho and e must be positive");
    MacroState s;
    s.rho = rho;
    s.U = U;
    s.e = e;
    s.T = (2.0 / 3.0) * e / R;
    s.E = rho * (e + 0.5 * norm2(U));
    s.p = rho * R * s.T;
    return s;
}

double eval_maxwellian(const MacroState& state, const Vec3& v, double R) {
    const double rt = R * state.T;
    const double pref = state.rho / std::pow(2.0 * M_PI * rt, 1.5);
    const Vec3 w{v[0] - state.U[0], v[1] - state.U[1], v[2] - state.U[2]};
    return pref * std::exp(-norm2(w) / (2.0 * rt));
}

void fill_maxwellian_cube(const MacroState& state, const VelocityGrid& vgrid,
                          double R, std::span<double> out) {
    const int n = vgrid.count();
    if (out.size() != vgrid.cube_size())
        throw std::invalid_argument("fill_maxwellian_cube: cube dimension mismatch");

    const double rt = R * state.T;
    const double inv2rt = 1.0 / (2.0 * rt);
    const double pref = state.rho / std::pow(2.0 * M_PI * rt, 1.5);

    std::vector<double> gx(n), gy(n), gz(n);
    for (int j = 0; j < n; ++j) {
        const double v = vgrid.nodes[j];
        double w;
        w = v - state.U[0]; gx[j] = std::exp(-w * w * inv2rt);
        w = v - state.U[1]; gy[j] = std::exp(-w * w * inv2rt);
        w = v - state.U[2]; gz[j] = std::exp(-w * w * inv2rt);
    }

    double* o = out.data();
    for (int j = 0; j < n; ++j) {
        const double aj = pref * gx[j];
        for (int k = 0; k < n; ++k) {
            const double ajk = aj * gy[k];
            for (int l = 0; l < n; ++l) *o++ = ajk * gz[l];
        }
    }
}

DistributionField init_maxwellian_field(const std::vector<MacroState>& macro,
                                        const PhysicalGrid& xgrid,
                                        const VelocityGrid& vgrid, double R) {
    if (macro.size() != static_cast<std::size_t>(xgrid.count()))
        throw std::invalid_argument("init_maxwellian_field: one MacroState per spatial point required");
    DistributionField f;
    f.xgrid = xgrid;
    f.vgrid = vgrid;
    f.values.resize(static_cast<std::size_t>(xgrid.count()) * vgrid.cube_size());
    for (int i = 0; i < xgrid.count(); ++i)
        fill_maxwellian_cube(macro[i], vgrid, R, f.cube(i));
    return f;
}

}  // namespace kbgk
