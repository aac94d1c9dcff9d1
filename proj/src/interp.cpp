#include "kbgk/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kbgk {

double spline_interpolate(std::span<const double> xs, std::span<const double> values,
                          double x_query) {
    if (xs.size() < 2 || xs.size() != values.size())
        throw std::invalid_argument("spline_interpolate: bad node set");
    if (x_query < xs.front() || x_query > xs.back())
        throw std::out_of_range("spline_interpolate: query outside node range");

    auto it = std::upper_bound(xs.begin(), xs.end(), x_query);
    std::size_t k = (it == xs.end()) ? xs.size() - 2
                                     : static_cast<std::size_t>(it - xs.begin()) - 1;
    const double x0 = xs[k], x1 = xs[k + 1];
    return (values[k] * (x1 - x_query) + values[k + 1] * (x_query - x0)) / (x1 - x0);
}

NeighborSet find_neighbors(const PhysicalGrid& grid, double x_query, double h,
                           UpwindSign sign) {
    if (h <= 0.0) throw std::invalid_argument("find_neighbors: h must be positive");

    const auto& xs = grid.points;
    auto lo = std::lower_bound(xs.begin(), xs.end(), x_query - h);
    auto hi = std::upper_bound(xs.begin(), xs.end(), x_query + h);

    int nearest = -1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> cand;
    for (auto it = lo; it != hi; ++it) {
        int idx = static_cast<int>(it - xs.begin());
        double dist = std::abs(xs[idx] - x_query);
        if (dist <= h) {
            cand.push_back(idx);
            if (dist < best) { best = dist; nearest = idx; }
        }
    }

    NeighborSet out;
    out.query = x_query;
    out.h = h;
    for (int idx : cand) {
        if (idx != nearest) {
            if (sign == UpwindSign::plus && xs[idx] > x_query) continue;
            if (sign == UpwindSign::minus && xs[idx] < x_query) continue;
        }
        out.indices.push_back(idx);
    }
    std::stable_sort(out.indices.begin(), out.indices.end(), [&](int a, int b) {
        return std::abs(xs[a] - x_query) < std::abs(xs[b] - x_query);
    });

    if (out.indices.size() < 2)
        throw std::runtime_error("find_neighbors: fewer than 2 admissible neighbors");
    return out;
}

NeighborSet find_stencil(const PhysicalGrid& grid, double x_query, double h,
                         UpwindSign sign) {
    try {
        return find_neighbors(grid, x_query, h, sign);
    } catch (const std::runtime_error&) {
    }
    if (sign != UpwindSign::none) {
        try {
            return find_neighbors(grid, x_query, h, UpwindSign::none);
        } catch (const std::runtime_error&) {
        }
    }
    return find_neighbors(grid, x_query, 1.5 * h, UpwindSign::none);
}

double mls_weight(double x_j, double x_query, double h, double alpha) {
    const double r = x_j - x_query;
    if (std::abs(r) > h) return 0.0;
    return std::exp(-alpha * r * r / (h * h));
}

MlsCoefficients mls_coefficients(const NeighborSet& nbrs, const PhysicalGrid& grid,
                                 double x_query, const MlsConfig& cfg) {
    const auto& xs = grid.points;
    const std::size_t m = nbrs.indices.size();
    if (m < 2) throw std::invalid_argument("mls_coefficients: need at least 2 neighbors");

    const double x1 = xs[nbrs.indices[0]];
    double num_coeff = 0.0;  // accumulates sum w_j (xj - x1)
    double denom = 0.0;

    std::vector<double> wd(m, 0.0);  // w_j (xj - x1) per non-anchor neighbor
    for (std::size_t j = 1; j < m; ++j) {
        const double xj = xs[nbrs.indices[j]];
        const double w = mls_weight(xj, x_query, nbrs.h, cfg.alpha);
        wd[j] = w * (xj - x1);
        denom += w * (xj - x1) * (xj - x1);
        num_coeff += wd[j];
    }
    if (denom <= 0.0)
        throw std::runtime_error("mls_coefficients: degenerate stencil (zero denominator)");

    const double scale = (x_query - x1) / denom;
    MlsCoefficients c;
    c.indices = nbrs.indices;
    c.coeff.resize(m);
    c.coeff[0] = 1.0 - scale * num_coeff;
    for (std::size_t j = 1; j < m; ++j) c.coeff[j] = scale * wd[j];
    return c;
}

double mls_interpolate(const NeighborSet& nbrs, const PhysicalGrid& grid,
                       std::span<const double> values, double x_query,
                       const MlsConfig& cfg) {
    MlsCoefficients c = mls_coefficients(nbrs, grid, x_query, cfg);
    double acc = 0.0;
    for (std::size_t j = 0; j < c.indices.size(); ++j)
        acc += c.coeff[j] * values[static_cast<std::size_t>(c.indices[j])];
    return acc;
}

double mls_extrapolate_boundary(const NeighborSet& interior_nbrs,
                                const PhysicalGrid& grid,
                                std::span<const double> values, double x_boundary,
                                const MlsConfig& cfg) {
    return mls_interpolate(interior_nbrs, grid, values, x_boundary, cfg);
}

}  // namespace kbgk
