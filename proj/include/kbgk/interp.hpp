#pragma once

#include <span>
#include <vector>

#include "kbgk/core.hpp"

namespace kbgk {

enum class UpwindSign { none, plus, minus };

/// Neighbor indices sorted by distance to the query point, nearest first.
struct NeighborSet {
    std::vector<int> indices;
    double query = 0.0;
    double h = 0.0;
};

struct MlsConfig {
    double alpha = 6.0;
    double radius_factor = 2.5;
    bool upwind = false;
};

/// Linear interpolation on a sorted node set; x_query must lie within
/// [xs.front(), xs.back()].
double spline_interpolate(std::span<const double> xs, std::span<const double> values,
                          double x_query);

/// Points of `grid` within radius h of x_query, distance-sorted. With an
/// upwind sign only points on the upstream side are kept; the nearest point
/// is exempt from the filter (it anchors the constrained fit). Throws if
/// fewer than 2 admissible points remain.
NeighborSet find_neighbors(const PhysicalGrid& grid, double x_query, double h,
                           UpwindSign sign);

/// find_neighbors with the starvation fallback chain: upwind-filtered set,
/// then unfiltered at the same h, then h widened once by 1.5.
NeighborSet find_stencil(const PhysicalGrid& grid, double x_query, double h,
                         UpwindSign sign);

/// Gaussian weight with compact support: exp(-alpha (xj-xq)^2/h^2) for
/// |xj - xq| <= h, zero beyond.
double mls_weight(double x_j, double x_query, double h, double alpha);

/// Linear combination equivalent to the constrained MLS fit: the value at
/// x_query is sum coeff[m] * values[indices[m]].
struct MlsCoefficients {
    std::vector<int> indices;
    std::vector<double> coeff;
};

MlsCoefficients mls_coefficients(const NeighborSet& nbrs, const PhysicalGrid& grid,
                                 double x_query, const MlsConfig& cfg);

/// f(xq) = f1 + (xq - x1) df/dx, with the weighted least-squares slope
/// df/dx = sum_{j>=2} w_j (xj-x1)(fj-f1) / sum_{j>=2} w_j (xj-x1)^2
/// and x1 the nearest neighbor (exactness constraint at the anchor).
double mls_interpolate(const NeighborSet& nbrs, const PhysicalGrid& grid,
                       std::span<const double> values, double x_query,
                       const MlsConfig& cfg);

/// Same formula with the neighbor set drawn from interior points and the
/// query placed on the wall.
double mls_extrapolate_boundary(const NeighborSet& interior_nbrs,
                                const PhysicalGrid& grid,
                                std::span<const double> values, double x_boundary,
                                const MlsConfig& cfg);

}  // namespace kbgk
