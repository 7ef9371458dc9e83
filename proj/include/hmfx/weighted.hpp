#pragma once

#include <span>
#include <vector>

#include "hmfx/boundary.hpp"
#include "hmfx/field.hpp"

namespace hmfx {

/// f(x) = |x|²/4 + n/2; Δ_f = Δ + (x/2)·∇ satisfies Δ_f f = f.
double potential(double r, int n);

/// Δ_f on a full field (n = 3). Interior shells use three-point radial
/// differences with the flux-form sphere Laplacian; the center uses the
/// first-shell average; the outer shell uses one-sided four-point weights.
MapField weighted_laplacian(const MapField& field, Exec exec = Exec::Serial);

/// Raw-array kernel behind weighted_laplacian; in and out hold node_count * m values.
void apply_weighted_laplacian(const SpaceGrid& grid, int m, const double* in, double* out,
                              Exec exec);

/// Radial form g'' + ((n-1)/r + r/2) g' for profile samples. Node 0 assumes an
/// even extension (n g''(0)); the last node uses one-sided weights.
std::vector<double> weighted_laplacian_radial(const RadialGrid& grid, std::span<const double> g,
                                              int n);

/// Forward heat kernel (4πt)^{-n/2} exp(-|x - y|²/(4t)).
double heat_kernel(int n, double t, double dist_sq);

/// Backward kernel G_{(x0,t0)}(x, t); requires t < t0.
double backward_heat_weight(int n, std::span<const double> x0, double t0,
                            std::span<const double> x, double t);

/// Cutoff η: 0 on [0, 1], 1 on [2, ∞), quintic in between.
double barycentric_cutoff(double r);

/// (1 - η) P + η u0(x/|x|), the simple extension of u0 into the ball.
MapField barycentric_extension(const BoundaryMap& u0, std::span<const double> pole,
                               const SpaceGridPtr& grid, Exec exec = Exec::Serial);

}  // namespace hmfx
