#include "hmfx/weighted.hpp"

#include <cmath>
#include <numbers>

#include "hmfx/error.hpp"
#include "hmfx/numerics.hpp"

namespace hmfx {

double potential(double r, int n) { return 0.25 * r * r + 0.5 * n; }

void apply_weighted_laplacian(const SpaceGrid& g, int m, const double* in, double* out,
                              Exec exec) {
  const SphereGrid& s = g.sphere;
  const int nt = s.n_theta(), np = s.n_phi();
  const std::size_t per_shell = s.size();
  const std::size_t shells = g.radial.size();

  {
    const double r1 = g.radial[1];
    for (int c = 0; c < m; ++c) {
      double avg = 0;
      for (int j = 0; j < nt; ++j) {
        double ring = 0;
        for (int k = 0; k < np; ++k) ring += in[g.node(1, j, k) * m + c];
        avg += s.weight(j) * ring;
      }
      avg /= 4 * std::numbers::pi;
      const double lap = 6.0 * (avg - in[c]) / (r1 * r1);
      for (std::size_t q = 0; q < per_shell; ++q) out[q * m + c] = lap;
    }
  }

  for_each_index(exec, (shells - 1) * per_shell, [&](std::size_t idx) {
    const std::size_t i = idx / per_shell + 1;
    const int j = static_cast<int>((idx % per_shell) / np);
    const int k = static_cast<int>(idx % np);
    const double r = g.radial[i];
    const std::size_t first = g.radial_first(i);
    const auto& w1 = g.radial_d1(i);
    const auto& w2 = g.radial_d2(i);
    const double drift = 2.0 / r + 0.5 * r;
    const double inv_r2 = 1.0 / (r * r);
    const std::size_t self = g.node(i, j, k);
    const std::size_t north = j > 0 ? g.node(i, j - 1, k) : self;
    const std::size_t south = j < nt - 1 ? g.node(i, j + 1, k) : self;
    const std::size_t east = g.node(i, j, s.wrap(k + 1));
    const std::size_t west = g.node(i, j, s.wrap(k - 1));
    const double cn = s.lap_north(j), cs = s.lap_south(j), ca = s.lap_azimuthal(j);
    for (int c = 0; c < m; ++c) {
      double d1 = 0, d2 = 0;
      for (std::size_t q = 0; q < w1.size(); ++q) {
        const double v = in[g.node(first + q, j, k) * m + c];
        d1 += w1[q] * v;
        d2 += w2[q] * v;
      }
      const double u = in[self * m + c];
      const double ang = cn * (in[north * m + c] - u) + cs * (in[south * m + c] - u) +
                         ca * (in[east * m + c] - 2 * u + in[west * m + c]);
      out[self * m + c] = d2 + drift * d1 + inv_r2 * ang;
    }
  });
}

MapField weighted_laplacian(const MapField& field, Exec exec) {
  MapField out(field.grid_ptr(), field.components());
  apply_weighted_laplacian(field.grid(), field.components(), field.data().data(),
                           out.data().data(), exec);
  return out;
}

std::vector<double> weighted_laplacian_radial(const RadialGrid& grid, std::span<const double> g,
                                              int n) {
  const std::size_t size = grid.size();
  if (g.size() != size) fail(ErrorKind::Grid, "profile length does not match the grid");
  const auto& r = grid.nodes();
  std::vector<double> out(size, 0.0);
  out[0] = n * 2.0 * (g[1] - g[0]) / (r[1] * r[1]);
  for (std::size_t i = 1; i < size; ++i) {
    const bool outer = i == size - 1;
    const std::size_t first = outer ? i - 3 : i - 1;
    const std::size_t width = outer ? 4 : 3;
    const auto w = fornberg_weights(r[i], std::span<const double>(&r[first], width), 2);
    double d1 = 0, d2 = 0;
    for (std::size_t q = 0; q < width; ++q) {
      d1 += w[1][q] * g[first + q];
      d2 += w[2][q] * g[first + q];
    }
    out[i] = d2 + ((n - 1) / r[i] + 0.5 * r[i]) * d1;
  }
  return out;
}

double heat_kernel(int n, double t, double dist_sq) {
  if (!(t > 0)) fail(ErrorKind::TimeOrder, "heat kernel needs t > 0");
  return std::pow(4 * std::numbers::pi * t, -0.5 * n) * std::exp(-dist_sq / (4 * t));
}

double backward_heat_weight(int n, std::span<const double> x0, double t0,
                            std::span<const double> x, double t) {
  if (!(t < t0)) fail(ErrorKind::TimeOrder, "backward heat weight needs t < t0");
  if (x0.size() != x.size() || static_cast<int>(x.size()) != n)
    fail(ErrorKind::Config, "backward heat weight: dimension mismatch");
  double sq = 0;
  for (int i = 0; i < n; ++i) sq += (x[i] - x0[i]) * (x[i] - x0[i]);
  return heat_kernel(n, t0 - t, sq);
}

double barycentric_cutoff(double r) { return smoothstep5(r - 1.0); }

MapField barycentric_extension(const BoundaryMap& u0, std::span<const double> pole,
                               const SpaceGridPtr& grid, Exec exec) {
  const int m = u0.components();
  if (static_cast<int>(pole.size()) != m) fail(ErrorKind::Config, "pole has wrong dimension");
  std::vector<double> p(pole.begin(), pole.end());
  return MapField::sample(
      grid, m,
      [&u0, p, m](const Vec3& x, double* out) {
        const double eta = barycentric_cutoff(x.norm());
        if (eta == 0.0) {
          for (int c = 0; c < m; ++c) out[c] = p[c];
          return;
        }
        u0.at(x, out);
        for (int c = 0; c < m; ++c) out[c] = (1 - eta) * p[c] + eta * out[c];
      },
      exec);
}

}  // namespace hmfx
