#include "hmfx/caloric.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "hmfx/error.hpp"
#include "hmfx/numerics.hpp"

namespace hmfx {

namespace {

// Polar breakpoints adapted to the angular kernel width w = 2/s.
std::vector<double> polar_breaks(double s) {
  const double pi = std::numbers::pi;
  std::vector<double> b{0.0};
  const double w = s > 0 ? 2.0 / s : pi;
  if (w > 0.5) {
    for (int q = 1; q <= 4; ++q) b.push_back(q * pi / 4);
    return b;
  }
  for (double e = w; e < pi - 0.25 * w; e *= 2) b.push_back(e);
  b.push_back(pi);
  return b;
}

// ∫_0^∞ ρ^k exp(-(ρ - μ)²/4) dρ for k = 0..kmax via M_{k+1} = μ M_k + 2k M_{k-1}.
std::vector<double> gaussian_moments(double mu, int kmax) {
  std::vector<double> m(kmax + 1);
  m[0] = std::sqrt(std::numbers::pi) * std::erfc(-0.5 * mu);
  if (kmax >= 1) m[1] = mu * m[0] + 2 * std::exp(-0.25 * mu * mu);
  for (int k = 1; k < kmax; ++k) m[k + 1] = mu * m[k] + 2 * k * m[k - 1];
  return m;
}

// Unnormalized reduced kernel for R^3: exp(-s²(1-c²)/4) M_2(s c).
double reduced_kernel3(double s, double c) {
  const double mu = s * c;
  const double m0 = std::sqrt(std::numbers::pi) * std::erfc(-0.5 * mu);
  const double m2 = (2 + mu * mu) * m0 + 2 * mu * std::exp(-0.25 * mu * mu);
  return std::exp(-0.25 * s * s * (1 - c * c)) * m2;
}

}  // namespace

CaloricExtension::CaloricExtension(BoundaryMap u0, CaloricOptions options)
    : u0_(std::move(u0)), options_(options) {
  if (options_.panel_order < 2 || options_.azimuth < 4)
    fail(ErrorKind::Config, "caloric extension: quadrature too coarse");
}

void CaloricExtension::evaluate_with(const Vec3& x, double t, int order, int azimuth,
                                     double* out) const {
  if (!(t > 0)) fail(ErrorKind::TimeOrder, "caloric extension needs t > 0");
  const int m = u0_.components();
  const double r = x.norm();
  const double s = r / std::sqrt(t);
  Vec3 pole = r > 0 ? Vec3(x / r) : Vec3::UnitZ();
  Vec3 e1 = std::abs(pole.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (e1 - e1.dot(pole) * pole).normalized();
  const Vec3 e2 = pole.cross(e1);

  std::vector<double> cb(azimuth), sb(azimuth);
  for (int q = 0; q < azimuth; ++q) {
    const double beta = 2 * std::numbers::pi * (q + 0.5) / azimuth;
    cb[q] = std::cos(beta);
    sb[q] = std::sin(beta);
  }
  const auto rule = gauss_legendre(order);
  const auto breaks = polar_breaks(s);
  std::vector<double> acc(m, 0.0), val(m);
  double mass = 0.0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    for (int g = 0; g < order; ++g) {
      const double alpha = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[g];
      const double ca = std::cos(alpha), sa = std::sin(alpha);
      const double w = 0.5 * (b - a) * rule.weights[g] * sa * reduced_kernel3(s, ca);
      if (w == 0.0) continue;
      for (int q = 0; q < azimuth; ++q) {
        const Vec3 omega = ca * pole + sa * (cb[q] * e1 + sb[q] * e2);
        u0_(omega, val.data());
        for (int c = 0; c < m; ++c) acc[c] += w * val[c];
      }
      mass += w * azimuth;
    }
  }
  for (int c = 0; c < m; ++c) out[c] = acc[c] / mass;
}

void CaloricExtension::evaluate(const Vec3& x, double t, double* out) const {
  evaluate_with(x, t, options_.panel_order, options_.azimuth, out);
}

double CaloricExtension::error_estimate(const Vec3& x, double t) const {
  const int m = u0_.components();
  std::vector<double> a(m), b(m);
  evaluate_with(x, t, options_.panel_order, options_.azimuth, a.data());
  evaluate_with(x, t, 2 * options_.panel_order, 2 * options_.azimuth, b.data());
  double sq = 0;
  for (int c = 0; c < m; ++c) sq += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(sq);
}

void CaloricExtension::evaluate_checked(const Vec3& x, double t, double* out) const {
  const double err = error_estimate(x, t);
  if (err > options_.tolerance)
    fail(ErrorKind::Accuracy, "caloric extension self-estimate " + std::to_string(err) +
                                  " exceeds tolerance " + std::to_string(options_.tolerance));
  evaluate(x, t, out);
}

MapField CaloricExtension::fill(const SpaceGridPtr& grid, Exec exec) const {
  MapField field = MapField::sample(
      grid, u0_.components(), [this](const Vec3& x, double* out) { evaluate(x, 1.0, out); },
      exec);
  if (options_.check_stride > 0) {
    const SpaceGrid& g = *grid;
    const std::size_t per_shell = g.sphere.size();
    for (std::size_t node = 0; node < g.node_count(); node += options_.check_stride) {
      const std::size_t i = node / per_shell;
      const int j = static_cast<int>((node % per_shell) / g.sphere.n_phi());
      const int k = static_cast<int>(node % g.sphere.n_phi());
      const double err = error_estimate(g.position(i, j, k));
      if (err > options_.tolerance)
        fail(ErrorKind::Accuracy, "caloric fill self-estimate " + std::to_string(err) +
                                      " exceeds tolerance at node " + std::to_string(node));
    }
  }
  return field;
}

CorotCaloric corotational_caloric(int n, double h_inf, double r, double t) {
  if (n < 2) fail(ErrorKind::Config, "corotational caloric: n >= 2");
  if (!(t > 0)) fail(ErrorKind::TimeOrder, "caloric extension needs t > 0");
  const double s = r / std::sqrt(t);
  const auto rule = gauss_legendre(16);
  const auto breaks = polar_breaks(s);
  double first = 0, mass = 0;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    for (int g = 0; g < 16; ++g) {
      const double alpha = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[g];
      const double ca = std::cos(alpha), sa = std::sin(alpha);
      const auto mom = gaussian_moments(s * ca, n - 1);
      const double kern = std::exp(-0.25 * s * s * sa * sa) * mom[n - 1];
      const double w = 0.5 * (b - a) * rule.weights[g] * std::pow(sa, n - 2) * kern;
      first += w * ca;
      mass += w;
    }
  }
  return {std::sin(h_inf) * first / mass, std::cos(h_inf)};
}

MapField corotational_caloric_field(const SpaceGridPtr& grid, double h_inf) {
  const SpaceGrid& g = *grid;
  MapField out(grid, 4);
  const int nt = g.sphere.n_theta(), np = g.sphere.n_phi();
  for (std::size_t i = 0; i < g.radial.size(); ++i) {
    const auto v = corotational_caloric(3, h_inf, g.radial[i]);
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < np; ++k) {
        const Vec3 w = g.sphere.direction(j, k);
        double* o = out.at(i, j, k);
        o[0] = i == 0 ? 0.0 : v.radial * w.x();
        o[1] = i == 0 ? 0.0 : v.radial * w.y();
        o[2] = i == 0 ? 0.0 : v.radial * w.z();
        o[3] = v.axial;
      }
  }
  return out;
}

}  // namespace hmfx
