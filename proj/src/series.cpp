#include "hmfx/series.hpp"

#include <cmath>
#include <functional>

#include "hmfx/error.hpp"

namespace hmfx {

double SphereMap::dot(std::size_t node, const SphereMap& other) const {
  const double* a = at(node);
  const double* b = other.at(node);
  double s = 0;
  for (int c = 0; c < m; ++c) s += a[c] * b[c];
  return s;
}

double SphereMap::max_norm() const {
  double best = 0;
  for (std::size_t q = 0; q < nodes; ++q) best = std::max(best, std::sqrt(dot(q, *this)));
  return best;
}

LatLongCalculus::LatLongCalculus(SphereGrid grid) : grid_(std::move(grid)) {}

SphereMap LatLongCalculus::sample(int m, const std::function<void(const Vec3&, double*)>& fn) const {
  SphereMap u(grid_.size(), m);
  for (int j = 0; j < grid_.n_theta(); ++j)
    for (int k = 0; k < grid_.n_phi(); ++k)
      fn(grid_.direction(j, k), u.at(static_cast<std::size_t>(j) * grid_.n_phi() + k));
  return u;
}

SphereMap LatLongCalculus::laplacian(const SphereMap& u) const {
  const int nt = grid_.n_theta(), np = grid_.n_phi(), m = u.m;
  SphereMap out(u.nodes, m);
  const auto idx = [np](int j, int k) { return static_cast<std::size_t>(j) * np + k; };
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < np; ++k) {
      const double* self = u.at(idx(j, k));
      const double* north = u.at(idx(j > 0 ? j - 1 : j, k));
      const double* south = u.at(idx(j < nt - 1 ? j + 1 : j, k));
      const double* east = u.at(idx(j, grid_.wrap(k + 1)));
      const double* west = u.at(idx(j, grid_.wrap(k - 1)));
      double* o = out.at(idx(j, k));
      for (int c = 0; c < m; ++c)
        o[c] = grid_.lap_north(j) * (north[c] - self[c]) + grid_.lap_south(j) * (south[c] - self[c]) +
               grid_.lap_azimuthal(j) * (east[c] - 2 * self[c] + west[c]);
    }
  return out;
}

std::vector<double> LatLongCalculus::gradient_inner(const SphereMap& a, const SphereMap& b) const {
  const int nt = grid_.n_theta(), np = grid_.n_phi(), m = a.m;
  const double dt = grid_.dtheta_denominator(), dp = grid_.dphi_denominator();
  std::vector<double> out(a.nodes);
  const auto idx = [np](int j, int k) { return static_cast<std::size_t>(j) * np + k; };
  for (int j = 0; j < nt; ++j)
    for (int k = 0; k < np; ++k) {
      const std::size_t north = j > 0 ? idx(j - 1, k) : idx(0, grid_.across_pole(k));
      const std::size_t south = j < nt - 1 ? idx(j + 1, k) : idx(nt - 1, grid_.across_pole(k));
      const std::size_t east = idx(j, grid_.wrap(k + 1)), west = idx(j, grid_.wrap(k - 1));
      const double st = grid_.sin_theta(j);
      double s = 0;
      for (int c = 0; c < m; ++c) {
        const double at = (a.at(south)[c] - a.at(north)[c]) / dt;
        const double bt = (b.at(south)[c] - b.at(north)[c]) / dt;
        const double ap = (a.at(east)[c] - a.at(west)[c]) / dp;
        const double bp = (b.at(east)[c] - b.at(west)[c]) / dp;
        s += at * bt + ap * bp / (st * st);
      }
      out[idx(j, k)] = s;
    }
  return out;
}

CorotationalCalculus::CorotationalCalculus(int n) : n_(n) {
  if (n < 2) fail(ErrorKind::Config, "corotational calculus needs n >= 2");
}

SphereMap CorotationalCalculus::laplacian(const SphereMap& u) const {
  if (u.m != 2 || u.nodes != 1) fail(ErrorKind::Config, "corotational data is a single (α, β) pair");
  SphereMap out(1, 2);
  out.values[0] = -(n_ - 1) * u.values[0];
  out.values[1] = 0.0;
  return out;
}

std::vector<double> CorotationalCalculus::gradient_inner(const SphereMap& a, const SphereMap& b) const {
  return {(n_ - 1) * a.values[0] * b.values[0]};
}

SphereMap sphere_laplacian(const SphereGrid& grid, const SphereMap& u) {
  if (grid.n_theta() < 8 || grid.n_phi() < 16)
    fail(ErrorKind::Grid, "sphere Laplacian needs at least a 16 x 8 grid");
  if (u.nodes != grid.size()) fail(ErrorKind::Grid, "sphere map does not match the grid");
  return LatLongCalculus(grid).laplacian(u);
}

SphereMap AsymptoticSeries::evaluate(double r) const {
  SphereMap out(u.front().nodes, u.front().m);
  double scale = 1.0;
  const double inv = 1.0 / (r * r);
  for (const auto& term : u) {
    for (std::size_t q = 0; q < out.values.size(); ++q) out.values[q] += scale * term.values[q];
    scale *= inv;
  }
  return out;
}

namespace {

void check_inputs(const SphereCalculus& calc, const SphereMap& u0, int order) {
  if (order < 0) fail(ErrorKind::Config, "series order must be non-negative");
  if (u0.nodes != calc.node_count()) fail(ErrorKind::Grid, "boundary data does not match the calculus");
  for (std::size_t q = 0; q < u0.nodes; ++q)
    if (std::abs(u0.dot(q, u0) - 1.0) > 1e-10)
      fail(ErrorKind::GeometryDomain, "boundary data is off the sphere at node " + std::to_string(q));
}

}  // namespace

AsymptoticSeries hmf_coefficients(const SphereCalculus& calc, const SphereMap& u0, int order) {
  check_inputs(calc, u0, order);
  const int n = calc.dimension();
  const std::size_t nodes = u0.nodes;
  const int m = u0.m;
  AsymptoticSeries s;
  s.flow = Flow::HarmonicMap;
  s.n = n;
  s.u.push_back(u0);
  s.ledger.push_back(std::vector<double>(nodes, 0.0));
  for (int i = 1; i <= order; ++i) {
    // b_i = Σ_{j=0}^{i-1} [4 j (i-1-j) ⟨u_j, u_{i-1-j}⟩ + ⟨∇u_j, ∇u_{i-1-j}⟩]
    std::vector<double> b(nodes, 0.0);
    for (int j = 0; j <= i - 1; ++j) {
      const auto& a = s.u[j];
      const auto& c = s.u[i - 1 - j];
      const auto grad = calc.gradient_inner(a, c);
      for (std::size_t q = 0; q < nodes; ++q)
        b[q] += 4.0 * j * (i - 1 - j) * a.dot(q, c) + grad[q];
    }
    s.ledger.push_back(b);
    SphereMap next = calc.laplacian(s.u[i - 1]);
    const double lin = 2.0 * (i - 1) * (2 * i - n);
    for (std::size_t q = 0; q < nodes; ++q) {
      double* o = next.at(q);
      const double* prev = s.u[i - 1].at(q);
      for (int c = 0; c < m; ++c) o[c] += lin * prev[c];
      for (int l = 1; l <= i; ++l) {
        const double* ul = s.u[i - l].at(q);
        for (int c = 0; c < m; ++c) o[c] += s.ledger[l][q] * ul[c];
      }
      for (int c = 0; c < m; ++c) o[c] /= i;
    }
    s.u.push_back(std::move(next));
  }
  return s;
}

AsymptoticSeries gl_coefficients(const SphereCalculus& calc, const SphereMap& u0, double K,
                                 int order) {
  check_inputs(calc, u0, order);
  if (!(K > 0)) fail(ErrorKind::Config, "Ginzburg-Landau series needs K > 0");
  const int n = calc.dimension();
  const std::size_t nodes = u0.nodes;
  const int m = u0.m;
  AsymptoticSeries s;
  s.flow = Flow::GinzburgLandau;
  s.K = K;
  s.n = n;
  s.u.push_back(u0);
  s.ledger.push_back(std::vector<double>(nodes, 0.0));  // a_0 := 0 by convention
  for (int i = 1; i <= order; ++i) {
    // i u_i + 2K ⟨u_i,u_0⟩ u_0 = Δ_S u_{i-1} + 2(i-1)(2i-n) u_{i-1}
    //     - K Σ_{j=1}^{i-1} a_j u_{i-j} - K Σ_{j=1}^{i-1} ⟨u_j,u_{i-j}⟩ u_0
    SphereMap rhs = calc.laplacian(s.u[i - 1]);
    const double lin = 2.0 * (i - 1) * (2 * i - n);
    SphereMap next(nodes, m);
    for (std::size_t q = 0; q < nodes; ++q) {
      double* o = rhs.at(q);
      const double* prev = s.u[i - 1].at(q);
      const double* base = s.u[0].at(q);
      for (int c = 0; c < m; ++c) o[c] += lin * prev[c];
      double cross = 0;
      for (int j = 1; j <= i - 1; ++j) {
        const double* uj = s.u[i - j].at(q);
        for (int c = 0; c < m; ++c) o[c] -= K * s.ledger[j][q] * uj[c];
        cross += s.u[j].dot(q, s.u[i - j]);
      }
      for (int c = 0; c < m; ++c) o[c] -= K * cross * base[c];
      double par = 0;
      for (int c = 0; c < m; ++c) par += o[c] * base[c];
      double* un = next.at(q);
      for (int c = 0; c < m; ++c)
        un[c] = (o[c] - par * base[c]) / i + par * base[c] / (i + 2 * K);
    }
    s.u.push_back(std::move(next));
    std::vector<double> a(nodes, 0.0);
    for (std::size_t q = 0; q < nodes; ++q)
      for (int j = 0; j <= i; ++j) a[q] += s.u[j].dot(q, s.u[i - j]);
    s.ledger.push_back(std::move(a));
  }
  return s;
}

double CorotSeries::radial(double r) const {
  double s = 0, p = 1;
  for (double a : alpha) s += a * p, p /= r * r;
  return s;
}

double CorotSeries::axial(double r) const {
  double s = 0, p = 1;
  for (double b : beta) s += b * p, p /= r * r;
  return s;
}

double CorotSeries::angle(double r) const { return std::atan2(radial(r), axial(r)); }

CorotSeries corotational_series(int n, double h_inf, int order, Flow flow, double K) {
  const CorotationalCalculus calc(n);
  SphereMap u0(1, 2);
  u0.values = {std::sin(h_inf), std::cos(h_inf)};
  const auto s = flow == Flow::HarmonicMap ? hmf_coefficients(calc, u0, order)
                                           : gl_coefficients(calc, u0, K, order);
  CorotSeries out;
  for (const auto& u : s.u) {
    out.alpha.push_back(u.values[0]);
    out.beta.push_back(u.values[1]);
  }
  return out;
}

}  // namespace hmfx
