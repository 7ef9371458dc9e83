#include "hmfx/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmfx/error.hpp"
#include "hmfx/numerics.hpp"
#include "hmfx/series.hpp"
#include "hmfx/weighted.hpp"

namespace hmfx {

namespace {

constexpr double kSkipEnergy = 1e-10;

double sphere_area(int dim) {  // |S^dim|
  const double k = 0.5 * (dim + 1);
  return 2 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

// Local Lagrange interpolation of a radial profile sampled on grid nodes, with
// ghost values at -r_k given by the parity.
struct RadialInterp {
  std::vector<double> r, v;
  double parity = 1;

  std::pair<double, double> operator()(const RadialGrid& g, double x) const {
    const auto last = static_cast<long>(g.last());
    long k = static_cast<long>(g.interval(std::min(x, g.r_max())));
    long lo = std::min(k - 2, last - 5);
    std::array<double, 6> pos{}, val{};
    for (int q = 0; q < 6; ++q) {
      const long e = lo + q;
      const auto a = static_cast<std::size_t>(std::labs(e));
      pos[q] = e < 0 ? -r[a] : r[a];
      val[q] = e < 0 ? parity * v[a] : v[a];
    }
    const auto w = fornberg_weights(x, pos, 1);
    double f = 0, df = 0;
    for (int q = 0; q < 6; ++q) f += w[0][q] * val[q], df += w[1][q] * val[q];
    return {f, df};
  }
};

std::pair<double, double> series_pair(const std::vector<double>& c, double r) {
  double f = 0, df = 0, p = 1;
  for (std::size_t i = 0; i < c.size(); ++i) {
    f += c[i] * p;
    if (i > 0) df -= 2.0 * i * c[i] * p / r;
    p /= r * r;
  }
  return {f, df};
}

void check_time(double t) {
  if (!(t > 0)) fail(ErrorKind::TimeOrder, "evaluation time must be positive");
}

void check_point(const ExpanderView& view, const PointN& x) {
  if (x.size() != view.dimension()) fail(ErrorKind::Config, "probe dimension mismatch");
}

double unit_energy(const ExpanderView& view, const EnergyModel& model, const PointN& y,
                   double* pen_out = nullptr) {
  if (y.norm() > view.reach() * (1 + 1e-12))
    fail(ErrorKind::DomainExceeded, "evaluation point beyond the solution's reach");
  const int m = view.components();
  std::vector<double> u(m);
  view.value(y, u.data());
  const double pen = model.penalty_density(u.data(), m);
  if (pen_out) *pen_out = 0.5 * pen;
  return 0.5 * (view.jacobian(y).squaredNorm() + pen);
}

double ball_average(const ExpanderView& view, const PointN& x0, double radius, int order,
                    const std::function<double(const PointN&)>& f) {
  BallRuleOptions opt;
  opt.order = order;
  opt.reduced = view.equivariant();
  const auto rule = ball_quadrature(view.dimension(), x0, radius, opt);
  double s = 0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) s += rule.weights[q] * f(rule.points[q]);
  return s / rule.volume();
}

// b: 1 on [0, 1/2], 0 on [1, ∞).
double bump(double s) { return 1 - smoothstep5(2 * s - 1); }
double bump_derivative(double s) { return -2 * smoothstep5_derivative(2 * s - 1); }

double hessian_sq(const ExpanderView& view, const PointN& y) {
  const double h = 1e-4 * std::max(1.0, y.norm());
  double s = 0;
  PointN p = y;
  for (int l = 0; l < view.dimension(); ++l) {
    p[l] = y[l] + h;
    const Eigen::MatrixXd jp = view.jacobian(p);
    p[l] = y[l] - h;
    const Eigen::MatrixXd jm = view.jacobian(p);
    p[l] = y[l];
    s += ((jp - jm) / (2 * h)).squaredNorm();
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------- views

CorotationalView::CorotationalView(int n, Evaluator eval, double boundary_angle,
                                   bool singular_center, double reach)
    : n_(n), eval_(std::move(eval)), angle_(boundary_angle), singular_(singular_center),
      reach_(reach) {
  if (n < 2) fail(ErrorKind::Config, "corotational view needs n >= 2");
}

CorotationalView CorotationalView::from_profile(const CorotationalProfile& p, int series_order) {
  const bool gl = p.form == CorotationalProfile::Form::Modulus;
  const Flow flow = gl && p.K > 0 ? Flow::GinzburgLandau : Flow::HarmonicMap;
  const auto series = corotational_series(p.n, p.limit_angle, series_order, flow, p.K);
  const RadialGrid grid = p.grid;
  const double r_max = grid.r_max();
  Evaluator eval;
  if (gl) {
    RadialInterp ps{grid.nodes(), p.psi, -1}, ph{grid.nodes(), p.phi, 1};
    eval = [=](double r) {
      if (r > r_max) {
        const auto [a, da] = series_pair(series.alpha, r);
        const auto [b, db] = series_pair(series.beta, r);
        return RadialPair{a, da, b, db};
      }
      const auto [a, da] = ps(grid, r);
      const auto [b, db] = ph(grid, r);
      return RadialPair{a, da, b, db};
    };
  } else {
    RadialInterp h{grid.nodes(), p.h, p.singular_center ? 1.0 : -1.0};
    eval = [=](double r) {
      if (r > r_max) {
        const auto [a, da] = series_pair(series.alpha, r);
        const auto [b, db] = series_pair(series.beta, r);
        return RadialPair{a, da, b, db};
      }
      const auto [v, dv] = h(grid, r);
      return RadialPair{std::sin(v), std::cos(v) * dv, std::cos(v), -std::sin(v) * dv};
    };
  }
  return CorotationalView(p.n, eval, p.limit_angle, p.singular_center);
}

CorotationalView CorotationalView::equator(int n) {
  return CorotationalView(n, [](double) { return RadialPair{1, 0, 0, 0}; },
                          std::numbers::pi / 2, true);
}

CorotationalView CorotationalView::constant(int n) {
  return CorotationalView(n, [](double) { return RadialPair{}; }, 0.0);
}

void CorotationalView::value(const PointN& y, double* u) const {
  const double r = y.norm();
  const RadialPair f = eval_(r);
  for (int a = 0; a < n_; ++a) u[a] = r > 0 ? f.psi * y[a] / r : (a == 0 ? f.psi : 0.0);
  u[n_] = f.phi;
}

Eigen::MatrixXd CorotationalView::jacobian(const PointN& y) const {
  const double r = y.norm();
  const RadialPair f = eval_(r);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_ + 1, n_);
  if (r < 1e-12) {
    J.topRows(n_).diagonal().setConstant(f.dpsi);
    return J;
  }
  const PointN e = y / r;
  const Eigen::MatrixXd ee = e * e.transpose();
  J.topRows(n_) = f.dpsi * ee + (f.psi / r) * (Eigen::MatrixXd::Identity(n_, n_) - ee);
  J.row(n_) = f.dphi * e.transpose();
  return J;
}

double CorotationalView::boundary_gradient_sq(const PointN& x) const {
  const double s = std::sin(angle_);
  return (n_ - 1) * s * s / x.squaredNorm();
}

FieldView::FieldView(MapField u, Exec exec)
    : u_(std::move(u)), grad_(gradient(u_, exec)), boundary_(u_.grid_ptr(), 1) {
  const SpaceGrid& g = u_.grid();
  const std::size_t last = g.radial.last();
  const double R = g.radial.r_max();
  const int m = u_.components();
  for (int j = 0; j < g.sphere.n_theta(); ++j)
    for (int k = 0; k < g.sphere.n_phi(); ++k) {
      const Vec3 w = g.sphere.direction(j, k);
      const double* J = grad_.jacobian(g.node(last, j, k));
      double s = 0;
      for (int c = 0; c < m; ++c) {
        Vec3 row(J[3 * c], J[3 * c + 1], J[3 * c + 2]);
        row -= row.dot(w) * w;
        s += row.squaredNorm();
      }
      for (std::size_t i = 0; i < g.radial.size(); ++i) boundary_.at(i, j, k)[0] = s * R * R;
    }
}

void FieldView::value(const PointN& y, double* u) const {
  u_.interpolate(Vec3(y[0], y[1], y[2]), u);
}

Eigen::MatrixXd FieldView::jacobian(const PointN& y) const {
  const int m = u_.components();
  Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> J(m, 3);
  grad_.interpolate(Vec3(y[0], y[1], y[2]), J.data());
  return J;
}

double FieldView::boundary_gradient_sq(const PointN& x) const {
  const double r = x.norm();
  const Vec3 mid = (0.5 * reach() / r) * Vec3(x[0], x[1], x[2]);
  double s = 0;
  boundary_.interpolate(mid, &s);
  return s / (r * r);
}

// --------------------------------------------------------------- energy

double EnergyModel::penalty_density(const double* u, int m) const {
  switch (penalty) {
    case Penalty::None:
      return 0;
    case Penalty::GinzburgLandau: {
      double s = 0;
      for (int c = 0; c < m; ++c) s += u[c] * u[c];
      return 0.5 * K * (1 - s) * (1 - s);
    }
    case Penalty::ChenStruwe:
      return K * chi.value(sphere::dist_sq(u, m));
  }
  return 0;
}

EnergyModel EnergyModel::for_profile(const CorotationalProfile& p) {
  EnergyModel m;
  if (p.form == CorotationalProfile::Form::Modulus && p.K > 0) {
    m.penalty = Penalty::GinzburgLandau;
    m.K = p.K;
  }
  return m;
}

double energy_density(const ExpanderView& view, const EnergyModel& model, const PointN& x,
                      double t) {
  check_time(t);
  check_point(view, x);
  return unit_energy(view, model, x / std::sqrt(t)) / t;
}

double penalty_energy(const ExpanderView& view, const EnergyModel& model, const PointN& x,
                      double t) {
  check_time(t);
  check_point(view, x);
  double pen = 0;
  unit_energy(view, model, x / std::sqrt(t), &pen);
  return pen / t;
}

MapField pointwise_energy(const MapField& u, const EnergyModel& model, double t, Exec exec) {
  check_time(t);
  const GradientField g = gradient(u, exec);
  MapField e(u.grid_ptr(), 1);
  const int m = u.components();
  for_each_index(exec, u.node_count(), [&](std::size_t q) {
    const double* J = g.jacobian(q);
    double s = 0;
    for (int c = 0; c < 3 * m; ++c) s += J[c] * J[c];
    e.node_values(q)[0] = 0.5 * (s + model.penalty_density(u.node_values(q), m)) / t;
  });
  return e;
}

// ----------------------------------------------------------- quadrature

double BallQuadrature::volume() const {
  double s = 0;
  for (double w : weights) s += w;
  return s;
}

BallQuadrature ball_quadrature(int n, const PointN& center, double radius,
                               const BallRuleOptions& opt) {
  if (center.size() != n) fail(ErrorKind::Config, "ball center dimension mismatch");
  if (!(radius > opt.inner) || opt.inner < 0) fail(ErrorKind::Config, "bad ball radii");
  if (!opt.reduced && n != 3) fail(ErrorKind::Config, "full ball rule exists for n = 3 only");

  std::vector<double> breaks{opt.inner};
  if (opt.scale > 0)
    for (double b = opt.scale; b < radius; b *= 2)
      if (b > opt.inner * 1.01) breaks.push_back(b);
  for (double b : opt.breaks)
    if (b > opt.inner && b < radius) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(radius);

  BallQuadrature out;
  const int na = 2 * opt.order;
  if (opt.reduced) {
    PointN a = PointN::Zero(n), b = PointN::Zero(n);
    if (center.norm() > 0) a = center.normalized(); else a[0] = 1;
    Eigen::Index j = 0;
    a.cwiseAbs().minCoeff(&j);
    b[j] = 1;
    b -= b.dot(a) * a;
    b.normalize();
    const auto ang = gauss_legendre(na, 0.0, std::numbers::pi);
    const double area = sphere_area(n - 2);
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const auto rad = gauss_legendre(opt.order, breaks[p], breaks[p + 1]);
      for (int i = 0; i < opt.order; ++i) {
        const double s = rad.nodes[i];
        for (int q = 0; q < na; ++q) {
          const double th = ang.nodes[q];
          out.points.push_back(center + s * (std::cos(th) * a + std::sin(th) * b));
          out.weights.push_back(rad.weights[i] * std::pow(s, n - 1) * ang.weights[q] *
                                std::pow(std::sin(th), n - 2) * area);
        }
      }
    }
    return out;
  }
  const auto pol = gauss_legendre(na, -1.0, 1.0);
  const int naz = 2 * na;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const auto rad = gauss_legendre(opt.order, breaks[p], breaks[p + 1]);
    for (int i = 0; i < opt.order; ++i) {
      const double s = rad.nodes[i];
      for (int q = 0; q < na; ++q) {
        const double c = pol.nodes[q], sn = std::sqrt(1 - c * c);
        for (int k = 0; k < naz; ++k) {
          const double az = 2 * std::numbers::pi * (k + 0.5) / naz;
          PointN x(3);
          x << sn * std::cos(az), sn * std::sin(az), c;
          out.points.push_back(center + s * x);
          out.weights.push_back(rad.weights[i] * s * s * pol.weights[q] * 2 * std::numbers::pi /
                                naz);
        }
      }
    }
  }
  return out;
}

double local_energy(const ExpanderView& view, const EnergyModel& model, double t,
                    const PointN& x0, double radius, int order) {
  check_time(t);
  check_point(view, x0);
  if ((x0.norm() + radius) / std::sqrt(t) > view.reach() * (1 + 1e-12))
    fail(ErrorKind::DomainExceeded, "local_energy: ball leaves the solution's reach");
  return ball_average(view, x0, radius, order,
                      [&](const PointN& x) { return energy_density(view, model, x, t); });
}

// --------------------------------------------------------- monotonicity

double probe_cutoff(double dist) { return 1 - smoothstep5(dist - 1); }
double probe_cutoff_derivative(double dist) { return -smoothstep5_derivative(dist - 1); }

namespace {

void check_window(double t0, double R) {
  if (!(R > 0)) fail(ErrorKind::Config, "radius must be positive");
  if (R > 0.5 * std::min(std::sqrt(t0), 1.0) * (1 + 1e-12))
    fail(ErrorKind::TimeOrder, "probe radius exceeds min(sqrt(t0), 1)/2");
}

// ∫ e_K(x, t) G_{z0}(x, t) φ_{x0}²(x) dx
double weighted_slice(const ExpanderView& view, const EnergyModel& model, const PointN& x0,
                      double t0, double t) {
  const int n = view.dimension();
  BallRuleOptions opt;
  opt.scale = std::sqrt(t0 - t);
  opt.reduced = view.equivariant();
  opt.breaks = {1.0};
  const auto rule = ball_quadrature(n, x0, 2.0, opt);
  double s = 0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const PointN& x = rule.points[q];
    const double d2 = (x - x0).squaredNorm();
    const double c = probe_cutoff(std::sqrt(d2));
    if (c == 0) continue;
    s += rule.weights[q] * energy_density(view, model, x, t) * heat_kernel(n, t0 - t, d2) * c * c;
  }
  return s;
}

}  // namespace

double phi_functional(const ExpanderView& view, const EnergyModel& model, const PointN& x0,
                      double t0, double R) {
  check_point(view, x0);
  check_window(t0, R);
  return R * R * weighted_slice(view, model, x0, t0, t0 - R * R);
}

double psi_functional(const ExpanderView& view, const EnergyModel& model, const PointN& x0,
                      double t0, double R) {
  check_point(view, x0);
  check_window(t0, R);
  const auto rule = gauss_legendre(8, t0 - 4 * R * R, t0 - R * R);
  double s = 0;
  for (int i = 0; i < 8; ++i)
    s += rule.weights[i] * weighted_slice(view, model, x0, t0, rule.nodes[i]);
  return s;
}

MonotonicityTable monotonicity_table(const ExpanderView& view, const EnergyModel& model,
                                     const PointN& x0, double t0, std::span<const double> radii,
                                     double slack, Exec exec) {
  if (radii.empty()) fail(ErrorKind::Config, "empty radii ladder");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) fail(ErrorKind::Config, "radii ladder must increase");
  for (double R : radii) check_window(t0, R);

  MonotonicityTable tab;
  tab.x0 = x0;
  tab.t0 = t0;
  tab.slack = slack;
  tab.radii.assign(radii.begin(), radii.end());
  tab.phi.resize(radii.size());
  tab.psi.resize(radii.size());
  for_each_index(exec, radii.size(), [&](std::size_t i) {
    tab.phi[i] = phi_functional(view, model, x0, t0, radii[i]);
    tab.psi[i] = psi_functional(view, model, x0, t0, radii[i]);
  });
  tab.boundary_norm = ball_average(view, x0, 2.0, 8, [&](const PointN& x) {
    return view.boundary_gradient_sq(x);
  }) * std::pow(2.0, view.dimension()) * std::pow(std::numbers::pi, 0.5 * view.dimension()) /
                      std::tgamma(0.5 * view.dimension() + 1);
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::size_t j = i + 1; j < radii.size(); ++j) {
      const double dphi = tab.phi[i] - tab.phi[j], dpsi = tab.psi[i] - tab.psi[j];
      tab.max_phi_drop = std::max(tab.max_phi_drop, dphi);
      tab.max_psi_drop = std::max(tab.max_psi_drop, dpsi);
      const double budget = slack * (radii[j] - radii[i]) * tab.boundary_norm;
      tab.violations += (dphi > budget) + (dpsi > budget);
    }
  return tab;
}

// ------------------------------------------------------------- Pohozaev

PohozaevReport pohozaev_residual(const ExpanderView& view, const EnergyModel& model,
                                 const TestFields& fields, double t1, double t2, int order,
                                 double eps) {
  const int n = view.dimension();
  const PointN& c = fields.center;
  const double rho = fields.radius;
  check_point(view, c);
  if (!(t1 > 0) || !(t2 > t1)) fail(ErrorKind::TimeOrder, "need 0 < t1 < t2");
  if (!(rho > 0)) fail(ErrorKind::Config, "test field radius must be positive");
  if ((c.norm() + rho) / std::sqrt(t1) > view.reach() * (1 + 1e-12))
    fail(ErrorKind::Support, "test field support leaves the solution's reach");
  if (view.singular_center() && c.norm() <= rho)
    fail(ErrorKind::Support, "test field support contains the singular center");

  BallRuleOptions opt;
  opt.order = order;
  opt.reduced = view.equivariant();
  opt.breaks = {rho / 2};
  const auto rule = ball_quadrature(n, c, rho, opt);

  // Spatial integral of e θ at a fixed time.
  const auto bracket = [&](double t) {
    double s = 0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const PointN& x = rule.points[q];
      s += rule.weights[q] * energy_density(view, model, x, t) * t * bump((x - c).norm() / rho);
    }
    return s;
  };

  PohozaevReport rep;
  double e_dt = 0, e_mixed = 0, e_lhs = 0;
  const auto time = gauss_legendre(order, t1, t2);
  for (int it = 0; it < order; ++it) {
    const double t = time.nodes[it], wt = time.weights[it], st = std::sqrt(t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const PointN& x = rule.points[q];
      const PointN y = x / st;
      const double w = wt * rule.weights[q];
      const PointN d = x - c;
      const double dist = d.norm(), s = dist / rho;
      const double b = bump(s), db = dist > 0 ? bump_derivative(s) : 0.0;

      const Eigen::MatrixXd J = view.jacobian(y);
      const Eigen::MatrixXd grad = J / st;
      const Eigen::VectorXd ut = -(J * y) / (2 * t);
      double pen = 0;
      const double e = unit_energy(view, model, y, &pen) / t;
      pen /= t;

      const PointN zeta = b * d;
      Eigen::MatrixXd dzeta = b * Eigen::MatrixXd::Identity(n, n);
      if (dist > 0) dzeta += (db / (rho * dist)) * d * d.transpose();
      const double div = dzeta.trace();
      rep.lhs += w * ut.dot(grad * zeta);
      rep.divergence_term += w * e * div;
      rep.lie_term += w * (dzeta.cwiseProduct(grad.transpose() * grad)).sum();

      const double theta = t * b;
      const PointN grad_theta = dist > 0 ? PointN(t * db / (rho * dist) * d) : PointN::Zero(n);
      e_lhs += w * (ut.squaredNorm() + pen / t) * theta;
      e_dt += w * e * b;
      e_mixed += w * ut.dot(grad * grad_theta);
    }
  }
  const double rhs = rep.divergence_term - rep.lie_term;
  rep.residual = std::abs(rep.lhs - rhs) /
                 (std::abs(rep.lhs) + std::abs(rep.divergence_term) + std::abs(rep.lie_term) + eps);
  const double boundary = bracket(t2) - bracket(t1);
  rep.energy_lhs = e_lhs + boundary;
  rep.energy_rhs = e_dt - e_mixed;
  rep.energy_residual = std::abs(rep.energy_lhs - rep.energy_rhs) /
                        (std::abs(e_lhs) + std::abs(boundary) + std::abs(e_dt) +
                         std::abs(e_mixed) + eps);
  return rep;
}

// ----------------------------------------------------------- regularity

std::vector<ProbeResult> eps_regularity_scan(const ExpanderView& view, const EnergyModel& model,
                                             std::span<const PointN> probes, double R,
                                             const RegularityOptions& opt, Exec exec) {
  if (!(R > 0 && R < 0.5)) fail(ErrorKind::Config, "scan radius must lie in (0, 1/2)");
  std::vector<ProbeResult> out(probes.size());
  for_each_index(exec, probes.size(), [&](std::size_t p) {
    ProbeResult& res = out[p];
    res.x0 = probes[p];
    res.R = R;
    res.psi = psi_functional(view, model, res.x0, 1.0, R);
    res.flagged = res.psi >= opt.eps0;
    if (res.flagged) return;
    const double r = opt.delta * R;
    BallRuleOptions bo;
    bo.order = 3;
    bo.reduced = view.equivariant();
    auto pts = ball_quadrature(view.dimension(), res.x0, r, bo).points;
    pts.push_back(res.x0);
    for (double f : {1.0, 0.5, 0.0}) {
      const double t = 1 - f * r * r;
      for (const auto& x : pts)
        res.sup_energy = std::max(res.sup_energy, energy_density(view, model, x, t));
    }
    res.bound = opt.C / (r * r);
    res.verified = res.sup_energy <= res.bound;
  });
  return out;
}

BochnerReport bochner_check(const ExpanderView& view, const EnergyModel& model,
                            std::span<const PointN> samples, double C, Exec exec) {
  const int n = view.dimension();
  std::vector<double> ratio(samples.size(), std::nan(""));
  for_each_index(exec, samples.size(), [&](std::size_t i) {
    const PointN& y = samples[i];
    check_point(view, y);
    const double e = unit_energy(view, model, y);
    if (e <= kSkipEnergy) return;
    const double h = 1e-3 * std::max(1.0, y.norm());
    double lap = 0, radial = 0;
    PointN p = y;
    for (int l = 0; l < n; ++l) {
      p[l] = y[l] + h;
      const double ep = unit_energy(view, model, p);
      p[l] = y[l] - h;
      const double em = unit_energy(view, model, p);
      p[l] = y[l];
      lap += (ep - 2 * e + em) / (h * h);
      radial += y[l] * (ep - em) / (2 * h);
    }
    const double dt = -(radial + 2 * e) / 2;
    ratio[i] = (dt - lap) / (e * e);
  });
  BochnerReport rep;
  rep.bound = C;
  for (double r : ratio) {
    if (std::isnan(r)) {
      ++rep.skipped;
      continue;
    }
    rep.ratios.push_back(r);
    rep.max_ratio = std::max(rep.max_ratio, r);
  }
  rep.bounded = rep.ratios.empty() || rep.max_ratio <= C;
  return rep;
}

ShiReport shi_bound_check(const ExpanderView& view, const PointN& x0, double r, double C,
                          std::span<const ProbeResult> scan) {
  check_point(view, x0);
  if (!(r > 0)) fail(ErrorKind::Config, "Shi radius must be positive");
  if (view.singular_center() && x0.norm() < 2 * r)
    fail(ErrorKind::Regularity, "Shi probe overlaps the singular center");
  for (const auto& p : scan)
    if (p.flagged && (p.x0 - x0).norm() <= 2 * r + p.R)
      fail(ErrorKind::Regularity, "Shi probe overlaps a flagged region");
  if (x0.norm() + r > view.reach() * (1 + 1e-12))
    fail(ErrorKind::DomainExceeded, "Shi probe leaves the solution's reach");

  BallRuleOptions bo;
  bo.order = 4;
  bo.reduced = view.equivariant();
  auto inner = ball_quadrature(view.dimension(), x0, r / 2, bo).points;
  auto outer = ball_quadrature(view.dimension(), x0, r, bo).points;
  inner.push_back(x0);
  outer.push_back(x0);

  ShiReport rep;
  for (const auto& y : inner) rep.lhs = std::max(rep.lhs, hessian_sq(view, y));
  for (const auto& y : outer) {
    const double g = view.jacobian(y).norm();
    rep.sup_grad = std::max(rep.sup_grad, g);
    rep.decay_constant = std::max(rep.decay_constant, y.norm() * g);
  }
  rep.sup_grad_sq = rep.sup_grad * rep.sup_grad;
  rep.rhs = C * (1 + 1 / (r * r) + x0.norm() / r + rep.sup_grad + rep.sup_grad_sq) *
            rep.sup_grad_sq;
  rep.ratio = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
  return rep;
}

std::vector<EnergyInequalityRow> energy_inequality(const ExpanderView& view,
                                                   const EnergyModel& model, const PointN& x0,
                                                   std::span<const double> times) {
  check_point(view, x0);
  const double e0 = ball_average(view, x0, 1.0, 8, [&](const PointN& x) {
    return 0.5 * view.boundary_gradient_sq(x);
  });
  std::vector<EnergyInequalityRow> rows;
  for (double t : times) {
    EnergyInequalityRow row;
    row.t = t;
    row.energy = local_energy(view, model, t, x0);
    row.boundary_energy = e0;
    row.slack = e0 > 0 ? row.energy / e0 - 1 : 0.0;
    rows.push_back(row);
  }
  return rows;
}

AnnulusTail annulus_tail(const ExpanderView& view, const EnergyModel& model, double t,
                         std::span<const double> radii) {
  check_time(t);
  const int n = view.dimension();
  if (radii.size() < 3) fail(ErrorKind::Config, "annulus tail fit needs three radii");
  AnnulusTail out;
  for (double R : radii) {
    BallRuleOptions bo;
    bo.inner = R;
    bo.reduced = view.equivariant();
    const auto rule = ball_quadrature(n, PointN::Zero(n), 2 * R, bo);
    double s = 0, s0 = 0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      s += rule.weights[q] * energy_density(view, model, rule.points[q], t);
      s0 += rule.weights[q] * 0.5 * view.boundary_gradient_sq(rule.points[q]);
    }
    const double scale = std::pow(R, 2 - n);
    out.radii.push_back(R);
    out.tail.push_back(s * scale);
    out.boundary_tail.push_back(s0 * scale);
  }
  std::vector<double> inv;
  for (double R : radii) inv.push_back(1 / R);
  const auto fit = least_squares({out.boundary_tail, inv}, out.tail);
  out.A = fit.coefficients[0];
  out.B = fit.coefficients[1];
  out.residual = fit.residual_rms;
  return out;
}

// ---------------------------------------------------------------- export

Json verdict(const std::string& check, double value, double tolerance, bool pass) {
  Json j;
  j["check"] = check;
  j["value"] = value;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  return j;
}

CsvTable monotonicity_csv(const MonotonicityTable& table) {
  CsvTable csv({"R", "Phi", "Psi"});
  for (std::size_t i = 0; i < table.radii.size(); ++i)
    csv.add_row(std::vector<double>{table.radii[i], table.phi[i], table.psi[i]});
  return csv;
}

CsvTable probe_csv(std::span<const ProbeResult> probes) {
  std::vector<std::string> header;
  const int n = probes.empty() ? 0 : static_cast<int>(probes.front().x0.size());
  for (int a = 0; a < n; ++a) header.push_back("x" + std::to_string(a + 1));
  for (const char* h : {"R", "Psi", "flagged", "sup_e", "bound", "verified"}) header.push_back(h);
  CsvTable csv(header);
  for (const auto& p : probes) {
    std::vector<double> row(p.x0.data(), p.x0.data() + p.x0.size());
    row.insert(row.end(), {p.R, p.psi, p.flagged ? 1.0 : 0.0, p.sup_energy, p.bound,
                           p.verified ? 1.0 : 0.0});
    csv.add_row(row);
  }
  return csv;
}

}  // namespace hmfx
