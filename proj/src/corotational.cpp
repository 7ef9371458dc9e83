#include "hmfx/corotational.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "hmfx/numerics.hpp"
#include "hmfx/series.hpp"

namespace hmfx {

RadialStencil::RadialStencil(const RadialGrid& grid, int width) {
  const int n = static_cast<int>(grid.last());
  const int half = width / 2;
  if (n + 1 < width) fail(ErrorKind::Grid, "radial stencil wider than the grid");
  rows_.resize(n + 1);
  std::vector<double> x(width);
  for (int i = 0; i <= n; ++i) {
    int lo = i - half;
    if (i + half > n) lo = n - (width - 1);
    Row& row = rows_[i];
    row.ext.resize(width);
    for (int q = 0; q < width; ++q) {
      const int e = lo + q;
      row.ext[q] = e;
      x[q] = e >= 0 ? grid[e] : -grid[-e];
    }
    const auto w = fornberg_weights(grid[i], x, 2);
    row.d1 = w[1];
    row.d2 = w[2];
  }
}

double RadialStencil::d1(std::size_t i, std::span<const double> v, int parity) const {
  const Row& row = rows_[i];
  double s = 0;
  for (std::size_t q = 0; q < row.ext.size(); ++q) {
    const int e = row.ext[q];
    s += row.d1[q] * (e >= 0 ? v[e] : parity * v[-e]);
  }
  return s;
}

double RadialStencil::d2(std::size_t i, std::span<const double> v, int parity) const {
  const Row& row = rows_[i];
  double s = 0;
  for (std::size_t q = 0; q < row.ext.size(); ++q) {
    const int e = row.ext[q];
    s += row.d2[q] * (e >= 0 ? v[e] : parity * v[-e]);
  }
  return s;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

struct NewtonReport {
  int iterations = 0;
  double residual = 0;
};

// Damped Newton. The line search halves the step (up to 30 times) until the
// row-scaled l2 merit decreases; convergence is judged on the sup-norm.
NewtonReport damped_newton(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& res,
                           const std::function<void(const Eigen::VectorXd&, Triplets&)>& jac,
                           Eigen::VectorXd& x, double tol, int max_iter) {
  const auto size = x.size();
  Eigen::VectorXd f(size), trial(size), ftrial(size), scale(size);
  res(x, f);
  double norm = f.lpNorm<Eigen::Infinity>();
  NewtonReport rep;
  Triplets trips;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  const auto stuck = [&](const std::string& msg) {
    return NonConvergenceError(msg, std::vector<double>(x.data(), x.data() + size), norm);
  };
  for (int it = 0; it < max_iter; ++it) {
    if (it > 0 && norm < tol) break;
    trips.clear();
    jac(x, trips);
    SpMat j(size, size);
    j.setFromTriplets(trips.begin(), trips.end());
    scale.setZero();
    for (int k = 0; k < j.outerSize(); ++k)
      for (SpMat::InnerIterator e(j, k); e; ++e) scale(e.row()) = std::max(scale(e.row()), std::abs(e.value()));
    for (Eigen::Index k = 0; k < size; ++k) scale(k) = scale(k) > 0 ? 1.0 / scale(k) : 1.0;
    lu.compute(j);
    if (lu.info() != Eigen::Success) throw stuck("Newton: singular Jacobian");
    const Eigen::VectorXd step = lu.solve(-f);
    const double merit = scale.cwiseProduct(f).norm();
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 30; ++h, lambda *= 0.5) {
      trial = x + lambda * step;
      res(trial, ftrial);
      const double tn = ftrial.lpNorm<Eigen::Infinity>();
      if (!std::isfinite(tn)) continue;
      if (scale.cwiseProduct(ftrial).norm() < merit || tn < tol) {
        x = trial;
        f = ftrial;
        norm = tn;
        accepted = true;
        break;
      }
    }
    rep.iterations = it + 1;
    if (!accepted) {
      if (norm < tol) break;
      std::ostringstream os;
      os << "Newton: line search failed at residual " << norm;
      throw stuck(os.str());
    }
  }
  rep.residual = norm;
  if (norm >= tol) {
    std::ostringstream os;
    os << "Newton: residual " << norm << " above tolerance " << tol << " after " << max_iter
       << " iterations";
    throw stuck(os.str());
  }
  return rep;
}

double drift(int n, double r) { return (n - 1) / r + 0.5 * r; }

}  // namespace

std::vector<double> hm_residual(const CorotationalProfile& p) {
  if (p.form != CorotationalProfile::Form::Angle) fail(ErrorKind::Config, "hm_residual needs an angle profile");
  if (p.size() < 50) fail(ErrorKind::Grid, "hm_residual needs at least 50 nodes");
  const RadialStencil st(p.grid);
  const int parity = p.singular_center ? 1 : -1;
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double r = p.grid[i];
    out[i] = st.d2(i, p.h, parity) + drift(p.n, r) * st.d1(i, p.h, parity) -
             (p.n - 1) * std::sin(2 * p.h[i]) / (2 * r * r);
  }
  return out;
}

std::vector<std::array<double, 2>> gl_residual(const CorotationalProfile& p) {
  if (p.form != CorotationalProfile::Form::Modulus) fail(ErrorKind::Config, "gl_residual needs a modulus profile");
  const RadialStencil st(p.grid);
  std::vector<std::array<double, 2>> out(p.size(), {0.0, 0.0});
  const double K = p.K;
  out[0][1] = p.n * st.d2(0, p.phi, 1) + K * (1 - p.phi[0] * p.phi[0]) * p.phi[0];
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double r = p.grid[i];
    const double pen = K * (1 - p.psi[i] * p.psi[i] - p.phi[i] * p.phi[i]);
    out[i][0] = st.d2(i, p.psi, -1) + drift(p.n, r) * st.d1(i, p.psi, -1) -
                (p.n - 1) * p.psi[i] / (r * r) + pen * p.psi[i];
    out[i][1] = st.d2(i, p.phi, 1) + drift(p.n, r) * st.d1(i, p.phi, 1) + pen * p.phi[i];
  }
  return out;
}

double interior_sup(std::span<const double> residual) {
  double s = 0;
  for (std::size_t i = 1; i + 1 < residual.size(); ++i) s = std::max(s, std::abs(residual[i]));
  return s;
}

ShootingResult shoot_hm(int n, double slope, const RadialGrid& grid) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  if (n < 2) fail(ErrorKind::Config, "shoot_hm: n >= 2");
  const auto rhs = [n](const State& y, State& dy, double r) {
    dy[0] = y[1];
    dy[1] = -drift(n, r) * y[1] + (n - 1) * std::sin(2 * y[0]) / (2 * r * r);
  };
  const double a = slope;
  const double c = -(3 * a + 4 * (n - 1) * a * a * a) / (12.0 * (n + 2));
  const double r0 = std::min(1e-3 / std::max(1.0, std::abs(a)), 0.1 * grid[1]);
  State y{a * r0 + c * r0 * r0 * r0, a + 3 * c * r0 * r0};
  auto stepper = ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_fehlberg78<State>());

  ShootingResult out{slope, 0, 0, CorotationalProfile{grid}};
  CorotationalProfile& p = out.profile;
  p.n = n;
  p.slope = slope;
  p.h.assign(grid.size(), 0.0);
  double r = r0;
  double dt = 0.1 * r0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    ode::integrate_adaptive(stepper, rhs, y, r, grid[i], dt);
    r = grid[i];
    if (!std::isfinite(y[0]) || std::abs(y[1]) > 1e8) {
      std::ostringstream os;
      os << "shoot_hm: profile blew up at r = " << r << " for slope " << slope;
      fail(ErrorKind::ShootingDiverged, os.str());
    }
    p.h[i] = y[0];
    dt = std::min(dt, 0.5 * (grid[std::min(i + 1, grid.last())] - grid[i]) + 1e-12);
  }
  // Tail fit h ≈ h∞ + c1 r⁻² + c2 r⁻⁴ on [R/2, R].
  std::vector<double> one, inv2, inv4, val;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] >= 0.5 * grid.r_max()) {
      const double s = 1.0 / (grid[i] * grid[i]);
      one.push_back(1.0);
      inv2.push_back(s);
      inv4.push_back(s * s);
      val.push_back(p.h[i]);
    }
  const auto fit = least_squares({one, inv2, inv4}, val);
  out.limit_angle = fit.coefficients[0];
  out.boundary_angle = p.h.back();
  p.limit_angle = out.limit_angle;
  p.residual = interior_sup(hm_residual(p));
  return out;
}

namespace {

// Newton collocation for the angle form with h(0) = 0 and h(R) = h_b.
int polish_angle(CorotationalProfile& p, double h_b, double tol, int max_iter) {
  const RadialStencil st(p.grid);
  const std::size_t size = p.size();
  const int n = p.n;
  const auto& g = p.grid;
  const auto res = [&](const Eigen::VectorXd& x, Eigen::VectorXd& f) {
    std::span<const double> v(x.data(), size);
    f(0) = x(0);
    for (std::size_t i = 1; i + 1 < size; ++i) {
      const double r = g[i];
      f(i) = st.d2(i, v, -1) + drift(n, r) * st.d1(i, v, -1) - (n - 1) * std::sin(2 * x(i)) / (2 * r * r);
    }
    f(size - 1) = x(size - 1) - h_b;
  };
  const auto jac = [&](const Eigen::VectorXd& x, Triplets& t) {
    t.emplace_back(0, 0, 1.0);
    for (std::size_t i = 1; i + 1 < size; ++i) {
      const double r = g[i];
      const auto& row = st.row(i);
      const double dr = drift(n, r);
      for (std::size_t q = 0; q < row.ext.size(); ++q) {
        const int e = row.ext[q];
        const double w = row.d2[q] + dr * row.d1[q];
        t.emplace_back(i, std::abs(e), e >= 0 ? w : -w);
      }
      t.emplace_back(i, i, -(n - 1) * std::cos(2 * x(i)) / (r * r));
    }
    t.emplace_back(size - 1, size - 1, 1.0);
  };
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(p.h.data(), size);
  const auto rep = damped_newton(res, jac, x, tol, max_iter);
  p.h.assign(x.data(), x.data() + size);
  return rep.iterations;
}

}  // namespace

CorotationalProfile solve_corot(int n, double h_inf, double r_max, const CorotOptions& opt) {
  if (n < 2) fail(ErrorKind::Config, "solve_corot: n >= 2");
  const RadialGrid grid = RadialGrid::graded(opt.grid.spacing, opt.grid.stretch, r_max);
  CorotationalProfile p{grid};
  p.n = n;
  p.limit_angle = h_inf;
  if (h_inf == 0.0 || (opt.allow_constant_branch && std::abs(std::sin(2 * h_inf)) < 1e-14)) {
    p.h.assign(grid.size(), h_inf);
    p.singular_center = std::abs(std::sin(h_inf)) > 1e-14;
    p.residual = interior_sup(hm_residual(p));
    return p;
  }
  const double sign = h_inf < 0 ? -1.0 : 1.0;
  const double target = std::abs(h_inf);

  const auto attained = [&](double a) { return shoot_hm(n, a, grid).limit_angle; };
  double lo_range = 0, hi_range = 0;
  double a_lo = 0, f_lo = -target, a_hi = -1;
  for (double a = opt.scan_step; a <= opt.slope_max; a += opt.scan_step * (1 + 0.25 * a)) {
    double lim;
    try {
      lim = attained(a);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ShootingDiverged) break;
      throw;
    }
    lo_range = std::min(lo_range, lim);
    hi_range = std::max(hi_range, lim);
    const double f = lim - target;
    if (f >= 0) {
      a_hi = a;
      break;
    }
    a_lo = a;
    f_lo = f;
  }
  if (a_hi < 0) {
    std::ostringstream os;
    os << "solve_corot: limit angle " << h_inf << " not reached for slopes up to " << opt.slope_max
       << "; reachable range [" << sign * lo_range << ", " << sign * hi_range << "]";
    throw NotAttainedError(os.str(), std::min(sign * lo_range, sign * hi_range),
                           std::max(sign * lo_range, sign * hi_range));
  }
  (void)f_lo;
  boost::uintmax_t iters = 100;
  const auto root = boost::math::tools::toms748_solve(
      [&](double a) { return attained(a) - target; }, a_lo, a_hi,
      boost::math::tools::eps_tolerance<double>(48), iters);
  const double a_star = 0.5 * (root.first + root.second);
  ShootingResult sr = shoot_hm(n, a_star, grid);

  const CorotSeries series = corotational_series(n, target, opt.far_field_order, Flow::HarmonicMap);
  p.h = sr.profile.h;
  p.newton_iterations = polish_angle(p, series.angle(r_max), opt.tolerance, opt.max_newton);
  for (double& v : p.h) v *= sign;
  p.slope = sign * a_star;
  p.residual = interior_sup(hm_residual(p));
  return p;
}

namespace {

void to_modulus(CorotationalProfile& p) {
  if (p.form == CorotationalProfile::Form::Modulus) return;
  p.psi.resize(p.size());
  p.phi.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p.psi[i] = std::sin(p.h[i]);
    p.phi[i] = std::cos(p.h[i]);
  }
  p.h.clear();
  p.form = CorotationalProfile::Form::Modulus;
}

// Linear interpolation of a modulus profile onto another grid.
void resample(const CorotationalProfile& src, CorotationalProfile& dst) {
  dst.psi.resize(dst.size());
  dst.phi.resize(dst.size());
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double r = std::min(dst.grid[i], src.grid.r_max());
    const std::size_t k = src.grid.interval(r);
    const double t = (r - src.grid[k]) / (src.grid[k + 1] - src.grid[k]);
    dst.psi[i] = (1 - t) * src.psi[k] + t * src.psi[k + 1];
    dst.phi[i] = (1 - t) * src.phi[k] + t * src.phi[k + 1];
  }
}

}  // namespace

CorotationalProfile solve_gl_corot(int n, double K, double psi_inf, double phi_inf, double r_max,
                                   const GlOptions& opt, const CorotationalProfile* warm_start) {
  if (!(K > 0)) fail(ErrorKind::Config, "solve_gl_corot: K must be positive");
  if (std::abs(psi_inf * psi_inf + phi_inf * phi_inf - 1) > 1e-12)
    fail(ErrorKind::GeometryDomain, "solve_gl_corot: boundary value must lie on S^1");
  const RadialGrid grid = RadialGrid::graded(opt.grid.spacing, opt.grid.stretch, r_max);
  const double theta_inf = std::atan2(psi_inf, phi_inf);
  CorotationalProfile p{grid};
  p.n = n;
  p.K = K;
  p.form = CorotationalProfile::Form::Modulus;
  p.limit_angle = theta_inf;

  if (warm_start) {
    CorotationalProfile w = *warm_start;
    to_modulus(w);
    resample(w, p);
    // Rescale the angle toward the new boundary value; a trivial previous
    // solution is reused as is.
    const double prev = std::atan2(p.psi.back(), p.phi.back());
    if (std::abs(prev) > 1e-12) {
      const double ratio = theta_inf / prev;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rho = std::hypot(p.psi[i], p.phi[i]);
        const double a = ratio * std::atan2(p.psi[i], p.phi[i]);
        p.psi[i] = rho * std::sin(a);
        p.phi[i] = rho * std::cos(a);
      }
    }
  } else if (opt.guess == GlGuess::Ramp) {
    p.psi.resize(grid.size());
    p.phi.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double a = theta_inf * grid[i] / r_max;
      p.psi[i] = std::sin(a);
      p.phi[i] = std::cos(a);
    }
  } else if (std::abs(std::sin(theta_inf)) < 1e-14) {
    p.psi.assign(grid.size(), 0.0);
    p.phi.assign(grid.size(), phi_inf);
  } else {
    CorotOptions co;
    co.grid = opt.grid;
    co.allow_constant_branch = false;
    CorotationalProfile hm = solve_corot(n, theta_inf, r_max, co);
    to_modulus(hm);
    p.psi = hm.psi;
    p.phi = hm.phi;
  }

  const CorotSeries series =
      corotational_series(n, theta_inf, opt.far_field_order, Flow::GinzburgLandau, K);
  const double psi_b = series.radial(r_max), phi_b = series.axial(r_max);

  const RadialStencil st(grid);
  const std::size_t size = grid.size();
  const auto res = [&](const Eigen::VectorXd& x, Eigen::VectorXd& f) {
    std::span<const double> ps(x.data(), size), ph(x.data() + size, size);
    f(0) = ps[0];
    f(size) = n * st.d2(0, ph, 1) + K * (1 - ps[0] * ps[0] - ph[0] * ph[0]) * ph[0];
    for (std::size_t i = 1; i + 1 < size; ++i) {
      const double r = grid[i];
      const double pen = K * (1 - ps[i] * ps[i] - ph[i] * ph[i]);
      f(i) = st.d2(i, ps, -1) + drift(n, r) * st.d1(i, ps, -1) - (n - 1) * ps[i] / (r * r) + pen * ps[i];
      f(size + i) = st.d2(i, ph, 1) + drift(n, r) * st.d1(i, ph, 1) + pen * ph[i];
    }
    f(size - 1) = ps[size - 1] - psi_b;
    f(2 * size - 1) = ph[size - 1] - phi_b;
  };
  const auto jac = [&](const Eigen::VectorXd& x, Triplets& t) {
    const auto ps = [&](std::size_t i) { return x(i); };
    const auto ph = [&](std::size_t i) { return x(size + i); };
    const auto s = static_cast<int>(size);
    t.emplace_back(0, 0, 1.0);
    {
      const auto& row = st.row(0);
      for (std::size_t q = 0; q < row.ext.size(); ++q)
        t.emplace_back(s, s + std::abs(row.ext[q]), n * row.d2[q]);
      t.emplace_back(s, s, K * (1 - ps(0) * ps(0) - 3 * ph(0) * ph(0)));
      t.emplace_back(s, 0, -2 * K * ps(0) * ph(0));
    }
    for (std::size_t i = 1; i + 1 < size; ++i) {
      const double r = grid[i];
      const auto& row = st.row(i);
      const double dr = drift(n, r);
      const int ii = static_cast<int>(i);
      for (std::size_t q = 0; q < row.ext.size(); ++q) {
        const int e = row.ext[q];
        const double w = row.d2[q] + dr * row.d1[q];
        t.emplace_back(ii, std::abs(e), e >= 0 ? w : -w);
        t.emplace_back(s + ii, s + std::abs(e), w);
      }
      const double a = ps(i), b = ph(i);
      t.emplace_back(ii, ii, -(n - 1) / (r * r) + K * (1 - 3 * a * a - b * b));
      t.emplace_back(ii, s + ii, -2 * K * a * b);
      t.emplace_back(s + ii, s + ii, K * (1 - a * a - 3 * b * b));
      t.emplace_back(s + ii, ii, -2 * K * a * b);
    }
    t.emplace_back(s - 1, s - 1, 1.0);
    t.emplace_back(2 * s - 1, 2 * s - 1, 1.0);
  };
  Eigen::VectorXd x(2 * size);
  for (std::size_t i = 0; i < size; ++i) {
    x(i) = p.psi[i];
    x(size + i) = p.phi[i];
  }
  const auto rep = damped_newton(res, jac, x, opt.tolerance, opt.max_newton);
  for (std::size_t i = 0; i < size; ++i) {
    p.psi[i] = x(i);
    p.phi[i] = x(size + i);
  }
  p.newton_iterations = rep.iterations;
  const auto r = gl_residual(p);
  double sup = 0;
  for (std::size_t i = 1; i + 1 < size; ++i) sup = std::max({sup, std::abs(r[i][0]), std::abs(r[i][1])});
  p.residual = sup;
  p.slope = st.d1(0, p.psi, -1);
  return p;
}

std::vector<Rung> continuation(int n, double h_inf, std::span<const double> k_ladder,
                               std::span<const double> sigma_path, double r_max,
                               const GlOptions& opt) {
  if (k_ladder.empty() || sigma_path.empty())
    fail(ErrorKind::Config, "continuation: empty K ladder or sigma path");
  for (std::size_t i = 1; i < k_ladder.size(); ++i)
    if (!(k_ladder[i] > k_ladder[i - 1])) fail(ErrorKind::Config, "continuation: K ladder must increase");
  for (std::size_t i = 1; i < sigma_path.size(); ++i)
    if (!(sigma_path[i] < sigma_path[i - 1])) fail(ErrorKind::Config, "continuation: sigma path must decrease");
  if (sigma_path.front() > 1 || sigma_path.back() < 0) fail(ErrorKind::Config, "continuation: sigma outside [0, 1]");
  std::vector<std::pair<double, double>> plan;
  for (double K : k_ladder) plan.emplace_back(sigma_path.front(), K);
  for (std::size_t s = 1; s < sigma_path.size(); ++s) plan.emplace_back(sigma_path[s], k_ladder.back());

  std::vector<Rung> done;
  for (const auto& [sigma, K] : plan) {
    const double angle = (1 - sigma) * h_inf;
    try {
      const CorotationalProfile* warm = done.empty() ? nullptr : &done.back().profile;
      CorotationalProfile prof =
          solve_gl_corot(n, K, std::sin(angle), std::cos(angle), r_max, opt, warm);
      done.push_back(Rung{sigma, K, prof.newton_iterations, prof.residual, std::move(prof)});
    } catch (const Error& e) {
      std::ostringstream os;
      os << "continuation stopped at sigma = " << sigma << ", K = " << K << ": " << e.what();
      throw ContinuationError(os.str(), std::move(done));
    }
  }
  return done;
}

}  // namespace hmfx
