#include "hmfx/fixedpoint.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "hmfx/error.hpp"
#include "hmfx/numerics.hpp"
#include "hmfx/weighted.hpp"

namespace hmfx {

namespace {

double norm_of(const double* u, int m) {
  double s = 0;
  for (int c = 0; c < m; ++c) s += u[c] * u[c];
  return std::sqrt(s);
}

std::size_t shell_index(const SpaceGrid& g, double radius) {
  if (radius <= 0) return g.radial.last();
  if (radius > g.radial.r_max() * (1 + 1e-12)) fail(ErrorKind::DomainExceeded, "Dirichlet radius exceeds the grid");
  std::size_t best = 1;
  for (std::size_t i = 1; i < g.radial.size(); ++i)
    if (std::abs(g.radial[i] - radius) < std::abs(g.radial[best] - radius)) best = i;
  if (best < 3) fail(ErrorKind::Grid, "Dirichlet ball holds fewer than three shells");
  return best;
}

void check_same_grid(const MapField& a, const MapField& b) {
  if (a.grid_ptr() != b.grid_ptr() || a.components() != b.components())
    fail(ErrorKind::Config, "fields live on different grids");
}

}  // namespace

double x_norm(const MapField& v, Exec exec) {
  return weighted_sup_norm(v, 2.0) + weighted_sup_norm(gradient(v, exec), 3.0);
}

MapField assemble_Q(const MapField& u0, const MapField& v, double K, const Cutoff& chi, Exec exec) {
  check_same_grid(u0, v);
  const int m = u0.components();
  MapField q(u0.grid_ptr(), m);
  for_each_index(exec, u0.node_count(), [&](std::size_t node) {
    const double* a = u0.node_values(node);
    const double* b = v.node_values(node);
    double* out = q.node_values(node);
    std::vector<double> w(m), grad(m);
    for (int c = 0; c < m; ++c) w[c] = a[c] + b[c];
    const double na = norm_of(a, m), nw = norm_of(w.data(), m);
    if (na < 1e-6 || nw < 1e-6) {
      std::ostringstream os;
      os << "assemble_Q: |U0| = " << na << ", |U0+V| = " << nw << " at node " << node;
      fail(ErrorKind::NearAmbientOrigin, os.str());
    }
    const double c0 = K * chi.derivative((na - 1) * (na - 1));
    double proj = 0;
    for (int c = 0; c < m; ++c) proj += a[c] * b[c];
    proj /= na;
    const double c1 = K * chi.derivative((nw - 1) * (nw - 1));
    sphere::dist_sq_half_gradient(w.data(), m, grad.data());
    for (int c = 0; c < m; ++c) out[c] = -c0 * proj * a[c] / na + c1 * grad[c];
  });
  return q;
}

DirichletSolver::DirichletSolver(const MapField& u0, double K, double radius, const Cutoff& chi)
    : grid_(u0.grid_ptr()), m_(u0.components()) {
  const SpaceGrid& g = *grid_;
  const SphereGrid& s = g.sphere;
  const int nt = s.n_theta(), np = s.n_phi();
  const std::size_t per_shell = s.size();
  nr_ = shell_index(g, radius);
  size_ = (1 + (nr_ - 1) * per_shell) * m_;

  c_.assign(g.node_count(), 0.0);
  nu_.assign(g.node_count() * m_, 0.0);
  nu_bar_.assign(m_, 0.0);
  c_bar_.assign(nr_, 0.0);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const double* u = u0.node_values(node);
    const double nu = norm_of(u, m_);
    const double d = chi.derivative((nu - 1) * (nu - 1));
    if (d == 0.0 || K == 0.0) continue;
    if (nu < 1e-6) fail(ErrorKind::NearAmbientOrigin, "Dirichlet operator: |U0| vanishes where the penalty acts");
    c_[node] = K * d;
    const std::size_t i = node / per_shell;
    for (int c = 0; c < m_; ++c) {
      nu_[node * m_ + c] = u[c] / nu;
      if (i < nr_) nu_bar_[c] += c_[node] * u[c] / nu;
    }
  }
  for (std::size_t i = 1; i < nr_; ++i) {
    double acc = 0;
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < np; ++k) acc += s.weight(j) * c_[g.node(i, j, k)];
    c_bar_[i] = acc / (4 * std::numbers::pi);
  }
  c_bar_[0] = c_[0];
  const double nb = norm_of(nu_bar_.data(), m_);
  // Use the penalty in the preconditioner only when the normals roughly agree.
  double total = 0;
  for (std::size_t node = 0; node < nr_ * per_shell; ++node) total += c_[node];
  use_penalty_ = total > 0 && nb > 0.5 * total;
  if (use_penalty_)
    for (double& v : nu_bar_) v /= nb;

  // Azimuthal real Fourier basis.
  dft_.resize(np, np);
  wavenumber_.assign(np, 0);
  for (int k = 0; k < np; ++k) {
    dft_(k, 0) = 1 / std::sqrt(double(np));
    dft_(k, np - 1) = (k % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(np));
  }
  wavenumber_[np - 1] = np / 2;
  for (int mu = 1; mu < np / 2; ++mu)
    for (int k = 0; k < np; ++k) {
      const double a = 2 * std::numbers::pi * mu * k / np;
      dft_(k, 2 * mu - 1) = std::sqrt(2.0 / np) * std::cos(a);
      dft_(k, 2 * mu) = std::sqrt(2.0 / np) * std::sin(a);
      wavenumber_[2 * mu - 1] = wavenumber_[2 * mu] = mu;
    }

  // Latitude operator per wavenumber, symmetrized by the row weights.
  sqrt_w_.resize(nt);
  for (int j = 0; j < nt; ++j) sqrt_w_(j) = std::sqrt(s.weight(j));
  theta_basis_.resize(np / 2 + 1);
  theta_eigen_.resize(np / 2 + 1);
  for (int mu = 0; mu <= np / 2; ++mu) {
    const double az = 2 - 2 * std::cos(2 * std::numbers::pi * mu / np);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nt, nt);
    for (int j = 0; j < nt; ++j) {
      S(j, j) = -s.lap_north(j) - s.lap_south(j) - s.lap_azimuthal(j) * az;
      if (j + 1 < nt) {
        const double off = 0.5 * (sqrt_w_(j) / sqrt_w_(j + 1) * s.lap_south(j) +
                                  sqrt_w_(j + 1) / sqrt_w_(j) * s.lap_north(j + 1));
        S(j, j + 1) = S(j + 1, j) = off;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    theta_basis_[mu] = es.eigenvectors();
    theta_eigen_[mu] = es.eigenvalues();
  }
  theta_eigen_[0].maxCoeff(&const_index_);
  // Node value of the unit-amplitude constant mode.
  const_value_ = dft_(0, 0) * theta_basis_[0](0, const_index_) / sqrt_w_(0);

  lo_.assign(nr_, 0.0);
  di_.assign(nr_, 0.0);
  up_.assign(nr_, 0.0);
  for (std::size_t i = 1; i < nr_; ++i) {
    if (g.radial_first(i) != i - 1 || g.radial_width(i) != 3)
      fail(ErrorKind::Grid, "Dirichlet operator expects three-point radial rows inside the ball");
    const double r = g.radial[i];
    const double drift = 2.0 / r + 0.5 * r;
    const auto& w1 = g.radial_d1(i);
    const auto& w2 = g.radial_d2(i);
    lo_[i] = w2[0] + drift * w1[0];
    di_[i] = w2[1] + drift * w1[1];
    up_[i] = w2[2] + drift * w1[2];
  }
}

Eigen::VectorXd DirichletSolver::pack(const MapField& f) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(size_));
  const std::size_t per_shell = grid_->sphere.size();
  for (int c = 0; c < m_; ++c) x(c) = f.node_values(0)[c];
  const double* src = f.node_values(per_shell);
  std::copy(src, src + (nr_ - 1) * per_shell * m_, x.data() + m_);
  return x;
}

MapField DirichletSolver::unpack(const Eigen::VectorXd& x) const {
  MapField f(grid_, m_);
  const std::size_t per_shell = grid_->sphere.size();
  for (std::size_t q = 0; q < per_shell; ++q)
    for (int c = 0; c < m_; ++c) f.node_values(q)[c] = x(c);
  std::copy(x.data() + m_, x.data() + size_, f.node_values(per_shell));
  return f;
}

void DirichletSolver::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y, Exec exec) const {
  const SpaceGrid& g = *grid_;
  const std::size_t per_shell = g.sphere.size();
  const MapField in = unpack(x);
  std::vector<double> out(g.node_count() * m_);
  apply_weighted_laplacian(g, m_, in.data().data(), out.data(), exec);
  y.resize(static_cast<Eigen::Index>(size_));
  const auto penalty = [&](std::size_t node, const double* w, double* o) {
    if (c_[node] == 0.0) return;
    const double* nu = &nu_[node * m_];
    double p = 0;
    for (int c = 0; c < m_; ++c) p += nu[c] * w[c];
    for (int c = 0; c < m_; ++c) o[c] -= c_[node] * p * nu[c];
  };
  for (int c = 0; c < m_; ++c) y(c) = out[c];
  penalty(0, in.node_values(0), y.data());
  for_each_index(exec, (nr_ - 1) * per_shell, [&](std::size_t q) {
    const std::size_t node = per_shell + q;
    double* o = y.data() + m_ + q * m_;
    for (int c = 0; c < m_; ++c) o[c] = out[node * m_ + c];
    penalty(node, in.node_values(node), o);
  });
}

// field: center value followed by shells 1..nr-1 (per_shell each); solved in place.
void DirichletSolver::solve_scalar(std::vector<double>& field, bool penalized) const {
  const SphereGrid& s = grid_->sphere;
  const int nt = s.n_theta(), np = s.n_phi();
  const std::size_t per_shell = s.size();
  const std::size_t shells = nr_ - 1;
  // Forward transform: modes[(i-1)][a * nt + l].
  std::vector<double> modes(shells * per_shell);
  Eigen::MatrixXd ring(nt, np), coef(nt, np);
  for (std::size_t i = 0; i < shells; ++i) {
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < np; ++k) ring(j, k) = field[1 + i * per_shell + j * np + k];
    coef.noalias() = ring * dft_;  // (j, a)
    for (int a = 0; a < np; ++a) {
      const auto& Q = theta_basis_[wavenumber_[a]];
      const Eigen::VectorXd v = Q.transpose() * coef.col(a).cwiseProduct(sqrt_w_);
      for (int l = 0; l < nt; ++l) modes[i * per_shell + a * nt + l] = v(l);
    }
  }
  // Radial tridiagonal solves.
  std::vector<double> sub(shells + 1), dia(shells + 1), sup(shells + 1), rhs(shells + 1);
  const double r1 = grid_->radial[1];
  for (int a = 0; a < np; ++a)
    for (int l = 0; l < nt; ++l) {
      const double lambda = theta_eigen_[wavenumber_[a]](l);
      const bool with_center = a == 0 && l == const_index_;
      // Unknown t = 0 is the center (only for the constant mode); t = i for shell i.
      for (std::size_t i = 1; i <= shells; ++i) {
        const double r = grid_->radial[i];
        sub[i] = lo_[i];
        dia[i] = di_[i] + lambda / (r * r) - (penalized ? c_bar_[i] : 0.0);
        sup[i] = i < shells ? up_[i] : 0.0;
        rhs[i] = modes[(i - 1) * per_shell + a * nt + l];
      }
      std::size_t t0 = 1;
      if (with_center) {
        t0 = 0;
        dia[0] = -6.0 / (r1 * r1) - (penalized ? c_bar_[0] : 0.0);
        sup[0] = 6.0 / (r1 * r1);
        rhs[0] = field[0] / const_value_;
      }
      // Thomas algorithm from t0.
      for (std::size_t t = t0 + 1; t <= shells; ++t) {
        const double w = sub[t] / dia[t - 1];
        dia[t] -= w * sup[t - 1];
        rhs[t] -= w * rhs[t - 1];
      }
      rhs[shells] /= dia[shells];
      for (std::size_t t = shells; t-- > t0;) rhs[t] = (rhs[t] - sup[t] * rhs[t + 1]) / dia[t];
      for (std::size_t i = 1; i <= shells; ++i) modes[(i - 1) * per_shell + a * nt + l] = rhs[i];
      if (with_center) field[0] = rhs[0] * const_value_;
    }
  // Inverse transform.
  for (std::size_t i = 0; i < shells; ++i) {
    for (int a = 0; a < np; ++a) {
      const auto& Q = theta_basis_[wavenumber_[a]];
      Eigen::VectorXd v(nt);
      for (int l = 0; l < nt; ++l) v(l) = modes[i * per_shell + a * nt + l];
      coef.col(a) = (Q * v).cwiseQuotient(sqrt_w_);
    }
    ring.noalias() = coef * dft_.transpose();
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < np; ++k) field[1 + i * per_shell + j * np + k] = ring(j, k);
  }
}

void DirichletSolver::precondition(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
  const std::size_t count = size_ / m_;  // center + shell nodes
  z.resize(static_cast<Eigen::Index>(size_));
  std::vector<double> field(count);
  if (use_penalty_) {
    std::vector<double> para(count);
    for (std::size_t q = 0; q < count; ++q) {
      double p = 0;
      for (int c = 0; c < m_; ++c) p += nu_bar_[c] * r(q * m_ + c);
      para[q] = p;
    }
    solve_scalar(para, true);
    for (int c = 0; c < m_; ++c) {
      for (std::size_t q = 0; q < count; ++q) {
        double p = 0;
        for (int d = 0; d < m_; ++d) p += nu_bar_[d] * r(q * m_ + d);
        field[q] = r(q * m_ + c) - p * nu_bar_[c];
      }
      solve_scalar(field, false);
      for (std::size_t q = 0; q < count; ++q) z(q * m_ + c) = field[q] + para[q] * nu_bar_[c];
    }
    return;
  }
  for (int c = 0; c < m_; ++c) {
    for (std::size_t q = 0; q < count; ++q) field[q] = r(q * m_ + c);
    solve_scalar(field, false);
    for (std::size_t q = 0; q < count; ++q) z(q * m_ + c) = field[q];
  }
}

MapField DirichletSolver::solve(const MapField& rhs, const LinearSolveOptions& opt,
                                LinearSolveReport* report) const {
  // Restarted GMRES, right-preconditioned so the monitored residual is the
  // true one.
  const Eigen::VectorXd b = pack(rhs);
  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  LinearSolveReport rep;
  if (bnorm == 0.0) {
    if (report) *report = rep;
    return unpack(x);
  }
  const int restart = std::max(1, opt.restart);
  std::vector<Eigen::VectorXd> basis(restart + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(restart + 1, restart);
  Eigen::VectorXd cs(restart), sn(restart), g(restart + 1);
  Eigen::VectorXd r(b.size()), w(b.size()), z(b.size());
  apply(x, r, opt.exec);
  r = b - r;
  double beta = r.norm();
  while (beta > opt.tolerance * bnorm) {
    if (rep.iterations >= opt.max_iterations) {
      std::ostringstream os;
      os << "GMRES: relative residual " << beta / bnorm << " after " << rep.iterations << " iterations";
      fail(ErrorKind::LinearSolve, os.str());
    }
    basis[0] = r / beta;
    g.setZero();
    g(0) = beta;
    int k = 0;
    for (; k < restart && rep.iterations < opt.max_iterations; ++k) {
      ++rep.iterations;
      precondition(basis[k], z);
      apply(z, w, opt.exec);
      for (int j = 0; j <= k; ++j) {
        h(j, k) = w.dot(basis[j]);
        w -= h(j, k) * basis[j];
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) > 0) basis[k + 1] = w / h(k + 1, k);
      for (int j = 0; j < k; ++j) {
        const double t = cs(j) * h(j, k) + sn(j) * h(j + 1, k);
        h(j + 1, k) = -sn(j) * h(j, k) + cs(j) * h(j + 1, k);
        h(j, k) = t;
      }
      const double d = std::hypot(h(k, k), h(k + 1, k));
      cs(k) = h(k, k) / d;
      sn(k) = h(k + 1, k) / d;
      h(k, k) = d;
      h(k + 1, k) = 0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);
      if (std::abs(g(k + 1)) <= 0.5 * opt.tolerance * bnorm || h(k, k) == 0.0) {
        ++k;
        break;
      }
    }
    const Eigen::VectorXd y =
        h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    Eigen::VectorXd update = Eigen::VectorXd::Zero(b.size());
    for (int j = 0; j < k; ++j) update += y(j) * basis[j];
    precondition(update, z);
    x += z;
    apply(x, r, opt.exec);
    r = b - r;
    beta = r.norm();
  }
  rep.relative_residual = beta / bnorm;
  if (report) *report = rep;
  return unpack(x);
}

MapField solve_linear_dirichlet(const MapField& q, const MapField& u0, double K, double radius,
                                const LinearSolveOptions& opt, LinearSolveReport* report,
                                const Cutoff& chi) {
  check_same_grid(q, u0);
  for (double v : q.data())
    if (!std::isfinite(v)) fail(ErrorKind::Accuracy, "solve_linear_dirichlet: right side is not finite");
  const DirichletSolver solver(u0, K, radius, chi);
  return solver.solve(q, opt, report);
}

double barrier_ratio(const MapField& w, double q_norm) {
  if (!(q_norm > 0)) return 0.0;
  const SpaceGrid& g = w.grid();
  const std::size_t per_shell = g.sphere.size();
  double best = 0;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const double r = g.radial[node / per_shell];
    best = std::max(best, potential(r, 3) * norm_of(w.node_values(node), w.components()));
  }
  return best / q_norm;
}

MapField fixed_point_map(const DirichletSolver& solver, const MapField& u0, const MapField& v,
                         double K, const PicardOptions& opt, PicardStep* step) {
  MapField rhs = assemble_Q(u0, v, K, opt.chi, opt.linear.exec);
  const double qn = step ? x_norm(rhs, opt.linear.exec) : 0.0;
  // Δ_f^h U0 is applied to U0 - U0(0) so constant data contributes exactly 0.
  MapField shifted = u0;
  const std::vector<double> center(u0.node_values(0), u0.node_values(0) + u0.components());
  for (std::size_t node = 0; node < shifted.node_count(); ++node)
    for (int c = 0; c < u0.components(); ++c) shifted.node_values(node)[c] -= center[c];
  rhs -= weighted_laplacian(shifted, opt.linear.exec);
  LinearSolveReport rep;
  MapField w = solver.solve(rhs, opt.linear, &rep);
  if (step) {
    step->q_norm = qn;
    step->linear_iterations = rep.iterations;
    step->linear_residual = rep.relative_residual;
    step->barrier_ratio = barrier_ratio(w, qn);
  }
  return w;
}

FixedPointState picard_iterate(FixedPointState state, const PicardOptions& opt) {
  const DirichletSolver solver(state.u0, state.K, opt.radius, opt.chi);
  state.converged = false;
  double prev_step = std::numeric_limits<double>::quiet_NaN();
  int rising = 0;
  std::vector<double> ratios;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    PicardStep step;
    step.iteration = it;
    MapField next = fixed_point_map(solver, state.u0, state.v, state.K, opt, &step);
    MapField diff = next - state.v;
    step.step_norm = x_norm(diff, opt.linear.exec);
    step.ratio = step.step_norm / prev_step;
    state.v = std::move(next);
    step.v_norm = x_norm(state.v, opt.linear.exec);
    state.v_norm = step.v_norm;
    state.ledger.push_back(step);
    if (it > 1) ratios.push_back(step.ratio);
    if (step.step_norm < opt.tolerance) {
      state.converged = true;
      return state;
    }
    rising = (it > 1 && step.ratio >= 1) ? rising + 1 : 0;
    if (rising >= 3) {
      std::ostringstream os;
      os << "Picard iteration diverging at sigma = " << state.sigma << ", K = " << state.K
         << ": three consecutive contraction ratios >= 1";
      throw DivergenceError(os.str(), ratios);
    }
    prev_step = step.step_norm;
  }
  std::ostringstream os;
  os << "Picard iteration: step " << state.ledger.back().step_norm << " after " << opt.max_iterations
     << " iterations";
  throw NonConvergenceError(os.str(), state.v.data(), state.ledger.back().step_norm);
}

double static_residual(const MapField& u, double K, double radius, const Cutoff& chi, Exec exec) {
  const SpaceGrid& g = u.grid();
  const std::size_t nr = shell_index(g, radius);
  const int m = u.components();
  const MapField lap = weighted_laplacian(u, exec);
  const std::size_t per_shell = g.sphere.size();
  double best = 0;
  std::vector<double> force(m);
  for (std::size_t node = 0; node < nr * per_shell; ++node) {
    if (node > 0 && node < per_shell) continue;  // duplicate center slots
    const double* v = u.node_values(node);
    sphere::cs_force(v, m, K, chi, force.data());
    double s = 0;
    for (int c = 0; c < m; ++c) {
      const double e = -lap.node_values(node)[c] + force[c];
      s += e * e;
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

DecayReport verify_decay(const MapField& v, double lo, double hi, Exec exec) {
  const SpaceGrid& g = v.grid();
  const GradientField grad = gradient(v, exec);
  const int m = v.components();
  const std::size_t per_shell = g.sphere.size();
  DecayReport rep;
  std::vector<double> r, vmax, gmax;
  for (std::size_t i = 0; i < g.radial.size(); ++i) {
    const double f = potential(g.radial[i], 3);
    double a = 0, b = 0;
    for (std::size_t q = 0; q < per_shell; ++q) {
      const std::size_t node = i * per_shell + q;
      a = std::max(a, norm_of(v.node_values(node), m));
      b = std::max(b, norm_of(grad.jacobian(node), 3 * m));
    }
    rep.sup_fv = std::max(rep.sup_fv, f * a);
    rep.sup_f32_grad = std::max(rep.sup_f32_grad, std::pow(f, 1.5) * b);
    if (g.radial[i] >= lo && g.radial[i] <= hi && a > 0 && b > 0) {
      r.push_back(g.radial[i]);
      vmax.push_back(a);
      gmax.push_back(b);
    }
  }
  if (r.size() >= 3) {
    rep.v_slope = loglog_slope(r, vmax);
    rep.grad_slope = loglog_slope(r, gmax);
  }
  return rep;
}

QShapeFit q_shape(const MapField& u0, const MapField& direction, double K, const std::vector<double>& t,
                  const Cutoff& chi, Exec exec) {
  QShapeFit fit;
  const double unit = x_norm(direction, exec);
  if (!(unit > 0)) fail(ErrorKind::Config, "q_shape: direction has zero X-norm");
  std::vector<double> one, lin, quad;
  for (double s : t) {
    MapField v = direction;
    v *= s / unit;
    const double vn = x_norm(v, exec);
    fit.v_norms.push_back(vn);
    fit.q_norms.push_back(x_norm(assemble_Q(u0, v, K, chi, exec), exec));
    one.push_back(1.0);
    lin.push_back(vn);
    quad.push_back(vn * vn);
  }
  const auto ls = least_squares({one, lin, quad}, fit.q_norms);
  fit.a = ls.coefficients[0];
  fit.b = ls.coefficients[1];
  fit.c = ls.coefficients[2];
  fit.r_squared = ls.r_squared;
  return fit;
}

MapField random_decaying_field(const SpaceGridPtr& grid, int m, unsigned seed, double radius) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> coef(static_cast<std::size_t>(m) * 5);
  for (double& c : coef) c = normal(rng);
  const double cut = radius > 0 ? radius : grid->radial.r_max();
  MapField v = MapField::sample(grid, m, [&](const Vec3& x, double* out) {
    const double r2 = x.squaredNorm();
    const double bump = std::exp(-r2 / 8);
    const double tail = 1 / ((1 + r2) * (1 + r2));
    // Vanishes at the Dirichlet radius.
    const double edge = std::max(0.0, 1 - r2 / (cut * cut));
    for (int c = 0; c < m; ++c) {
      const double* k = &coef[static_cast<std::size_t>(c) * 5];
      out[c] = edge * (k[0] * bump + k[1] * x.x() * bump + k[2] * x.y() * bump +
                       k[3] * x.z() * bump + k[4] * tail);
    }
  });
  v *= 1 / x_norm(v);
  return v;
}

ContractionSample contraction_sample(const DirichletSolver& solver, const MapField& u0, double K,
                                     double eps, int pairs, unsigned seed, const PicardOptions& opt) {
  ContractionSample out;
  out.eps = eps;
  const auto& grid = u0.grid_ptr();
  const int m = u0.components();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> scale(0.2, 1.0);
  for (int p = 0; p < pairs; ++p) {
    MapField v1 = random_decaying_field(grid, m, rng(), solver.grid().radial[solver.boundary_shell()]);
    MapField v2 = random_decaying_field(grid, m, rng(), solver.grid().radial[solver.boundary_shell()]);
    v1 *= eps * scale(rng);
    v2 *= eps * scale(rng);
    const double dv = x_norm(v1 - v2, opt.linear.exec);
    const MapField f1 = fixed_point_map(solver, u0, v1, K, opt);
    const MapField f2 = fixed_point_map(solver, u0, v2, K, opt);
    out.map_ratio = std::max(out.map_ratio, x_norm(f1 - f2, opt.linear.exec) / dv);
    const MapField q1 = assemble_Q(u0, v1, K, opt.chi, opt.linear.exec);
    const MapField q2 = assemble_Q(u0, v2, K, opt.chi, opt.linear.exec);
    out.q_ratio = std::max(out.q_ratio, x_norm(q1 - q2, opt.linear.exec) / dv);
  }
  return out;
}

}  // namespace hmfx
