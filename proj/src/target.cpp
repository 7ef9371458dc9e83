#include "hmfx/target.hpp"

#include <cmath>
#include <sstream>

#include "hmfx/error.hpp"

namespace hmfx {

Cutoff::Cutoff(double delta, double knot) : delta_(delta) {
  if (!(delta > 0) || !(knot > 2.0))
    fail(ErrorKind::Config, "cutoff: need delta > 0 and knot > 2");
  left_ = delta * delta;
  right_ = knot * left_;
  // q(0) = 0, q'(0) = 1, q''(0) = 0, q(1) = beta, q'(1) = q''(1) = 0 with
  // beta = left / (right - left); p(s) = left + (right - left) q(t).
  const double beta = 1.0 / (knot - 1.0);
  c3_ = 10 * beta - 6;
  c4_ = 8 - 15 * beta;
  c5_ = 6 * beta - 3;
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    const double dq = 1 + 3 * c3_ * t * t + 4 * c4_ * t * t * t + 5 * c5_ * t * t * t * t;
    if (dq < -1e-12) {
      std::ostringstream os;
      os << "cutoff: quintic on [delta^2, " << knot << " delta^2] is not monotone";
      fail(ErrorKind::Config, os.str());
    }
  }
}

double Cutoff::value(double s) const {
  if (s <= left_) return s;
  if (s >= right_) return plateau();
  const double t = (s - left_) / (right_ - left_);
  const double q = t + t * t * t * (c3_ + t * (c4_ + t * c5_));
  return left_ + (right_ - left_) * q;
}

double Cutoff::derivative(double s) const {
  if (s <= left_) return 1.0;
  if (s >= right_) return 0.0;
  const double t = (s - left_) / (right_ - left_);
  return 1 + t * t * (3 * c3_ + t * (4 * c4_ + t * 5 * c5_));
}

double Cutoff::second_derivative(double s) const {
  if (s <= left_ || s >= right_) return 0.0;
  const double t = (s - left_) / (right_ - left_);
  return t * (6 * c3_ + t * (12 * c4_ + t * 20 * c5_)) / (right_ - left_);
}

namespace sphere {

double dist_sq(const double* u, int m) {
  double sq = 0;
  for (int c = 0; c < m; ++c) sq += u[c] * u[c];
  const double d = std::sqrt(sq) - 1.0;
  return d * d;
}

void dist_sq_half_gradient(const double* u, int m, double* out) {
  double sq = 0;
  for (int c = 0; c < m; ++c) sq += u[c] * u[c];
  const double norm = std::sqrt(sq);
  if (norm == 0.0) fail(ErrorKind::GeometryDomain, "distance gradient undefined at the origin");
  const double f = (norm - 1.0) / norm;
  for (int c = 0; c < m; ++c) out[c] = f * u[c];
}

void cs_force(const double* u, int m, double k_over_t, const Cutoff& chi, double* out) {
  const double slope = chi.derivative(dist_sq(u, m));
  if (slope == 0.0) {
    for (int c = 0; c < m; ++c) out[c] = 0.0;
    return;
  }
  dist_sq_half_gradient(u, m, out);
  for (int c = 0; c < m; ++c) out[c] *= k_over_t * slope;
}

void gl_force(const double* u, int m, double k_over_t, double* out) {
  double sq = 0;
  for (int c = 0; c < m; ++c) sq += u[c] * u[c];
  for (int c = 0; c < m; ++c) out[c] = k_over_t * (1 - sq) * u[c];
}

}  // namespace sphere

TargetSphere::TargetSphere(int ambient_dim, Cutoff cutoff) : m_(ambient_dim), chi_(cutoff) {
  if (ambient_dim < 2) fail(ErrorKind::Config, "target sphere needs ambient dimension >= 2");
}

void TargetSphere::check(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != m_) fail(ErrorKind::GeometryDomain, "vector has wrong dimension");
}

void TargetSphere::second_fundamental_form(std::span<const double> u, std::span<const double> v,
                                           std::span<const double> w,
                                           std::span<double> out) const {
  check(u);
  check(v);
  check(w);
  double uu = 0, uv = 0, uw = 0, vw = 0;
  for (int c = 0; c < m_; ++c) {
    uu += u[c] * u[c];
    uv += u[c] * v[c];
    uw += u[c] * w[c];
    vw += v[c] * w[c];
  }
  if (std::abs(uu - 1.0) > 1e-8) fail(ErrorKind::GeometryDomain, "point is not on the sphere");
  if (std::abs(uv) > 1e-8 || std::abs(uw) > 1e-8)
    fail(ErrorKind::Tangency, "second fundamental form needs tangent vectors");
  for (int c = 0; c < m_; ++c) out[c] = -vw * u[c];
}

void TargetSphere::dist_sq_gradient(std::span<const double> u, std::span<double> out) const {
  check(u);
  sphere::dist_sq_half_gradient(u.data(), m_, out.data());
  for (int c = 0; c < m_; ++c) out[c] *= 2.0;
}

double TargetSphere::dist_sq(std::span<const double> u) const {
  check(u);
  return sphere::dist_sq(u.data(), m_);
}

void TargetSphere::cs_force(std::span<const double> u, double k, double t,
                            std::span<double> out) const {
  check(u);
  if (!(t > 0)) fail(ErrorKind::TimeOrder, "force needs t > 0");
  sphere::cs_force(u.data(), m_, k / t, chi_, out.data());
}

void TargetSphere::gl_force(std::span<const double> u, double k, double t,
                            std::span<double> out) const {
  check(u);
  if (!(t > 0)) fail(ErrorKind::TimeOrder, "force needs t > 0");
  sphere::gl_force(u.data(), m_, k / t, out.data());
}

}  // namespace hmfx
