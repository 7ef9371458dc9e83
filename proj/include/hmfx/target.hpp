#pragma once

#include <span>

namespace hmfx {

/// Cutoff χ for the penalty: χ(s) = s near 0, constant 2δ² far out, joined
/// by the C² quintic on [δ², knot·δ²] with matching value, slope and
/// curvature at both ends. Construction fails unless that quintic is monotone.
class Cutoff {
 public:
  explicit Cutoff(double delta = 0.25, double knot = 3.0);

  double value(double s) const;
  double derivative(double s) const;
  double second_derivative(double s) const;

  double delta() const { return delta_; }
  double left() const { return left_; }
  double right() const { return right_; }
  double plateau() const { return 2 * left_; }

 private:
  double delta_, left_, right_;
  double c3_, c4_, c5_;  // q(t) = t + c3 t³ + c4 t⁴ + c5 t⁵ on t ∈ [0, 1]
};

/// Round sphere S^{m-1} ⊂ R^m with its nearest-point geometry. The free
/// functions below are the inner loops; TargetSphere wraps them with
/// dimension and tangency checks.
namespace sphere {
/// d(u)² = (|u| - 1)².
double dist_sq(const double* u, int m);
/// ∇(d²/2)(u) = (|u| - 1) u / |u|.
void dist_sq_half_gradient(const double* u, int m, double* out);
/// Chen-Struwe force (K/t) χ'(d²) ∇(d²/2)(u).
void cs_force(const double* u, int m, double k_over_t, const Cutoff& chi, double* out);
/// Ginzburg-Landau force (K/t) (1 - |u|²) u.
void gl_force(const double* u, int m, double k_over_t, double* out);
}  // namespace sphere

class TargetSphere {
 public:
  explicit TargetSphere(int ambient_dim, Cutoff cutoff = Cutoff());

  int ambient_dim() const { return m_; }
  const Cutoff& cutoff() const { return chi_; }

  /// A(u)(v, w) = -⟨v, w⟩ u for u on the sphere and v, w tangent at u.
  void second_fundamental_form(std::span<const double> u, std::span<const double> v,
                               std::span<const double> w, std::span<double> out) const;
  void dist_sq_gradient(std::span<const double> u, std::span<double> out) const;
  double dist_sq(std::span<const double> u) const;
  void cs_force(std::span<const double> u, double k, double t, std::span<double> out) const;
  void gl_force(std::span<const double> u, double k, double t, std::span<double> out) const;

 private:
  void check(std::span<const double> u) const;
  int m_;
  Cutoff chi_;
};

}  // namespace hmfx
