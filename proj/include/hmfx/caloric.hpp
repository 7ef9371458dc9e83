#pragma once

#include "hmfx/boundary.hpp"
#include "hmfx/field.hpp"

namespace hmfx {

struct CaloricOptions {
  int panel_order = 8;   // Gauss points per polar panel
  int azimuth = 32;      // uniform azimuthal points
  double tolerance = 1e-5;
  /// Every stride-th grid node is re-evaluated at doubled resolution during
  /// fill; 0 disables the check.
  std::size_t check_stride = 0;
};

/// U0(x, t) = (K_t * u0)(x) for 0-homogeneous u0 on R^3. The radial part of
/// the convolution is done in closed form, leaving a sphere integral in a
/// frame whose pole is x/|x|; polar panels shrink with the kernel width
/// 2√t/|x|. Weights are renormalized to the discrete kernel mass so constants
/// are exact and |U0| <= max |u0| holds node by node.
class CaloricExtension {
 public:
  explicit CaloricExtension(BoundaryMap u0, CaloricOptions options = {});

  const BoundaryMap& boundary() const { return u0_; }
  const CaloricOptions& options() const { return options_; }

  void evaluate(const Vec3& x, double t, double* out) const;
  void evaluate(const Vec3& x, double* out) const { evaluate(x, 1.0, out); }
  /// Difference between the configured rule and one with doubled resolution.
  double error_estimate(const Vec3& x, double t = 1.0) const;
  /// Evaluates like evaluate() but throws an accuracy error when the
  /// self-estimate exceeds the tolerance.
  void evaluate_checked(const Vec3& x, double t, double* out) const;

  /// t = 1 values on every node.
  MapField fill(const SpaceGridPtr& grid, Exec exec = Exec::Serial) const;

 private:
  void evaluate_with(const Vec3& x, double t, int order, int azimuth, double* out) const;
  BoundaryMap u0_;
  CaloricOptions options_;
};

/// Heat extension of corotational data (sin h ω, cos h) in R^n, returned as
/// U0 = (radial ω, axial). Exact reduction to a polar integral.
struct CorotCaloric {
  double radial;
  double axial;
};
CorotCaloric corotational_caloric(int n, double h_inf, double r, double t = 1.0);

/// t = 1 heat extension of corotational data on a 3D grid, m = 4.
MapField corotational_caloric_field(const SpaceGridPtr& grid, double h_inf);

}  // namespace hmfx
