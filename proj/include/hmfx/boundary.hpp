#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hmfx/grid.hpp"

namespace hmfx {

enum class Smoothness { Smooth, Lipschitz };

/// 0-homogeneous boundary data u0: S^2 -> S^{m-1} ⊂ R^m, evaluated on unit
/// directions. Built-ins carry their own homotopy u0^σ to the pole e_m.
class BoundaryMap {
 public:
  using Fn = std::function<void(const Vec3& omega, double* out)>;
  using Path = std::function<BoundaryMap(double sigma)>;

  BoundaryMap(std::string name, int components, Fn fn, Smoothness smoothness, Path path = {});

  static BoundaryMap constant(std::vector<double> point);
  /// (sin h ω, cos h) ∈ S^3 ⊂ R^4.
  static BoundaryMap corotational(double h_inf);
  static BoundaryMap equator();
  static BoundaryMap identity_sphere();
  /// (sin(a|ω_3|), 0, cos(a|ω_3|)): Lipschitz, with a kink along ω_3 = 0.
  static BoundaryMap lipschitz_wedge(double amplitude = 1.0);
  /// Samples on a latitude-longitude product grid: columns theta, phi, u1..um.
  static BoundaryMap from_csv(const std::filesystem::path& path);

  const std::string& name() const { return name_; }
  int components() const { return m_; }
  Smoothness smoothness() const { return smoothness_; }

  void operator()(const Vec3& omega, double* out) const { fn_(omega, out); }
  /// u0(x / |x|); x must be nonzero.
  void at(const Vec3& x, double* out) const;
  /// |∇u0|²(x) for x ≠ 0, by centered differences along tangent directions.
  double gradient_sq(const Vec3& x) const;

  /// Member of the homotopy u0^σ; σ = 1 is the constant pole map.
  BoundaryMap along_path(double sigma) const;

 private:
  std::string name_;
  int m_;
  Fn fn_;
  Smoothness smoothness_;
  Path path_;
};

}  // namespace hmfx
