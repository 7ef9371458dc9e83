#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hmfx/grid.hpp"

namespace hmfx {

/// Values of a map from S^{n-1} to R^m at the nodes of a sphere discretization.
struct SphereMap {
  SphereMap() = default;
  SphereMap(std::size_t nodes, int m) : nodes(nodes), m(m), values(nodes * m, 0.0) {}

  double* at(std::size_t node) { return values.data() + node * m; }
  const double* at(std::size_t node) const { return values.data() + node * m; }
  double dot(std::size_t node, const SphereMap& other) const;
  double max_norm() const;

  std::size_t nodes = 0;
  int m = 0;
  std::vector<double> values;
};

/// Angular derivatives needed by the far-field recursion.
class SphereCalculus {
 public:
  virtual ~SphereCalculus() = default;
  virtual int dimension() const = 0;
  virtual std::size_t node_count() const = 0;
  virtual SphereMap laplacian(const SphereMap& u) const = 0;
  /// Per-node ⟨∇_S a, ∇_S b⟩.
  virtual std::vector<double> gradient_inner(const SphereMap& a, const SphereMap& b) const = 0;
};

/// Latitude-longitude nodes of S^2 (n = 3), same stencils as the full grid.
class LatLongCalculus final : public SphereCalculus {
 public:
  explicit LatLongCalculus(SphereGrid grid);
  int dimension() const override { return 3; }
  std::size_t node_count() const override { return grid_.size(); }
  SphereMap laplacian(const SphereMap& u) const override;
  std::vector<double> gradient_inner(const SphereMap& a, const SphereMap& b) const override;
  const SphereGrid& grid() const { return grid_; }
  SphereMap sample(int m, const std::function<void(const Vec3&, double*)>& fn) const;

 private:
  SphereGrid grid_;
};

/// Corotational data in R^n: a single node holding (α, β) for α (ω, 0) + β (0, 1).
class CorotationalCalculus final : public SphereCalculus {
 public:
  explicit CorotationalCalculus(int n);
  int dimension() const override { return n_; }
  std::size_t node_count() const override { return 1; }
  SphereMap laplacian(const SphereMap& u) const override;
  std::vector<double> gradient_inner(const SphereMap& a, const SphereMap& b) const override;

 private:
  int n_;
};

/// Δ_S on a latitude-longitude grid; rejects grids coarser than 16 x 8.
SphereMap sphere_laplacian(const SphereGrid& grid, const SphereMap& u);

enum class Flow { HarmonicMap, GinzburgLandau };

/// U ~ Σ_i u_i |x|^{-2i} with u_i on the sphere nodes. The ledger holds the
/// scalar sequence driving the recursion: b_i = coefficient of |x|^{-2i} in
/// |∇U|² (harmonic map) or a_i = coefficient in |U|² (Ginzburg-Landau).
struct AsymptoticSeries {
  Flow flow = Flow::HarmonicMap;
  double K = 0;
  int n = 3;
  std::vector<SphereMap> u;
  std::vector<std::vector<double>> ledger;

  int order() const { return static_cast<int>(u.size()) - 1; }
  SphereMap evaluate(double r) const;
};

AsymptoticSeries hmf_coefficients(const SphereCalculus& calc, const SphereMap& u0, int order);
AsymptoticSeries gl_coefficients(const SphereCalculus& calc, const SphereMap& u0, double K,
                                 int order);

/// Scalar corotational series: α_i, β_i for the boundary angle h∞.
struct CorotSeries {
  std::vector<double> alpha, beta;
  double radial(double r) const;
  double axial(double r) const;
  double angle(double r) const;
};
CorotSeries corotational_series(int n, double h_inf, int order, Flow flow, double K = 0);

}  // namespace hmfx
