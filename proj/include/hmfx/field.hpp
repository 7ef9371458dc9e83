#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "hmfx/exec.hpp"
#include "hmfx/grid.hpp"

namespace hmfx {

/// Vector-valued nodal samples U: R^3 -> R^m on a SpaceGrid.
class MapField {
 public:
  using Sampler = std::function<void(const Vec3& x, double* out)>;

  MapField(SpaceGridPtr grid, int components);

  static MapField sample(SpaceGridPtr grid, int components, const Sampler& fn,
                         Exec exec = Exec::Serial);

  const SpaceGrid& grid() const { return *grid_; }
  const SpaceGridPtr& grid_ptr() const { return grid_; }
  int components() const { return m_; }
  std::size_t node_count() const { return grid_->node_count(); }

  double* node_values(std::size_t node) { return values_.data() + node * m_; }
  const double* node_values(std::size_t node) const { return values_.data() + node * m_; }
  double* at(std::size_t i, int j, int k) { return node_values(grid_->node(i, j, k)); }
  const double* at(std::size_t i, int j, int k) const { return node_values(grid_->node(i, j, k)); }

  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }

  /// Copies the (0, 0, 0) entry to every other center slot.
  void sync_center();
  void interpolate(const Vec3& x, double* out) const;

  MapField& operator+=(const MapField& other);
  MapField& operator-=(const MapField& other);
  MapField& operator*=(double s);

 private:
  SpaceGridPtr grid_;
  int m_;
  std::vector<double> values_;
};

MapField operator+(MapField a, const MapField& b);
MapField operator-(MapField a, const MapField& b);

/// Cartesian Jacobians ∇U, stored per node as m x 3 row-major.
class GradientField {
 public:
  GradientField(SpaceGridPtr grid, int components);

  const SpaceGrid& grid() const { return *grid_; }
  int components() const { return m_; }
  double* jacobian(std::size_t node) { return values_.data() + node * m_ * 3; }
  const double* jacobian(std::size_t node) const { return values_.data() + node * m_ * 3; }
  std::vector<double>& data() { return values_; }
  const std::vector<double>& data() const { return values_; }
  void interpolate(const Vec3& x, double* out) const;

 private:
  SpaceGridPtr grid_;
  int m_;
  std::vector<double> values_;
};

/// Second-order spherical-coordinate differences converted to Cartesian form.
/// Exact on linear fields and on degree-one angular data.
GradientField gradient(const MapField& field, Exec exec = Exec::Serial);

/// max over nodes of (1 + |x|)^p |V(x)|.
double weighted_sup_norm(const MapField& field, double p);
double weighted_sup_norm(const GradientField& grad, double p);

/// Ball average of a scalar field (component 0) by Gauss quadrature in
/// spherical coordinates around the center, with linear interpolation.
double quadrature_ball(const MapField& scalar, const Vec3& center, double radius,
                       int order = 12);

void write_field(const MapField& field, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path);
MapField read_field(const std::filesystem::path& csv_path, const std::filesystem::path& json_path);

}  // namespace hmfx
