#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

namespace hmfx {

using Vec3 = Eigen::Vector3d;

/// Radial nodes 0 = r_0 < ... < r_N = R_max. Graded grids use the mapping
/// r(s) = s on [0, 1] and r(s) = 1 + (exp(stretch (s - 1)) - 1) / stretch
/// beyond, sampled at uniform s, so halving the spacing refines smoothly.
class RadialGrid {
 public:
  static RadialGrid graded(double spacing, double stretch, double r_max);
  static RadialGrid graded_intervals(double stretch, double r_max, std::size_t intervals);
  static RadialGrid from_nodes(std::vector<double> nodes);

  std::size_t size() const { return r_.size(); }
  std::size_t last() const { return r_.size() - 1; }
  double operator[](std::size_t i) const { return r_[i]; }
  double r_max() const { return r_.back(); }
  const std::vector<double>& nodes() const { return r_; }

  /// Interval index i with r_i <= r <= r_{i+1}; r must lie in [0, R_max].
  std::size_t interval(double r) const;
  /// Same mapping with half the s-spacing.
  RadialGrid refined() const;

  double spacing() const { return spacing_; }
  double stretch() const { return stretch_; }

 private:
  explicit RadialGrid(std::vector<double> r) : r_(std::move(r)) {}
  void validate() const;

  std::vector<double> r_;
  double spacing_ = 0;
  double stretch_ = 0;
};

/// Midpoint latitude-longitude grid on S^2. Poles are not nodes; row weights
/// are exact band areas so they sum to 4 pi.
class SphereGrid {
 public:
  SphereGrid(int n_theta, int n_phi);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  std::size_t size() const { return static_cast<std::size_t>(n_theta_) * n_phi_; }
  double dtheta() const { return dtheta_; }
  double dphi() const { return dphi_; }
  double theta(int j) const { return theta_[j]; }
  double phi(int k) const { return phi_[k]; }
  double sin_theta(int j) const { return sin_theta_[j]; }
  double cos_theta(int j) const { return cos_theta_[j]; }
  double weight(int j) const { return weight_[j]; }
  Vec3 direction(int j, int k) const;
  int wrap(int k) const { return ((k % n_phi_) + n_phi_) % n_phi_; }
  int across_pole(int k) const { return (k + n_phi_ / 2) % n_phi_; }

  // Flux-form Laplace-Beltrami coefficients for row j:
  //   Δu = north (u_{j-1} - u_j) + south (u_{j+1} - u_j)
  //        + azimuthal (u_{k+1} - 2 u_k + u_{k-1}).
  // Scaled so degree-one spherical harmonics are reproduced exactly.
  double lap_north(int j) const { return lap_north_[j]; }
  double lap_south(int j) const { return lap_south_[j]; }
  double lap_azimuthal(int j) const { return lap_azimuthal_[j]; }

  /// Centered difference denominators, exact on degree-one trigonometric data.
  double dtheta_denominator() const { return 2.0 * std::sin(dtheta_); }
  double dphi_denominator() const { return 2.0 * std::sin(dphi_); }

  /// Inverse of sum_nodes w ω ωᵀ; fits the center gradient exactly for linear data.
  const Eigen::Matrix3d& moment_inverse() const { return moment_inverse_; }

 private:
  int n_theta_, n_phi_;
  double dtheta_, dphi_;
  std::vector<double> theta_, phi_, sin_theta_, cos_theta_, weight_;
  std::vector<double> sin_phi_, cos_phi_;
  std::vector<double> lap_north_, lap_south_, lap_azimuthal_;
  Eigen::Matrix3d moment_inverse_;
};

/// Product grid R^3 = radial x sphere. Node (i, j, k) sits at r_i ω_{jk}; all
/// i = 0 nodes are the same physical point and carry identical values.
struct SpaceGrid {
  SpaceGrid(RadialGrid r, SphereGrid s);

  RadialGrid radial;
  SphereGrid sphere;

  std::size_t node_count() const { return radial.size() * sphere.size(); }
  std::size_t node(std::size_t i, int j, int k) const {
    return (i * sphere.n_theta() + j) * sphere.n_phi() + k;
  }
  Vec3 position(std::size_t i, int j, int k) const { return radial[i] * sphere.direction(j, k); }

  // Three-point radial weights for d/dr and d²/dr² at interior shells and
  // one-sided weights at the outer shell. Row i holds the weights for the
  // stencil starting at radial_first(i).
  std::size_t radial_first(std::size_t i) const { return first_[i]; }
  int radial_width(std::size_t i) const { return static_cast<int>(d1_[i].size()); }
  const std::vector<double>& radial_d1(std::size_t i) const { return d1_[i]; }
  const std::vector<double>& radial_d2(std::size_t i) const { return d2_[i]; }

  struct Tap {
    std::size_t node;
    double weight;
  };
  /// Piecewise (tri)linear interpolation taps in (r, θ, φ). Points inside the
  /// first shell blend with the center, points above the first row or below the
  /// last row blend with the ring mean standing in for the pole.
  std::vector<Tap> interpolation_taps(const Vec3& x) const;

 private:
  std::vector<std::size_t> first_;
  std::vector<std::vector<double>> d1_, d2_;
};

using SpaceGridPtr = std::shared_ptr<const SpaceGrid>;

SpaceGridPtr make_space_grid(RadialGrid r, SphereGrid s);

}  // namespace hmfx
