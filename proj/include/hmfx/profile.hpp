#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "hmfx/grid.hpp"

namespace hmfx {

/// Radial profile of a corotational expander in R^n. The angle form stores h
/// with U = (sin h ω, cos h); the modulus form stores (ψ, φ) with
/// U = (ψ ω, φ), used when |U| may leave the sphere.
struct CorotationalProfile {
  enum class Form { Angle, Modulus };

  explicit CorotationalProfile(RadialGrid g) : grid(std::move(g)) {}

  RadialGrid grid;
  int n = 3;
  Form form = Form::Angle;
  std::vector<double> h;
  std::vector<double> psi, phi;

  double limit_angle = 0;  // boundary data angle h∞
  double K = 0;            // 0 for harmonic-map profiles
  double residual = 0;     // sup of the discrete interior residual
  int newton_iterations = 0;
  double slope = 0;        // h'(0) or ψ'(0)
  bool singular_center = false;

  std::size_t size() const { return grid.size(); }
  double angle(std::size_t i) const;
  double modulus(std::size_t i) const;
  double radial_component(std::size_t i) const;
  double axial_component(std::size_t i) const;
};

void write_profile(const CorotationalProfile& p, const std::filesystem::path& csv_path,
                   const std::filesystem::path& json_path);
CorotationalProfile read_profile(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& json_path);

}  // namespace hmfx
