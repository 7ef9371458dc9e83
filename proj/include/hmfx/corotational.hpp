#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "hmfx/error.hpp"
#include "hmfx/profile.hpp"

namespace hmfx {

/// Seven-point finite-difference weights on a radial grid with parity ghosts:
/// the value at -r_k is ±(value at r_k) for odd/even profiles.
class RadialStencil {
 public:
  explicit RadialStencil(const RadialGrid& grid, int width = 7);

  struct Row {
    std::vector<int> ext;  // extended index; negative entries are ghosts at -r_{|e|}
    std::vector<double> d1, d2;
  };
  const Row& row(std::size_t i) const { return rows_[i]; }
  /// Parity +1 (even) or -1 (odd).
  double d1(std::size_t i, std::span<const double> v, int parity) const;
  double d2(std::size_t i, std::span<const double> v, int parity) const;

 private:
  std::vector<Row> rows_;
};

struct GridOptions {
  double spacing = 0.01;
  double stretch = 0.25;
};

/// Sup of h'' + ((n-1)/r + r/2) h' - (n-1) sin(2h)/(2r²) per node; node 0 is
/// reported as 0 (the regular expansion h = a r + O(r³) makes it vanish).
std::vector<double> hm_residual(const CorotationalProfile& profile);
/// Ginzburg-Landau residual pair (ψ equation, φ equation) per node.
std::vector<std::array<double, 2>> gl_residual(const CorotationalProfile& profile);
double interior_sup(std::span<const double> residual);

struct ShootingResult {
  double slope = 0;
  double limit_angle = 0;     // extrapolated h∞ from a tail fit in {1, r⁻², r⁻⁴}
  double boundary_angle = 0;  // h(R_max)
  CorotationalProfile profile;
};

/// Integrates the profile ODE from the series h = a r + c r³ near 0 with an
/// adaptive Runge-Kutta-Fehlberg 7(8) method, recording values at grid nodes.
ShootingResult shoot_hm(int n, double slope, const RadialGrid& grid);

struct CorotOptions {
  GridOptions grid;
  int far_field_order = 3;
  double tolerance = 1e-10;     // sup of interior residual after polishing
  double slope_max = 60;
  double scan_step = 0.05;
  bool allow_constant_branch = true;
  int max_newton = 60;
};

/// Smooth harmonic-map expander with limit angle h∞. Shooting brackets the
/// slope, Newton collocation on the grid polishes the profile against a
/// far-field boundary value from the asymptotic series.
CorotationalProfile solve_corot(int n, double h_inf, double r_max, const CorotOptions& opt = {});

enum class GlGuess { HarmonicMap, Ramp };

struct GlOptions {
  GridOptions grid;
  int far_field_order = 3;
  double tolerance = 1e-10;
  int max_newton = 60;
  GlGuess guess = GlGuess::HarmonicMap;
};

/// Ginzburg-Landau expander in modulus form with boundary (ψ∞, φ∞) on S^1.
CorotationalProfile solve_gl_corot(int n, double K, double psi_inf, double phi_inf, double r_max,
                                   const GlOptions& opt = {},
                                   const CorotationalProfile* warm_start = nullptr);

struct Rung {
  double sigma = 0;
  double K = 0;
  int newton_iterations = 0;
  double residual = 0;
  CorotationalProfile profile;
};

class ContinuationError : public Error {
 public:
  ContinuationError(const std::string& what, std::vector<Rung> done)
      : Error(ErrorKind::PartialResult, what), completed(std::move(done)) {}
  std::vector<Rung> completed;
};

/// Walks the K ladder at sigma_path.front(), then the homotopy path
/// h = (1 - σ) h∞ at the last K, warm-starting each rung from the previous one.
std::vector<Rung> continuation(int n, double h_inf, std::span<const double> k_ladder,
                               std::span<const double> sigma_path, double r_max,
                               const GlOptions& opt = {});

}  // namespace hmfx
