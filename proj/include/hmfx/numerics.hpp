#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hmfx {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Finite-difference weights (Fornberg) for derivatives 0..max_order at z
/// using the abscissae x. Result is indexed [order][point].
std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> x,
                                                  int max_order);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  std::vector<double> coefficients;
  double r_squared = 0.0;
  double condition = 0.0;
  double residual_rms = 0.0;
};

/// Least squares for columns evaluated as basis[j](x_i).
LinearFit least_squares(const std::vector<std::vector<double>>& columns,
                        std::span<const double> y);

/// C² quintic ramp: 0 for t <= 0, 1 for t >= 1.
double smoothstep5(double t);
double smoothstep5_derivative(double t);

}  // namespace hmfx
