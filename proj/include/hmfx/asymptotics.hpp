#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "hmfx/field.hpp"
#include "hmfx/profile.hpp"
#include "hmfx/series.hpp"

namespace hmfx {

struct FitWindow {
  double lo = 5;
  double hi = 50;
};

/// Least-squares fit of U(r, ω) - u_0(ω) against {r⁻², ..., r^{-2k}}.
struct FarFieldFit {
  AsymptoticSeries series;     // u_0 as supplied, u_1..u_k fitted
  double condition = 0;        // of the scaled basis matrix
  double residual_rms = 0;     // over all window samples
  double residual_slope = 0;   // d log(rms on [a_j, hi]) / d log a_j over a start ladder
  std::vector<double> ladder_starts, ladder_rms;
};

/// Corotational fit of the pair (sin h, cos h) around (sin h∞, cos h∞); the
/// series holds one node with m = 2.
FarFieldFit farfield_fit(const CorotationalProfile& profile, int order, FitWindow window);
/// Per-node fit on the sphere nodes of a full-grid field.
FarFieldFit farfield_fit(const MapField& field, const SphereMap& u0, int order, FitWindow window);

/// Component of a corotational coefficient along the tangent (cos h∞, -sin h∞).
double tangential_coefficient(const SphereMap& coefficient, double h_inf);

enum class RateClass { Lipschitz, Smooth, SuperPolynomial, Unclassified };
std::string to_string(RateClass c);

struct RateReport {
  RateClass rate = RateClass::Unclassified;
  double slope = 0;          // log-log slope of the deviation on the window
  double max_deviation = 0;
  std::string diagnostics;
};

/// Classifies |U - u_0| sampled at radii: below 1e-10 everywhere is
/// super-polynomial; slope within 0.3 of -1 is Lipschitz; slope <= -1.7 is smooth.
RateReport rate_classify(const std::vector<double>& radii, const std::vector<double>& deviation);
RateReport rate_classify(const CorotationalProfile& profile, FitWindow window);
RateReport rate_classify(const MapField& field, const SphereMap& u0, FitWindow window);

/// Residual of the static equation evaluated on a truncated corotational
/// series, with exact radial derivatives: the sup over both components.
double series_residual(const CorotSeries& series, int n, Flow flow, double K, double r);

void write_series(const AsymptoticSeries& s, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path);

}  // namespace hmfx
