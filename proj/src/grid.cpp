#include "hmfx/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hmfx/error.hpp"
#include "hmfx/numerics.hpp"

namespace hmfx {

namespace {
constexpr double kMaxSpacingRatio = 1.2;
}

namespace {

double graded_s_max(double stretch, double r_max) {
  if (r_max > 1.0 && stretch > 0.0) return 1.0 + std::log1p(stretch * (r_max - 1.0)) / stretch;
  return r_max;
}

}  // namespace

RadialGrid RadialGrid::graded(double spacing, double stretch, double r_max) {
  if (!(spacing > 0) || !(stretch >= 0) || !(r_max > 0))
    fail(ErrorKind::Grid, "radial grid: spacing, stretch and r_max must be positive");
  const double s_max = graded_s_max(stretch, r_max);
  const auto n = static_cast<std::size_t>(std::ceil(s_max / spacing - 1e-9));
  RadialGrid grid = graded_intervals(stretch, r_max, n);
  return grid;
}

RadialGrid RadialGrid::graded_intervals(double stretch, double r_max, std::size_t n) {
  if (n < 4) fail(ErrorKind::Grid, "radial grid: fewer than four intervals");
  const double s_max = graded_s_max(stretch, r_max);
  const double h = s_max / static_cast<double>(n);
  if (std::exp(stretch * h) > kMaxSpacingRatio + 1e-12) {
    std::ostringstream os;
    os << "radial grid: spacing ratio " << std::exp(stretch * h) << " exceeds "
       << kMaxSpacingRatio;
    fail(ErrorKind::Grid, os.str());
  }
  const auto map = [stretch](double s) {
    if (s <= 1.0 || stretch == 0.0) return s;
    return 1.0 + std::expm1(stretch * (s - 1.0)) / stretch;
  };
  std::vector<double> r(n + 1);
  for (std::size_t i = 0; i <= n; ++i) r[i] = map(h * static_cast<double>(i));
  r[0] = 0.0;
  r[n] = r_max;
  RadialGrid grid(std::move(r));
  grid.spacing_ = h;
  grid.stretch_ = stretch;
  grid.validate();
  return grid;
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes) {
  RadialGrid grid(std::move(nodes));
  grid.validate();
  return grid;
}

void RadialGrid::validate() const {
  if (r_.size() < 5) fail(ErrorKind::Grid, "radial grid: need at least five nodes");
  if (r_[0] != 0.0) fail(ErrorKind::Grid, "radial grid: first node must be 0");
  for (std::size_t i = 1; i < r_.size(); ++i) {
    if (!(r_[i] > r_[i - 1])) fail(ErrorKind::Grid, "radial grid: nodes not strictly increasing");
    if (i >= 2) {
      const double ratio = (r_[i] - r_[i - 1]) / (r_[i - 1] - r_[i - 2]);
      if (ratio < 1.0 - 1e-9 || ratio > kMaxSpacingRatio + 1e-9) {
        std::ostringstream os;
        os << "radial grid: adjacent spacing ratio " << ratio << " at node " << i
           << " outside [1, " << kMaxSpacingRatio << "]";
        fail(ErrorKind::Grid, os.str());
      }
    }
  }
}

std::size_t RadialGrid::interval(double r) const {
  if (r < 0 || r > r_max() * (1 + 1e-12))
    fail(ErrorKind::DomainExceeded, "radius outside radial grid");
  auto it = std::upper_bound(r_.begin(), r_.end(), r);
  std::size_t i = it == r_.begin() ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
  return std::min(i, r_.size() - 2);
}

RadialGrid RadialGrid::refined() const {
  if (spacing_ <= 0) fail(ErrorKind::Grid, "radial grid: refinement needs a graded grid");
  RadialGrid fine = graded_intervals(stretch_, r_max(), 2 * last());
  fine.spacing_ = 0.5 * spacing_;
  return fine;
}

SphereGrid::SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
  if (n_theta < 2 || n_phi < 4 || n_phi % 2 != 0)
    fail(ErrorKind::Grid, "sphere grid: need n_theta >= 2 and even n_phi >= 4");
  const double pi = std::numbers::pi;
  dtheta_ = pi / n_theta;
  dphi_ = 2 * pi / n_phi;
  theta_.resize(n_theta);
  sin_theta_.resize(n_theta);
  cos_theta_.resize(n_theta);
  weight_.resize(n_theta);
  lap_north_.resize(n_theta);
  lap_south_.resize(n_theta);
  lap_azimuthal_.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) {
    theta_[j] = (j + 0.5) * dtheta_;
    sin_theta_[j] = std::sin(theta_[j]);
    cos_theta_[j] = std::cos(theta_[j]);
    weight_[j] = (std::cos(j * dtheta_) - std::cos((j + 1) * dtheta_)) * dphi_;
    const double d = 2 * std::sin(0.5 * dtheta_) * std::sin(dtheta_) * sin_theta_[j];
    lap_north_[j] = j == 0 ? 0.0 : std::sin(j * dtheta_) / d;
    lap_south_[j] = j == n_theta - 1 ? 0.0 : std::sin((j + 1) * dtheta_) / d;
    lap_azimuthal_[j] = 1.0 / (2 * (1 - std::cos(dphi_)) * sin_theta_[j] * sin_theta_[j]);
  }
  phi_.resize(n_phi);
  sin_phi_.resize(n_phi);
  cos_phi_.resize(n_phi);
  for (int k = 0; k < n_phi; ++k) {
    phi_[k] = k * dphi_;
    sin_phi_[k] = std::sin(phi_[k]);
    cos_phi_[k] = std::cos(phi_[k]);
  }
  Eigen::Matrix3d moment = Eigen::Matrix3d::Zero();
  for (int j = 0; j < n_theta; ++j)
    for (int k = 0; k < n_phi; ++k) {
      const Vec3 w = direction(j, k);
      moment += weight_[j] * w * w.transpose();
    }
  moment_inverse_ = moment.inverse();
}

Vec3 SphereGrid::direction(int j, int k) const {
  return {sin_theta_[j] * cos_phi_[k], sin_theta_[j] * sin_phi_[k], cos_theta_[j]};
}

SpaceGrid::SpaceGrid(RadialGrid r, SphereGrid s) : radial(std::move(r)), sphere(std::move(s)) {
  const std::size_t n = radial.size();
  first_.assign(n, 0);
  d1_.assign(n, {});
  d2_.assign(n, {});
  const auto& nodes = radial.nodes();
  for (std::size_t i = 1; i < n; ++i) {
    const bool outer = i == n - 1;
    const std::size_t first = outer ? i - 3 : i - 1;
    const std::size_t width = outer ? 4 : 3;
    const auto w = fornberg_weights(nodes[i], std::span<const double>(&nodes[first], width), 2);
    first_[i] = first;
    d1_[i] = w[1];
    d2_[i] = w[2];
  }
}

std::vector<SpaceGrid::Tap> SpaceGrid::interpolation_taps(const Vec3& x) const {
  std::vector<Tap> taps;
  const double r = x.norm();
  if (r > radial.r_max() * (1 + 1e-12))
    fail(ErrorKind::DomainExceeded, "interpolation point outside the grid");
  if (r == 0.0) {
    taps.push_back({node(0, 0, 0), 1.0});
    return taps;
  }
  const double theta = std::acos(std::clamp(x.z() / r, -1.0, 1.0));
  double phi = std::atan2(x.y(), x.x());
  if (phi < 0) phi += 2 * std::numbers::pi;

  const int nt = sphere.n_theta(), np = sphere.n_phi();
  const double u = phi / sphere.dphi();
  int k0 = static_cast<int>(std::floor(u));
  const double a = u - k0;
  k0 = sphere.wrap(k0);
  const int k1 = sphere.wrap(k0 + 1);

  const auto add_angular = [&](std::size_t i, double scale) {
    if (i == 0) {
      taps.push_back({node(0, 0, 0), scale});
      return;
    }
    const double v = (theta - sphere.theta(0)) / sphere.dtheta();
    const auto ring = [&](int j, double wgt) {
      taps.push_back({node(i, j, k0), wgt * (1 - a)});
      taps.push_back({node(i, j, k1), wgt * a});
    };
    const auto ring_mean = [&](int j, double wgt) {
      for (int k = 0; k < np; ++k) taps.push_back({node(i, j, k), wgt / np});
    };
    if (v < 0) {
      const double b = theta / sphere.theta(0);
      ring(0, scale * b);
      ring_mean(0, scale * (1 - b));
    } else if (v > nt - 1) {
      const double b = (std::numbers::pi - theta) / (std::numbers::pi - sphere.theta(nt - 1));
      ring(nt - 1, scale * b);
      ring_mean(nt - 1, scale * (1 - b));
    } else {
      int j0 = std::min(static_cast<int>(std::floor(v)), nt - 2);
      const double b = v - j0;
      ring(j0, scale * (1 - b));
      ring(j0 + 1, scale * b);
    }
  };

  const std::size_t i0 = radial.interval(r);
  const double c = (r - radial[i0]) / (radial[i0 + 1] - radial[i0]);
  add_angular(i0, 1 - c);
  add_angular(i0 + 1, c);
  return taps;
}

SpaceGridPtr make_space_grid(RadialGrid r, SphereGrid s) {
  return std::make_shared<const SpaceGrid>(std::move(r), std::move(s));
}

}  // namespace hmfx
