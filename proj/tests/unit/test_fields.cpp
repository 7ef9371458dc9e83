#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "hmfx/error.hpp"
#include "hmfx/field.hpp"
#include "hmfx/numerics.hpp"
#include "hmfx/weighted.hpp"

using namespace hmfx;

namespace {

SpaceGridPtr small_grid(double spacing = 0.1, int nt = 16, int np = 32, double r_max = 6.0) {
  return make_space_grid(RadialGrid::graded(spacing, 0.2, r_max), SphereGrid(nt, np));
}

// Oracle: relative error of the discrete Δ_f at the node nearest to r = target.
double radial_error(const MapField& lap, const std::function<double(double)>& exact,
                    double target) {
  const SpaceGrid& g = lap.grid();
  std::size_t best = 1;
  for (std::size_t i = 1; i + 1 < g.radial.size(); ++i)
    if (std::abs(g.radial[i] - target) < std::abs(g.radial[best] - target)) best = i;
  double worst = 0;
  for (int j = 0; j < g.sphere.n_theta(); ++j)
    for (int k = 0; k < g.sphere.n_phi(); ++k) {
      const double e = exact(g.radial[best]);
      worst = std::max(worst, std::abs(lap.at(best, j, k)[0] - e) / std::abs(e));
    }
  return worst;
}

}  // namespace

TEST_SUITE("fields") {

TEST_CASE("radial grid invariants and refinement") {
  const auto g = RadialGrid::graded(0.05, 0.5, 30.0);
  CHECK(g[0] == 0.0);
  CHECK(g.r_max() == 30.0);
  for (std::size_t i = 2; i < g.size(); ++i) {
    const double ratio = (g[i] - g[i - 1]) / (g[i - 1] - g[i - 2]);
    CHECK(ratio >= 1.0 - 1e-9);
    CHECK(ratio <= 1.2 + 1e-9);
  }
  const auto fine = g.refined();
  CHECK(fine.size() == 2 * g.last() + 1);
  CHECK_THROWS_AS(RadialGrid::graded(0.5, 1.0, 30.0), Error);
  CHECK_THROWS_AS(RadialGrid::from_nodes({0.0, 0.1, 0.2, 0.5, 0.6}), Error);
}

TEST_CASE("sphere weights sum to 4 pi") {
  SphereGrid s(24, 48);
  double total = 0;
  for (int j = 0; j < s.n_theta(); ++j) total += s.weight(j) * s.n_phi();
  CHECK(total == doctest::Approx(4 * std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("weighted Laplacian reproduces the potential") {
  auto grid = small_grid();
  auto f = MapField::sample(grid, 1, [](const Vec3& x, double* out) { *out = potential(x.norm(), 3); });
  const auto lap = weighted_laplacian(f);
  CHECK(radial_error(lap, [](double r) { return potential(r, 3); }, 2.0) < 1e-3);
  const double center = lap.at(0, 0, 0)[0];
  CHECK(center == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("weighted Laplacian of r^-2 converges at second order") {
  // Δ_f r^{-2i} = 2i(2i+2-n) r^{-2i-2} - i r^{-2i}; here i = 1, n = 3.
  const auto exact = [](double r) { return 2.0 * std::pow(r, -4) - std::pow(r, -2); };
  std::vector<double> hs, errs;
  for (double h : {0.1, 0.05, 0.025}) {
    auto grid = small_grid(h, 8, 16);
    auto f = MapField::sample(grid, 1, [](const Vec3& x, double* out) {
      const double r = x.norm();
      *out = r > 0 ? 1.0 / (r * r) : 0.0;
    });
    const auto lap = weighted_laplacian(f);
    hs.push_back(h);
    errs.push_back(radial_error(lap, exact, 1.0));
  }
  CHECK(errs[0] < 1e-2);
  CHECK(loglog_slope(hs, errs) >= 1.8);
}

TEST_CASE("gradient is exact on linear fields and degree-one angular data") {
  auto grid = small_grid();
  auto lin = MapField::sample(grid, 1, [](const Vec3& x, double* out) { *out = x.x(); });
  const auto g = gradient(lin);
  double worst = 0;
  for (std::size_t node = 0; node < grid->node_count(); ++node) {
    const double* j = g.jacobian(node);
    worst = std::max({worst, std::abs(j[0] - 1), std::abs(j[1]), std::abs(j[2])});
  }
  CHECK(worst < 1e-10);

  auto quad = MapField::sample(grid, 1, [](const Vec3& x, double* out) { *out = x.squaredNorm(); });
  const auto gq = gradient(quad);
  double qerr = 0;
  for (std::size_t i = 1; i < grid->radial.size(); ++i)
    for (int jj = 0; jj < grid->sphere.n_theta(); ++jj) {
      const Vec3 x = grid->position(i, jj, 3);
      const double* jac = gq.jacobian(grid->node(i, jj, 3));
      qerr = std::max(qerr, (Vec3(jac[0], jac[1], jac[2]) - 2 * x).norm());
    }
  CHECK(qerr < 1e-8);

  // Equator map (ω, 0): |∇u|² = 2 / r².
  auto eq = MapField::sample(grid, 4, [](const Vec3& x, double* out) {
    const double r = x.norm();
    for (int c = 0; c < 3; ++c) out[c] = r > 0 ? x[c] / r : 0.0;
    out[3] = 0;
  });
  const auto ge = gradient(eq);
  double eerr = 0;
  // The map is discontinuous at 0, so shell 1 (whose radial stencil touches
  // the center) is excluded.
  for (std::size_t i = 2; i < grid->radial.size(); ++i) {
    const double* jac = ge.jacobian(grid->node(i, 5, 7));
    double sq = 0;
    for (int c = 0; c < 12; ++c) sq += jac[c] * jac[c];
    const double r = grid->radial[i];
    eerr = std::max(eerr, std::abs(sq * r * r - 2));
  }
  CHECK(eerr < 1e-10);
}

TEST_CASE("ball quadrature") {
  auto grid = small_grid();
  auto one = MapField::sample(grid, 1, [](const Vec3&, double* out) { *out = 1; });
  CHECK(quadrature_ball(one, Vec3(0.5, 0.3, -1), 1.5) == doctest::Approx(1).epsilon(1e-12));
  // Average of |x|² over B(c, ρ) is |c|² + 3ρ²/5.
  auto sq = MapField::sample(grid, 1, [](const Vec3& x, double* out) { *out = x.squaredNorm(); });
  const Vec3 c(1, 1, 0);
  CHECK(quadrature_ball(sq, c, 1.0) == doctest::Approx(2.6).epsilon(2e-2));
  CHECK_THROWS_AS(quadrature_ball(one, Vec3(5, 0, 0), 2.0), Error);
}

TEST_CASE("weighted sup norm") {
  auto grid = small_grid();
  auto v = MapField::sample(grid, 2, [](const Vec3& x, double* out) {
    const double r = x.norm();
    out[0] = 0.6 / ((1 + r) * (1 + r));
    out[1] = 0.8 / ((1 + r) * (1 + r));
  });
  CHECK(weighted_sup_norm(v, 2) == doctest::Approx(1.0).epsilon(1e-12));
  v.at(3, 2, 1)[0] = NAN;
  CHECK_THROWS_AS(weighted_sup_norm(v, 2), Error);
}

TEST_CASE("field serialization round trip is bitwise") {
  auto grid = small_grid(0.2, 8, 16, 4.0);
  auto f = MapField::sample(grid, 3, [](const Vec3& x, double* out) {
    out[0] = std::sin(x.x());
    out[1] = 1.0 / 3.0 + x.y();
    out[2] = std::exp(-x.squaredNorm());
  });
  const auto dir = std::filesystem::temp_directory_path() / "hmfx_field_rt";
  write_field(f, dir / "f.csv", dir / "f.json");
  const auto g = read_field(dir / "f.csv", dir / "f.json");
  CHECK(g.data() == f.data());
  CHECK(g.grid().radial.nodes() == f.grid().radial.nodes());
  std::filesystem::remove_all(dir);
}

}
