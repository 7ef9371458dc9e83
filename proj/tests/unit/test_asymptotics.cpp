#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "hmfx/asymptotics.hpp"
#include "hmfx/corotational.hpp"
#include "hmfx/error.hpp"
#include "hmfx/io.hpp"
#include "hmfx/numerics.hpp"

using namespace hmfx;

namespace {

// u0(ω) = (sin h ω, cos h) into S^3.
SphereMap corot_map(const LatLongCalculus& calc, double h) {
  return calc.sample(4, [h](const Vec3& w, double* o) {
    o[0] = std::sin(h) * w.x();
    o[1] = std::sin(h) * w.y();
    o[2] = std::sin(h) * w.z();
    o[3] = std::cos(h);
  });
}

// A non-equivariant smooth map S^2 -> S^2: normalized (x + 0.3 y z, y, z + 0.2 x²).
SphereMap bent_map(const LatLongCalculus& calc) {
  return calc.sample(3, [](const Vec3& w, double* o) {
    const Vec3 v(w.x() + 0.3 * w.y() * w.z(), w.y(), w.z() + 0.2 * w.x() * w.x());
    const Vec3 u = v.normalized();
    o[0] = u.x();
    o[1] = u.y();
    o[2] = u.z();
  });
}

double sup_diff(const SphereMap& a, const SphereMap& b) {
  double s = 0;
  for (std::size_t q = 0; q < a.values.size(); ++q) s = std::max(s, std::abs(a.values[q] - b.values[q]));
  return s;
}

}  // namespace

TEST_SUITE("asymptotics") {
  TEST_CASE("sphere Laplacian") {
    const SphereGrid g(16, 32);
    const LatLongCalculus calc(g);
    const auto c = calc.sample(2, [](const Vec3&, double* o) { o[0] = 0.3, o[1] = -1.0; });
    CHECK(sphere_laplacian(g, c).max_norm() < 1e-12);
    const auto z = calc.sample(1, [](const Vec3& w, double* o) { o[0] = w.z(); });
    const auto lz = sphere_laplacian(g, z);
    for (std::size_t q = 0; q < z.nodes; ++q) CHECK(lz.values[q] == doctest::Approx(-2 * z.values[q]).scale(1).epsilon(1e-10));
    CHECK_THROWS_AS(sphere_laplacian(SphereGrid(6, 12), SphereMap(72, 1)), Error);

    const CorotationalCalculus cc(5);
    SphereMap eq(1, 2);
    eq.values = {1.0, 0.0};
    const auto l = cc.laplacian(eq);
    CHECK(l.values[0] == -4.0);
    CHECK(l.values[1] == 0.0);
  }

  TEST_CASE("harmonic data annihilates the series") {
    const LatLongCalculus calc(SphereGrid(16, 32));
    const auto id = calc.sample(3, [](const Vec3& w, double* o) { o[0] = w.x(), o[1] = w.y(), o[2] = w.z(); });
    // On the grid each order multiplies round-off by about the norm of the
    // discrete Laplacian (about 1e4 next to the poles at 16 x 32).
    const auto s = hmf_coefficients(calc, id, 2);
    CHECK(s.u[1].max_norm() < 1e-10);
    CHECK(s.u[2].max_norm() < 1e-8);
    // Equator map into S^3.
    const auto eq = corot_map(calc, std::numbers::pi / 2);
    const auto e = hmf_coefficients(calc, eq, 2);
    CHECK(e.u[1].max_norm() < 1e-10);
    CHECK(e.u[2].max_norm() < 1e-8);
    const auto ce = corotational_series(6, std::numbers::pi / 2, 4, Flow::HarmonicMap);
    for (int i = 1; i <= 4; ++i) CHECK(std::abs(ce.alpha[i]) + std::abs(ce.beta[i]) < 1e-12);
  }

  TEST_CASE("first harmonic-map coefficient") {
    const LatLongCalculus calc(SphereGrid(24, 48));
    const auto u0 = bent_map(calc);
    const auto s = hmf_coefficients(calc, u0, 1);
    const auto lap = calc.laplacian(u0);
    const auto grad = calc.gradient_inner(u0, u0);
    SphereMap expect = lap;
    for (std::size_t q = 0; q < u0.nodes; ++q)
      for (int c = 0; c < 3; ++c) expect.at(q)[c] += grad[q] * u0.at(q)[c];
    CHECK(sup_diff(s.u[1], expect) < 1e-12);

    // ⟨u_1, u_0⟩ = 0: exact for degree-one data, O(mesh²) otherwise.
    const auto cs = hmf_coefficients(calc, corot_map(calc, 0.4), 1);
    const auto c0 = corot_map(calc, 0.4);
    for (std::size_t q = 0; q < c0.nodes; ++q) CHECK(std::abs(cs.u[1].dot(q, c0)) < 1e-8);
    double coarse = 0, fine = 0;
    for (std::size_t q = 0; q < u0.nodes; ++q) coarse = std::max(coarse, std::abs(s.u[1].dot(q, u0)));
    const LatLongCalculus calc2(SphereGrid(48, 96));
    const auto v0 = bent_map(calc2);
    const auto s2 = hmf_coefficients(calc2, v0, 1);
    for (std::size_t q = 0; q < v0.nodes; ++q) fine = std::max(fine, std::abs(s2.u[1].dot(q, v0)));
    CHECK(fine < coarse / 3);
  }

  TEST_CASE("corotational tangential coefficient") {
    for (int n = 3; n <= 6; ++n) {
      const double h = 0.1;
      const auto s = corotational_series(n, h, 1, Flow::HarmonicMap);
      SphereMap u1(1, 2);
      u1.values = {s.alpha[1], s.beta[1]};
      CHECK(tangential_coefficient(u1, h) == doctest::Approx(-(n - 1) / 2.0 * std::sin(2 * h)).epsilon(1e-12));
    }
    const auto s3 = corotational_series(3, 0.1, 1, Flow::HarmonicMap);
    SphereMap u1(1, 2);
    u1.values = {s3.alpha[1], s3.beta[1]};
    CHECK(tangential_coefficient(u1, 0.1) == doctest::Approx(-0.19867).epsilon(1e-4));
    // The same on the lat-long grid: u_1 = -2 sin h cos h (cos h ω, -sin h).
    const LatLongCalculus calc(SphereGrid(16, 32));
    const auto s = hmf_coefficients(calc, corot_map(calc, 0.1), 1);
    const Vec3 w = calc.grid().direction(5, 7);
    const double* v = s.u[1].at(5 * 32 + 7);
    const double t = v[0] * std::cos(0.1) * w.x() + v[1] * std::cos(0.1) * w.y() +
                     v[2] * std::cos(0.1) * w.z() - v[3] * std::sin(0.1);
    CHECK(t == doctest::Approx(-std::sin(0.2)).epsilon(1e-10));
  }

  TEST_CASE("Ginzburg-Landau coefficients") {
    const LatLongCalculus calc(SphereGrid(24, 48));
    const auto u0 = bent_map(calc);
    const auto gl = gl_coefficients(calc, u0, 1.0, 1);
    const auto lap = calc.laplacian(u0);
    SphereMap expect = lap;
    for (std::size_t q = 0; q < u0.nodes; ++q) {
      const double p = lap.dot(q, u0);
      for (int c = 0; c < 3; ++c) expect.at(q)[c] -= 2.0 / 3.0 * p * u0.at(q)[c];
    }
    CHECK(sup_diff(gl.u[1], expect) < 1e-12);

    const auto c = calc.sample(3, [](const Vec3&, double* o) { o[0] = 0, o[1] = 0, o[2] = 1; });
    CHECK(gl_coefficients(calc, c, 3.0, 2).u[1].max_norm() == 0.0);
    CHECK_THROWS_AS(gl_coefficients(calc, u0, 0.0, 1), Error);

    const auto hm = hmf_coefficients(calc, u0, 3);
    std::vector<double> prev(4, 1e300);
    for (double K : {10.0, 100.0, 1000.0}) {
      const auto g = gl_coefficients(calc, u0, K, 3);
      for (int i = 1; i <= 3; ++i) {
        const double d = sup_diff(g.u[i], hm.u[i]);
        CHECK(d < prev[i]);
        prev[i] = d;
      }
    }
    // Clean 1/K rate on degree-one data, where ⟨Δu0, u0⟩ = -|∇u0|² holds
    // discretely; generic data saturates at the O(mesh²) defect.
    const auto c0 = corot_map(calc, 0.3);
    const auto chm = hmf_coefficients(calc, c0, 1);
    std::vector<double> d1;
    for (double K : {10.0, 100.0, 1000.0}) d1.push_back(sup_diff(gl_coefficients(calc, c0, K, 1).u[1], chm.u[1]));
    for (std::size_t k = 1; k < d1.size(); ++k) {
      CHECK(d1[k - 1] / d1[k] > 5.0);
      CHECK(d1[k - 1] / d1[k] < 15.0);
    }
  }

  TEST_CASE("truncated series residual order") {
    std::vector<double> radii;
    for (double r = 5; r <= 30; r *= 1.1) radii.push_back(r);
    for (int k = 1; k <= 4; ++k)
      for (Flow flow : {Flow::HarmonicMap, Flow::GinzburgLandau}) {
        const double K = flow == Flow::HarmonicMap ? 0.0 : 10.0;
        const auto s = corotational_series(3, 0.3, k, flow, K);
        std::vector<double> res;
        for (double r : radii) res.push_back(series_residual(s, 3, flow, K, r));
        CHECK(loglog_slope(radii, res) <= -2 * k - 2 + 0.3);
      }
  }

  TEST_CASE("far-field fit") {
    CorotationalProfile syn{RadialGrid::graded(0.05, 0.2, 60.0)};
    syn.form = CorotationalProfile::Form::Modulus;
    syn.limit_angle = 0.4;
    for (std::size_t i = 0; i < syn.size(); ++i) {
      const double r = std::max(syn.grid[i], 1.0);
      syn.psi.push_back(std::sin(0.4) + 0.7 / (r * r));
      syn.phi.push_back(std::cos(0.4) - 0.2 / (r * r));
    }
    const auto f = farfield_fit(syn, 2, {5, 50});
    CHECK(f.series.u[1].values[0] == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(f.series.u[1].values[1] == doctest::Approx(-0.2).epsilon(1e-6));
    CHECK(f.residual_rms < 1e-13);
    CHECK_THROWS_AS(farfield_fit(syn, 2, {10, 50}), Error);

    const auto p = solve_corot(3, 0.1, 60.0);
    const auto g = farfield_fit(p, 2, {5, 50});
    CHECK(tangential_coefficient(g.series.u[1], 0.1) == doctest::Approx(-std::sin(0.2)).epsilon(0.02));
    CHECK(g.residual_slope <= -3.7);

    const auto eq = solve_corot(3, std::numbers::pi / 2, 60.0);
    const auto e = farfield_fit(eq, 3, {5, 50});
    for (int i = 1; i <= 3; ++i) CHECK(e.series.u[i].max_norm() < 1e-8);

    // Full-grid field u0 + c(ω)/r².
    auto grid = make_space_grid(RadialGrid::graded(0.5, 0.2, 60.0), SphereGrid(8, 16));
    const LatLongCalculus calc(grid->sphere);
    const auto u0 = calc.sample(2, [](const Vec3& w, double* o) { o[0] = w.z(), o[1] = std::sqrt(1 - w.z() * w.z()); });
    const auto field = MapField::sample(grid, 2, [](const Vec3& x, double* o) {
      const double r = x.norm(), z = r > 0 ? x.z() / r : 0;
      o[0] = z + x.x() / (r * r * r);
      o[1] = std::sqrt(1 - z * z);
    });
    const auto ff = farfield_fit(field, u0, 1, {5, 50});
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 16; ++k) {
        const std::size_t q = static_cast<std::size_t>(j) * 16 + k;
        CHECK(ff.series.u[1].at(q)[0] == doctest::Approx(calc.grid().direction(j, k).x()).scale(1).epsilon(1e-9));
      }
  }

  TEST_CASE("rate classification") {
    const auto eq = solve_corot(3, std::numbers::pi / 2, 40.0);
    CHECK(rate_classify(eq, {5, 35}).rate == RateClass::SuperPolynomial);
    const auto p = solve_corot(3, 0.1, 60.0);
    const auto rp = rate_classify(p, {5, 50});
    CHECK(rp.rate == RateClass::Smooth);
    CHECK(rp.slope == doctest::Approx(-2.0).epsilon(0.1));
    std::vector<double> r, d;
    for (double x = 5; x < 50; x *= 1.2) {
      r.push_back(x);
      d.push_back(0.3 / x);
    }
    CHECK(rate_classify(r, d).rate == RateClass::Lipschitz);
    for (std::size_t i = 0; i < r.size(); ++i) d[i] = 0.3 * std::pow(r[i], -0.4);
    CHECK(rate_classify(r, d).rate == RateClass::Unclassified);
  }

  TEST_CASE("series export") {
    const auto dir = std::filesystem::temp_directory_path() / "hmfx_series_test";
    std::filesystem::create_directories(dir);
    const LatLongCalculus calc(SphereGrid(8, 16));
    const auto s = gl_coefficients(calc, corot_map(calc, 0.3), 5.0, 2);
    write_series(s, dir / "s.csv", dir / "s.json");
    const auto j = read_json(dir / "s.json");
    CHECK(j["order"] == 2);
    CHECK(j["a_sup"].size() == 3);
    CHECK(read_numeric_csv(dir / "s.csv").rows.size() == 3 * 128);
    std::filesystem::remove_all(dir);
  }
}
