#include <doctest.h>

#include <cmath>
#include <vector>

#include "hmfx/caloric.hpp"
#include "hmfx/corotational.hpp"
#include "hmfx/error.hpp"
#include "hmfx/fixedpoint.hpp"
#include "hmfx/weighted.hpp"

using namespace hmfx;

namespace {

SpaceGridPtr small_grid(double spacing = 0.2, int nt = 13, int np = 24) {
  return make_space_grid(RadialGrid::graded(spacing, 0.25, 20.0), SphereGrid(nt, np));
}

MapField constant_field(const SpaceGridPtr& g) {
  return MapField::sample(g, 3, [](const Vec3&, double* o) { o[0] = 0, o[1] = 0, o[2] = 1; });
}

double sup_abs(const MapField& f) {
  double s = 0;
  for (double v : f.data()) s = std::max(s, std::abs(v));
  return s;
}

// Signed angle of (ρ ω, a) relative to the axial direction.
double extract_angle(const double* u, const Vec3& w) {
  const double rad = u[0] * w.x() + u[1] * w.y() + u[2] * w.z();
  return std::atan2(rad, u[3]);
}

}  // namespace

TEST_SUITE("fixedpoint") {
  TEST_CASE("constant data is an exact fixed point") {
    const auto g = small_grid();
    const auto u0 = constant_field(g);
    const MapField zero(g, 3);
    CHECK(sup_abs(assemble_Q(u0, zero, 10.0)) == 0.0);
    const DirichletSolver solver(u0, 10.0, 0);
    const PicardOptions opt;
    CHECK(sup_abs(fixed_point_map(solver, u0, zero, 10.0, opt)) == 0.0);
    const auto st = picard_iterate(FixedPointState(1.0, 10.0, u0), opt);
    CHECK(st.converged);
    CHECK(st.ledger.size() == 1);
    CHECK(st.v_norm == 0.0);
    CHECK(x_norm(zero) == 0.0);
  }

  TEST_CASE("near-origin data is rejected") {
    const auto g = small_grid();
    const auto u0 = constant_field(g);
    MapField v(g, 3);
    for (std::size_t q = 0; q < v.node_count(); ++q) v.node_values(q)[2] = -1.0;
    CHECK_THROWS_AS(assemble_Q(u0, v, 1.0), Error);
  }

  TEST_CASE("operator pieces") {
    const auto g = small_grid();
    const auto u0 = corotational_caloric_field(g, 0.3);
    const DirichletSolver plain(u0, 0.0, 0), pen(u0, 10.0, 0);
    Eigen::VectorXd r = Eigen::VectorXd::Random(static_cast<Eigen::Index>(plain.size())), z, y, y0;
    plain.precondition(r, z);
    plain.apply(z, y, Exec::Serial);
    CHECK((y - r).norm() / r.norm() < 1e-10);
    // The penalty part is negative semidefinite node by node.
    pen.apply(r, y, Exec::Serial);
    plain.apply(r, y0, Exec::Serial);
    const Eigen::VectorXd d = y - y0;
    for (Eigen::Index q = 0; q < d.size(); q += 4) CHECK(d.segment(q, 4).dot(r.segment(q, 4)) <= 1e-12);
    // Serial and threaded applies agree.
    Eigen::VectorXd yp;
    pen.apply(r, yp, Exec::OpenMP);
    CHECK((yp - y).norm() == 0.0);

    const MapField q0(g, 4);
    CHECK(sup_abs(solve_linear_dirichlet(q0, u0, 10.0, 0)) == 0.0);
  }

  TEST_CASE("manufactured solution converges at second order") {
    // W* = (e, x e, 0, z e) with e = exp(-r²/8); Δ_f of each is (-3/4 - r²/16) times itself.
    std::vector<double> errors;
    for (double h : {0.2, 0.1}) {
      const int nt = h > 0.15 ? 13 : 25, np = h > 0.15 ? 24 : 48;
      const auto g = small_grid(h, nt, np);
      const auto u0 = corotational_caloric_field(g, 0.3);
      const double K = 5.0;
      const Cutoff chi;
      const auto exact = MapField::sample(g, 4, [](const Vec3& x, double* o) {
        const double e = std::exp(-x.squaredNorm() / 8);
        o[0] = e, o[1] = x.x() * e, o[2] = 0, o[3] = x.z() * e;
      });
      MapField q(g, 4);
      for (std::size_t node = 0; node < q.node_count(); ++node) {
        const std::size_t i = node / g->sphere.size();
        const double r = g->radial[i];
        const double* w = exact.node_values(node);
        const double* u = u0.node_values(node);
        double nu = 0, p = 0;
        for (int c = 0; c < 4; ++c) nu += u[c] * u[c];
        nu = std::sqrt(nu);
        for (int c = 0; c < 4; ++c) p += u[c] * w[c] / nu;
        const double cc = K * chi.derivative((nu - 1) * (nu - 1));
        for (int c = 0; c < 4; ++c) q.node_values(node)[c] = (-0.75 - r * r / 16) * w[c] - cc * p * u[c] / nu;
      }
      LinearSolveReport rep;
      const auto w = solve_linear_dirichlet(q, u0, K, 0, {}, &rep);
      CHECK(rep.relative_residual <= 1e-9);
      errors.push_back(sup_abs(w - exact));
    }
    CHECK(errors[1] < 1e-2);
    CHECK(errors[0] / errors[1] > 3.0);
  }

  TEST_CASE("barrier ratio stays bounded") {
    const auto g = small_grid();
    const auto u0 = corotational_caloric_field(g, 0.3);
    const DirichletSolver solver(u0, 10.0, 0);
    for (unsigned seed = 1; seed <= 5; ++seed) {
      const auto q = random_decaying_field(g, 4, seed);
      const auto w = solver.solve(q);
      const double ratio = barrier_ratio(w, x_norm(q));
      CHECK(ratio > 0);
      CHECK(ratio < 10);
    }
  }

  TEST_CASE("Picard on near-constant corotational data") {
    const auto g = small_grid();
    const double K = 10.0;
    const auto u0 = corotational_caloric_field(g, 0.05);
    const auto st = picard_iterate(FixedPointState(0.9, K, u0));
    REQUIRE(st.converged);
    for (std::size_t j = 1; j < st.ledger.size(); ++j) CHECK(st.ledger[j].ratio < 1);
    const MapField u = st.u0 + st.v;
    CHECK(static_residual(u, K) <= 1e-5 * K);

    const auto gl = solve_gl_corot(3, K, std::sin(0.05), std::cos(0.05), 20.0);
    double diff = 0;
    for (std::size_t i = 1; i < g->radial.size(); ++i) {
      const double r = g->radial[i];
      const std::size_t k = gl.grid.interval(r);
      const double t = (r - gl.grid[k]) / (gl.grid[k + 1] - gl.grid[k]);
      const double ref = (1 - t) * gl.angle(k) + t * gl.angle(k + 1);
      for (int j = 0; j < g->sphere.n_theta(); j += 3)
        diff = std::max(diff, std::abs(extract_angle(u.at(i, j, 0), g->sphere.direction(j, 0)) - ref));
    }
    CHECK(diff < 5e-2);

    const auto decay = verify_decay(st.v, 4, 10);
    CHECK(std::isfinite(decay.sup_fv));
    CHECK(decay.v_slope <= -1.8);

    // Refinement: the fixed point moves little between meshes (includes trilinear
    // interpolation error from the fine mesh).
    const auto gf = small_grid(0.1, 25, 48);
    const auto sf = picard_iterate(FixedPointState(0.9, K, corotational_caloric_field(gf, 0.05)));
    double dv = 0;
    std::vector<double> a(4);
    for (std::size_t node = 0; node < st.v.node_count(); node += 7) {
      const std::size_t i = node / g->sphere.size();
      const int j = static_cast<int>((node % g->sphere.size()) / 24), k = static_cast<int>(node % 24);
      sf.v.interpolate(g->position(i, j, k), a.data());
      for (int c = 0; c < 4; ++c) dv = std::max(dv, std::abs(a[c] - st.v.node_values(node)[c]));
    }
    CHECK(dv < 0.1 * sup_abs(st.v));
  }

  TEST_CASE("Q shape and contraction") {
    const auto g = small_grid();
    const double K = 10.0;
    std::vector<double> c0;
    for (double h : {0.25, 0.1, 0.025}) {
      const auto u0 = corotational_caloric_field(g, h);
      c0.push_back(x_norm(assemble_Q(u0, MapField(g, 4), K)));
    }
    CHECK(c0[0] > c0[1]);
    CHECK(c0[1] > c0[2]);

    const auto u0 = corotational_caloric_field(g, 0.05);
    const auto dir = random_decaying_field(g, 4, 7);
    std::vector<double> t;
    for (int s = 1; s <= 10; ++s) t.push_back(0.1 * s);
    const auto fit = q_shape(u0, dir, K, t);
    CHECK(fit.r_squared >= 0.95);

    const DirichletSolver solver(u0, K, 0);
    const PicardOptions opt;
    const auto s1 = contraction_sample(solver, u0, K, 0.05, 3, 11, opt);
    const auto s2 = contraction_sample(solver, u0, K, 0.1, 3, 11, opt);
    CHECK(s1.map_ratio < 1);
    CHECK(s2.map_ratio < 1);
  }

  TEST_CASE("decay reporter") {
    const auto g = small_grid();
    const MapField zero(g, 3);
    const auto z = verify_decay(zero, 4, 18);
    CHECK(z.sup_fv == 0.0);
    CHECK(z.sup_f32_grad == 0.0);
    const auto v = MapField::sample(g, 1, [](const Vec3& x, double* o) { o[0] = 1 / (1 + x.squaredNorm()); });
    const auto rep = verify_decay(v, 4, 18);
    CHECK(rep.sup_fv == doctest::Approx(1.5).epsilon(0.01));
    CHECK(rep.v_slope == doctest::Approx(-2.0).epsilon(0.05));
  }
}
