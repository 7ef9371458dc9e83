#include <doctest.h>

#include <cmath>
#include <vector>

#include "hmfx/error.hpp"
#include "hmfx/target.hpp"

using namespace hmfx;

TEST_SUITE("target") {

TEST_CASE("cutoff shape") {
  const Cutoff chi(0.25);
  const double d2 = 0.0625;
  CHECK(chi.value(0.5 * d2) == doctest::Approx(0.5 * d2));
  CHECK(chi.derivative(0.5 * d2) == 1.0);
  CHECK(chi.value(4 * d2) == doctest::Approx(2 * d2));
  CHECK(chi.value(10.0) == doctest::Approx(2 * d2));
  double prev = -1;
  for (int i = 0; i <= 2000; ++i) {
    const double s = 5 * d2 * i / 2000.0;
    const double v = chi.value(s), dv = chi.derivative(s);
    CHECK(v >= prev - 1e-15);
    CHECK(dv >= -1e-12);
    CHECK(dv <= 1.5);
    prev = v;
  }
  // C² matching at both knots, checked against one-sided differences.
  for (double s : {chi.left(), chi.right()}) {
    const double h = 1e-6;
    CHECK(std::abs(chi.value(s + h) - chi.value(s - h) - 2 * h * chi.derivative(s)) < 1e-10);
    CHECK(std::abs(chi.derivative(s + h) - chi.derivative(s - h)) < 1e-4);
  }
  // The knot the spec's layout suggests admits no monotone quintic.
  CHECK_THROWS_AS(Cutoff(0.25, 4.0), Error);
}

TEST_CASE("distance gradient and forces") {
  TargetSphere s(3);
  std::vector<double> out(3);
  s.dist_sq_gradient(std::vector<double>{2, 0, 0}, out);
  CHECK(out[0] == doctest::Approx(2.0));  // ∇d² = 2 (|u|-1) u/|u|
  CHECK(out[1] == 0.0);
  sphere::dist_sq_half_gradient(std::vector<double>{2, 0, 0}.data(), 3, out.data());
  CHECK(out[0] == doctest::Approx(1.0));

  // d(u) >= 2δ puts u on the χ plateau.
  s.cs_force(std::vector<double>{1.6, 0, 0}, 10, 1, out);
  CHECK(out[0] == 0.0);
  // Small d: χ' = 1, force = (K/t) (|u|-1) u/|u|.
  s.cs_force(std::vector<double>{0, 0, 1.1}, 10, 2, out);
  CHECK(out[2] == doctest::Approx(5 * 0.1));
  s.gl_force(std::vector<double>{0, 0, 1.1}, 10, 2, out);
  CHECK(out[2] == doctest::Approx(5 * (1 - 1.21) * 1.1));
  CHECK_THROWS_AS(s.gl_force(std::vector<double>{0, 0, 1}, 1, 0, out), Error);
  CHECK_THROWS_AS(s.dist_sq_gradient(std::vector<double>{0, 0, 0}, out), Error);
}

TEST_CASE("second fundamental form") {
  TargetSphere s(3);
  std::vector<double> out(3);
  s.second_fundamental_form(std::vector<double>{0, 0, 1}, std::vector<double>{1, 0, 0},
                            std::vector<double>{1, 0, 0}, out);
  CHECK(out[2] == doctest::Approx(-1.0));
  CHECK(out[0] == 0.0);
  CHECK_THROWS_AS(s.second_fundamental_form(std::vector<double>{0, 0, 1},
                                            std::vector<double>{0, 0, 1},
                                            std::vector<double>{1, 0, 0}, out),
                  Error);
}

}
