// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "hmfx/asymptotics.hpp"
#include "hmfx/caloric.hpp"
#include "hmfx/corotational.hpp"
#include "hmfx/diagnostics.hpp"
#include "hmfx/error.hpp"
#include "hmfx/fixedpoint.hpp"
#include "hmfx/numerics.hpp"
#include "hmfx/series.hpp"
#include "hmfx/weighted.hpp"

using namespace hmfx;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!ok) detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const char* kReferences[] = {"corot_n3_h0.3", "corot_n4_h0.2", "gl_n3_K100_h0.1"};

CorotationalProfile reference(const std::string& name) {
  const auto dir = fs::path(HMFX_DATA_DIR) / "reference";
  return read_profile(dir / (name + ".csv"), dir / (name + ".json"));
}

PointN axis(int n, int a, double r) {
  PointN x = PointN::Zero(n);
  x[a % n] = r;
  return x;
}

double relative_sup(const MapField& lap, const std::function<double(double)>& exact,
                    double r_lo, double r_hi) {
  const SpaceGrid& g = lap.grid();
  double worst = 0;
  for (std::size_t i = 0; i + 1 < g.radial.size(); ++i) {
    const double r = g.radial[i];
    if (r < r_lo || r > r_hi) continue;
    for (int j = 0; j < g.sphere.n_theta(); ++j)
      for (int k = 0; k < g.sphere.n_phi(); ++k)
        worst = std::max(worst, std::abs(lap.at(i, j, k)[0] - exact(r)) / std::abs(exact(r)));
  }
  return worst;
}

// ---------------------------------------------------------------- 1

Outcome operator_identity() {
  Outcome o;
  auto grid = make_space_grid(RadialGrid::graded(0.2, 0.25, 20), SphereGrid(25, 48));
  const auto f = MapField::sample(grid, 1, [](const Vec3& x, double* v) { *v = potential(x.norm(), 3); });
  const double ef = relative_sup(weighted_laplacian(f, Exec::OpenMP), [](double r) { return potential(r, 3); },
                                 0, 20);
  o.require(ef < 1e-3, "Δ_f f = f");
  o.note("Δ_f f rel err " + fmt(ef));

  const auto exact3 = [](double r) { return 2.0 * std::pow(r, -4) - std::pow(r, -2); };
  std::vector<double> hs, errs;
  for (double h : {0.1, 0.05, 0.025}) {
    auto g = make_space_grid(RadialGrid::graded(h, 0.2, 6), SphereGrid(8, 16));
    const auto q = MapField::sample(g, 1, [](const Vec3& x, double* v) {
      const double r = x.norm();
      *v = r > 0 ? 1 / (r * r) : 0;
    });
    hs.push_back(h);
    errs.push_back(relative_sup(weighted_laplacian(q, Exec::OpenMP), exact3, 0.99, 1.01));
  }
  const double s3 = loglog_slope(hs, errs);
  o.require(errs.back() < 1e-3 && s3 >= 1.8, "Δ_f r^-2 on the 3D grid");
  o.note("r^-2 at r=1 err " + fmt(errs.back()) + " slope " + fmt(s3));

  double worst_slope = 1e9;
  for (int n = 3; n <= 6; ++n) {
    std::vector<double> e;
    for (double h : {0.02, 0.01, 0.005}) {
      const auto g = RadialGrid::graded(h, 0.2, 10);
      std::vector<double> v(g.size());
      for (std::size_t i = 1; i < g.size(); ++i) v[i] = std::pow(g[i], -2);
      const auto lap = weighted_laplacian_radial(g, v, n);
      double err = 0;
      for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        if (g[i] < 1.0) continue;
        const double r = g[i], ex = 2.0 * (4 - n) * std::pow(r, -4) - std::pow(r, -2);
        err = std::max(err, std::abs(lap[i] - ex));
      }
      e.push_back(err);
    }
    worst_slope = std::min(worst_slope, loglog_slope(std::vector<double>{0.02, 0.01, 0.005}, e));
  }
  o.require(worst_slope >= 1.8, "radial r^-2 slope for n = 3..6");
  o.note("radial slope min " + fmt(worst_slope));
  return o;
}

// ---------------------------------------------------------------- 2

Outcome exact_branches() {
  Outcome o;
  const double half_pi = std::numbers::pi / 2;
  double worst = 0;
  for (int n = 3; n <= 6; ++n) {
    worst = std::max(worst, solve_corot(n, half_pi, 40).residual);
    worst = std::max(worst, solve_corot(n, 0.0, 40).residual);
    worst = std::max(worst, solve_gl_corot(n, 10, 0, 1, 40).residual);
  }
  auto grid = make_space_grid(RadialGrid::graded(0.2, 0.25, 20), SphereGrid(13, 24));
  const auto u0 = MapField::sample(grid, 3, [](const Vec3&, double* v) { v[0] = 0, v[1] = 0, v[2] = 1; });
  const auto st = picard_iterate(FixedPointState(1.0, 10, u0));
  worst = std::max({worst, static_residual(u0 + st.v, 10), st.v_norm});
  o.require(worst <= 1e-10 && st.converged, "solver residuals");
  o.note("max solver residual " + fmt(worst));

  double coeff = 0;
  for (int n = 3; n <= 6; ++n) {
    const auto cs = corotational_series(n, half_pi, 4, Flow::HarmonicMap);
    for (int i = 1; i <= 4; ++i) coeff = std::max({coeff, std::abs(cs.alpha[i]), std::abs(cs.beta[i])});
    SphereMap eq(1, 2);
    eq.values = {1.0, 0.0};
    const auto s = hmf_coefficients(CorotationalCalculus(n), eq, 4);
    for (int i = 1; i <= 4; ++i) coeff = std::max(coeff, s.u[i].max_norm());
  }
  const LatLongCalculus ll(SphereGrid(16, 32));
  const auto c = ll.sample(3, [](const Vec3&, double* v) { v[0] = 0, v[1] = 0, v[2] = 1; });
  for (const auto& s : {hmf_coefficients(ll, c, 4), gl_coefficients(ll, c, 10, 4)})
    for (int i = 1; i <= 4; ++i) coeff = std::max(coeff, s.u[i].max_norm());
  o.require(coeff <= 1e-10, "u_1..u_4 vanish");
  o.note("max |u_i| " + fmt(coeff));
  return o;
}

// ---------------------------------------------------------------- 3

Outcome corotational_cross_check() {
  Outcome o;
  double worst_rel = 0, worst_slope = -1e9;
  for (int n = 3; n <= 6; ++n)
    for (double h : {0.05, 0.1, 0.2, 0.3}) {
      const auto p = solve_corot(n, h, 60);
      const auto fit = farfield_fit(p, 2, {5, 50});
      const double expect = -(n - 1) / 2.0 * std::sin(2 * h);
      worst_rel = std::max(worst_rel, std::abs(tangential_coefficient(fit.series.u[1], h) / expect - 1));
      worst_slope = std::max(worst_slope, fit.residual_slope);
    }
  o.require(worst_rel < 0.02, "first coefficient within 2%");
  o.require(worst_slope <= -3.7, "post-fit residual slope");
  o.note("max rel err " + fmt(worst_rel) + ", max slope " + fmt(worst_slope));
  return o;
}

// ---------------------------------------------------------------- 4

Outcome gl_consistency() {
  Outcome o;
  const double h = 0.1;
  std::vector<double> defect;
  std::vector<CorotationalProfile> ladder;
  for (double K : {1.0, 10.0, 100.0}) {
    ladder.push_back(solve_gl_corot(3, K, std::sin(h), std::cos(h), 40));
    double d = 0;
    for (std::size_t i = 0; i < ladder.back().size(); ++i)
      d = std::max(d, std::abs(ladder.back().modulus(i) - 1));
    defect.push_back(d);
  }
  const auto& last = ladder.back();
  o.require(defect[0] > defect[1] && defect[1] > defect[2], "modulus defect decreases");
  const auto hm = solve_corot(3, h, 40);
  double angle = 0;
  for (std::size_t i = 0; i < last.size(); ++i) angle = std::max(angle, std::abs(last.angle(i) - hm.h[i]));
  o.require(angle < 5e-2, "angle of U_100");
  o.note("defects " + fmt(defect[0]) + "/" + fmt(defect[1]) + "/" + fmt(defect[2]) + ", angle diff " +
         fmt(angle));

  // u_1 = Δu0 - 2K/(2K+1) ⟨Δu0, u0⟩ u0, from the calculus Laplacian directly.
  const LatLongCalculus calc(SphereGrid(24, 48));
  const auto u0 = calc.sample(3, [](const Vec3& w, double* v) {
    const Vec3 b = Vec3(w.x() + 0.3 * w.y() * w.z(), w.y(), w.z() + 0.2 * w.x() * w.x()).normalized();
    v[0] = b.x(), v[1] = b.y(), v[2] = b.z();
  });
  const auto gl1 = gl_coefficients(calc, u0, 1.0, 1).u[1];
  const auto lap = calc.laplacian(u0);
  double closed = 0;
  for (std::size_t q = 0; q < u0.nodes; ++q) {
    const double p = lap.dot(q, u0);
    for (int c = 0; c < 3; ++c)
      closed = std::max(closed, std::abs(gl1.at(q)[c] - (lap.at(q)[c] - 2.0 / 3.0 * p * u0.at(q)[c])));
  }
  o.require(closed < 1e-6, "K = 1 closed form");

  const auto c0 = calc.sample(4, [](const Vec3& w, double* v) {
    v[0] = std::sin(0.3) * w.x(), v[1] = std::sin(0.3) * w.y(), v[2] = std::sin(0.3) * w.z();
    v[3] = std::cos(0.3);
  });
  const auto hm1 = hmf_coefficients(calc, c0, 1).u[1];
  std::vector<double> gap;
  for (double K : {1.0, 10.0, 100.0}) {
    const auto g = gl_coefficients(calc, c0, K, 1).u[1];
    double d = 0;
    for (std::size_t q = 0; q < g.values.size(); ++q) d = std::max(d, std::abs(g.values[q] - hm1.values[q]));
    gap.push_back(d);
  }
  const double r1 = gap[0] / gap[1], r2 = gap[1] / gap[2];
  o.require(r1 >= 5 && r1 <= 15 && r2 >= 5 && r2 <= 15, "10x per K-decade");
  o.note("closed-form err " + fmt(closed) + ", decade ratios " + fmt(r1) + "/" + fmt(r2));
  return o;
}

// ---------------------------------------------------------------- 5

Outcome fixed_point_scheme() {
  Outcome o;
  auto grid = make_space_grid(RadialGrid::graded(0.2, 0.25, 20), SphereGrid(25, 48));
  PicardOptions opt;
  opt.linear.exec = Exec::OpenMP;
  const auto one = picard_iterate(FixedPointState(1.0, 10, corotational_caloric_field(grid, 0.0)), opt);
  o.require(one.converged && one.ledger.size() == 1 && one.v_norm == 0, "σ = 1 in one step");

  const double K = 10, h = 0.05;
  const auto u0 = corotational_caloric_field(grid, h);
  const auto st = picard_iterate(FixedPointState(0.9, K, u0), opt);
  double q = 0;
  for (const auto& s : st.ledger)
    if (std::isfinite(s.ratio)) q = std::max(q, s.ratio);
  const double res = static_residual(st.u0 + st.v, K, 0, Cutoff(), Exec::OpenMP);
  o.require(st.converged && q < 1, "contraction");
  o.require(res <= 1e-5 * K, "static residual");

  std::vector<double> t;
  for (int s = 1; s <= 10; ++s) t.push_back(0.1 * s);
  const auto fit = q_shape(u0, random_decaying_field(grid, 4, 7), K, t, Cutoff(), Exec::OpenMP);
  o.require(fit.r_squared >= 0.95, "Q shape fit");
  o.note("q " + fmt(q) + ", residual " + fmt(res) + ", R^2 " + fmt(fit.r_squared) + ", steps " +
         std::to_string(st.ledger.size()));
  return o;
}

// ---------------------------------------------------------------- 6

Outcome energy_inequality_shape() {
  Outcome o;
  const EnergyModel none;
  const std::vector<double> times{1, 0.1, 0.01, 0.001};
  const auto eq = CorotationalView::equator(3);
  double worst = 0;
  bool monotone = true;
  const auto check = [&](const ExpanderView& v, const EnergyModel& m, const PointN& x0) {
    const auto rows = energy_inequality(v, m, x0, times);
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (std::abs(rows[i].slack) > std::abs(rows[i - 1].slack) + 1e-12) monotone = false;
    worst = std::max(worst, std::abs(rows.back().energy / rows.back().boundary_energy - 1));
  };
  for (int a = 0; a < 3; ++a) check(eq, none, axis(3, a, 10));
  o.require(worst <= 0.1 && monotone, "equator map");
  o.note("equator: |E/E0 - 1| at t=1e-3 " + fmt(worst));
  worst = 0;
  for (const char* name : kReferences) {
    const auto p = reference(name);
    check(CorotationalView::from_profile(p), EnergyModel::for_profile(p), axis(p.n, 0, 10));
  }
  o.require(worst <= 0.1 && monotone, "reference profiles");
  o.note("references: " + fmt(worst) + (monotone ? ", excess monotone" : ", excess not monotone"));
  return o;
}

// ---------------------------------------------------------------- 7

Outcome monotonicity() {
  Outcome o;
  std::vector<double> radii;
  for (int i = 1; i <= 9; ++i) radii.push_back(0.05 * i);
  double worst = 0;
  int violations = 0;
  for (const char* name : kReferences) {
    const auto p = reference(name);
    const auto v = CorotationalView::from_profile(p);
    for (double x : {5.0, 10.0, 20.0}) {
      const auto tab = monotonicity_table(v, EnergyModel::for_profile(p), axis(p.n, 0, x), 1.0, radii,
                                          0.05, Exec::OpenMP);
      violations += tab.violations;
      if (tab.boundary_norm > 0) worst = std::max(worst, tab.max_phi_drop / tab.boundary_norm);
    }
  }
  o.require(worst <= 0.05 && violations == 0, "Φ drop within slack");
  o.note("max drop / ‖∇u0‖² " + fmt(worst) + ", violations " + std::to_string(violations));
  return o;
}

// ---------------------------------------------------------------- 8

CorotationalProfile resolve(const CorotationalProfile& ref, double spacing) {
  if (ref.K > 0) {
    GlOptions opt;
    opt.grid.spacing = spacing;
    return solve_gl_corot(ref.n, ref.K, std::sin(ref.limit_angle), std::cos(ref.limit_angle),
                          ref.grid.r_max(), opt);
  }
  CorotOptions opt;
  opt.grid.spacing = spacing;
  return solve_corot(ref.n, ref.limit_angle, ref.grid.r_max(), opt);
}

Outcome pohozaev() {
  Outcome o;
  const std::vector<double> ladder{0.2, 0.1, 0.05};
  for (const char* name : kReferences) {
    const auto ref = reference(name);
    const TestFields fields{axis(ref.n, 0, 1.5), 1.0};
    std::vector<double> res;
    for (double h : ladder) {
      const auto p = resolve(ref, h);
      const auto r = pohozaev_residual(CorotationalView::from_profile(p), EnergyModel::for_profile(p),
                                       fields, 0.5, 1.0);
      res.push_back(std::max(r.residual, r.energy_residual));
    }
    const double estimate = std::abs(res[1] - res[2]);
    const double slope = loglog_slope(ladder, res);
    o.require(res[2] <= 10 * estimate && slope >= 1.8, name);
    o.note(std::string(name) + " " + fmt(res[0]) + "→" + fmt(res[2]) + " slope " + fmt(slope));
  }
  return o;
}

// ---------------------------------------------------------------- 9

MapField caloric_field(const BoundaryMap& u0, const SpaceGridPtr& grid) {
  return CaloricExtension(u0).fill(grid, Exec::OpenMP);
}

SphereMap sphere_data(const BoundaryMap& u0, const SphereGrid& s) {
  return LatLongCalculus(s).sample(u0.components(), [&](const Vec3& w, double* v) { u0(w, v); });
}

Outcome eps_regularity_chain() {
  Outcome o;
  const EnergyModel none;
  int flagged = 0;
  double chain = 0;
  const auto scan = [&](const ExpanderView& v, const EnergyModel& m) {
    std::vector<PointN> probes;
    for (double r : {10.0, 20.0})
      for (int a = 0; a < v.dimension(); ++a) probes.push_back(axis(v.dimension(), a, r));
    for (const auto& p : eps_regularity_scan(v, m, probes, 0.25, {}, Exec::OpenMP)) {
      flagged += p.flagged || !p.verified;
      chain = std::max(chain, p.sup_energy * p.x0.squaredNorm());
    }
  };
  scan(CorotationalView::equator(3), none);
  for (const char* name : kReferences) {
    const auto p = reference(name);
    scan(CorotationalView::from_profile(p), EnergyModel::for_profile(p));
  }
  o.require(flagged == 0, "far probes unflagged");
  o.require(chain <= RegularityOptions().C, "sup e |x0|^2 bounded");

  auto grid = make_space_grid(RadialGrid::graded(0.25, 0.25, 40), SphereGrid(17, 32));
  const auto wedge = BoundaryMap::lipschitz_wedge(1.0);
  const auto rw = rate_classify(caloric_field(wedge, grid), sphere_data(wedge, grid->sphere), {4, 20});
  const auto smooth = BoundaryMap::identity_sphere();
  const auto rs = rate_classify(caloric_field(smooth, grid), sphere_data(smooth, grid->sphere), {4, 20});
  const auto rp = rate_classify(reference("corot_n3_h0.3"), {5, 35});
  o.require(rw.rate == RateClass::Lipschitz && std::abs(rw.slope + 1) <= 0.15, "wedge rate");
  o.require(rs.rate == RateClass::Smooth || rs.rate == RateClass::SuperPolynomial, "C3 caloric rate");
  o.require(rp.rate == RateClass::Smooth || rp.rate == RateClass::SuperPolynomial, "expander rate");
  o.note("flagged " + std::to_string(flagged) + ", sup e|x0|^2 " + fmt(chain) + ", wedge " +
         to_string(rw.rate) + " " + fmt(rw.slope) + ", smooth " + to_string(rs.rate) + " " + fmt(rs.slope));
  return o;
}

// ---------------------------------------------------------------- 10

// Direct quadrature of ∫ K_t(z) u0(x - z) dz, polar axis along x.
std::vector<double> brute_caloric(const BoundaryMap& u0, const Vec3& x, double t) {
  const int m = u0.components(), nq = 48, naz = 64;
  const double r = x.norm();
  const Vec3 pole = x / r;
  const Vec3 e1 = (Vec3::UnitZ() - pole.z() * pole).normalized();
  const Vec3 e2 = pole.cross(e1);
  const std::vector<QuadratureRule> radial{gauss_legendre(nq, 0, r),
                                           gauss_legendre(nq, r, r + 12 * std::sqrt(t))};
  const auto polar = gauss_legendre(nq, -1, 1);
  std::vector<double> acc(m, 0), v(m);
  double mass = 0;
  for (const auto& rule : radial)
    for (int a = 0; a < nq; ++a) {
      const double rho = rule.nodes[a];
      const double kern = heat_kernel(3, t, rho * rho) * rho * rho * rule.weights[a];
      for (int b = 0; b < nq; ++b) {
        const double c = polar.nodes[b], s = std::sqrt(1 - c * c);
        for (int q = 0; q < naz; ++q) {
          const double ang = 2 * std::numbers::pi * (q + 0.5) / naz;
          const Vec3 dir = c * pole + s * (std::cos(ang) * e1 + std::sin(ang) * e2);
          const double w = kern * polar.weights[b];
          u0.at(x - rho * dir, v.data());
          for (int i = 0; i < m; ++i) acc[i] += w * v[i];
          mass += w;
        }
      }
    }
  for (double& a : acc) a /= mass;
  return acc;
}

Outcome caloric_extension() {
  Outcome o;
  auto grid = make_space_grid(RadialGrid::graded(0.25, 0.25, 40), SphereGrid(17, 32));
  double excess = -1;
  for (const auto& u0 : {BoundaryMap::lipschitz_wedge(1.0), BoundaryMap::identity_sphere(),
                         BoundaryMap::corotational(0.7)}) {
    const auto f = caloric_field(u0, grid);
    for (std::size_t q = 0; q < f.node_count(); ++q) {
      const double* v = f.node_values(q);
      double a = 0;
      for (int c = 0; c < u0.components(); ++c) a += v[c] * v[c];
      excess = std::max(excess, std::sqrt(a) - 1.0);
    }
  }
  o.require(excess <= 1e-6, "maximum principle");

  const auto wedge = BoundaryMap::lipschitz_wedge(1.0), smooth = BoundaryMap::corotational(0.3);
  const auto rw = rate_classify(caloric_field(wedge, grid), sphere_data(wedge, grid->sphere), {4, 20});
  const auto rs = rate_classify(caloric_field(smooth, grid), sphere_data(smooth, grid->sphere), {4, 20});
  o.require(std::abs(rw.slope + 1) <= 0.2 && std::abs(rs.slope + 2) <= 0.2, "decay slopes");

  // U0(x, t) from the time-t kernel against U0(x/√t, 1) from the extension.
  const CaloricOptions copt;
  double homog = 0;
  for (const auto& u0 : {BoundaryMap::identity_sphere(), smooth}) {
    const CaloricExtension ext(u0);
    std::vector<double> v(u0.components());
    for (double t : {0.25, 1.0, 4.0})
      for (const Vec3& x : {Vec3(1.0, -0.5, 2.0), Vec3(3.0, 1.0, -0.5)}) {
        ext.evaluate(x / std::sqrt(t), 1.0, v.data());
        const auto ref = brute_caloric(u0, x, t);
        for (int c = 0; c < u0.components(); ++c) homog = std::max(homog, std::abs(v[c] - ref[c]));
      }
  }
  o.require(homog <= copt.tolerance, "0-homogeneity");
  o.note("max |U0| - 1 = " + fmt(excess) + ", slopes " + fmt(rw.slope) + "/" + fmt(rs.slope) +
         ", homogeneity " + fmt(homog));
  return o;
}

// ---------------------------------------------------------------- 11

std::vector<std::vector<std::string>> default_suite() {
  const std::string ref = (fs::path(HMFX_DATA_DIR) / "reference" / "corot_n3_h0.3.csv").string();
  return {{"solve-corot"},
          {"solve-gl"},
          {"fixed-point"},
          {"caloric", "--set", "problem.boundary=wedge"},
          {"asymptotics", "--set", "problem.boundary=equator"},
          {"diagnose"},
          {"diagnose", "--set", "diagnose.profile=" + ref},
          {"sweep", "--jobs", "2", "--set", "sweep.command=solve-gl", "--set", "sweep.key=problem.K",
           "--set", "sweep.values=1,10,100"}};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const auto root = fs::temp_directory_path() / "hmfx_acceptance_determinism";
  fs::remove_all(root);
  for (const char* pass : {"a", "b"}) {
    int i = 0;
    for (auto args : default_suite()) {
      args.insert(args.begin() + 1, {"--quiet", "--out", (root / pass / std::to_string(i++)).string()});
      o.require(cli::run_cli(args) == 0, args.front() + " exit status");
    }
  }
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    const auto other = root / "b" / fs::relative(e.path(), root / "a");
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
  }
  o.require(files > 0 && differ == 0, "byte-identical CSVs");
  o.note(std::to_string(files) + " CSV files compared, " + std::to_string(differ) + " differ");
  fs::remove_all(root);
  return o;
}

struct Criterion {
  const char* name;
  double seconds;  // runtime budget
  Outcome (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"operator identity", 1, operator_identity},
      {"exact branches", 5, exact_branches},
      {"corotational cross-check", 30, corotational_cross_check},
      {"Ginzburg-Landau consistency", 60, gl_consistency},
      {"fixed-point scheme", 60, fixed_point_scheme},
      {"energy inequality shape", 10, energy_inequality_shape},
      {"monotonicity", 20, monotonicity},
      {"Pohozaev", 20, pohozaev},
      {"eps-regularity and decay chain", 30, eps_regularity_chain},
      {"caloric extension", 60, caloric_extension},
      {"determinism", 0, determinism},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.seconds > 0) o.require(dt < c.seconds, "runtime budget " + fmt(c.seconds) + " s");
    failed += !o.pass;
    std::printf("%s %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", index, c.name, dt,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
