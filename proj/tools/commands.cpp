#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hmfx/asymptotics.hpp"
#include "hmfx/boundary.hpp"
#include "hmfx/caloric.hpp"
#include "hmfx/corotational.hpp"
#include "hmfx/diagnostics.hpp"
#include "hmfx/error.hpp"
#include "hmfx/fixedpoint.hpp"
#include "hmfx/series.hpp"

namespace hmfx::cli {

namespace fs = std::filesystem;

namespace {

// A run that produced some output before failing; exit code 4.
class PartialRun : public Error {
 public:
  PartialRun(const std::string& what, Json partial)
      : Error(ErrorKind::PartialResult, what), results(std::move(partial)) {}
  Json results;
};

struct Env {
  const RunConfig& c;
  fs::path out;
  double scale;
  int jobs;
  std::string profile;
  bool quiet;
};

double tol(const Env& e, const std::string& key, double fallback) {
  return e.c.number("tolerance." + key, fallback * e.scale);
}

SpaceGridPtr space_grid(const RunConfig& c, double spacing, double r_max) {
  return make_space_grid(
      RadialGrid::graded(c.number("grid.spacing", spacing), c.number("grid.stretch", 0.25),
                         c.number("grid.r_max", r_max)),
      SphereGrid(c.integer("grid.n_theta", 25), c.integer("grid.n_phi", 48)));
}

BoundaryMap boundary_map(const RunConfig& c) {
  const std::string name = c.string("problem.boundary", "corotational");
  if (name == "corotational") return BoundaryMap::corotational(c.number("problem.h_inf", 0.1));
  if (name == "equator") return BoundaryMap::equator();
  if (name == "identity") return BoundaryMap::identity_sphere();
  if (name == "wedge") return BoundaryMap::lipschitz_wedge(c.number("problem.amplitude", 1.0));
  if (name == "constant") return BoundaryMap::constant(c.numbers("problem.point", {0, 0, 0, 1}));
  if (name.rfind("csv:", 0) == 0) return BoundaryMap::from_csv(name.substr(4));
  fail(ErrorKind::Config, "unknown boundary map '" + name + "'");
}

double single_K(const RunConfig& c, double fallback) {
  const auto k = c.numbers("problem.K", {fallback});
  if (k.size() != 1) fail(ErrorKind::Config, "problem.K must hold one value for this command");
  return k.front();
}

// ------------------------------------------------------------ solve-corot

Json solve_corot_cmd(const Env& e) {
  const auto& c = e.c;
  CorotOptions opt;
  opt.grid.spacing = c.number("grid.spacing", opt.grid.spacing);
  opt.grid.stretch = c.number("grid.stretch", opt.grid.stretch);
  opt.far_field_order = c.integer("solver.far_field_order", opt.far_field_order);
  opt.slope_max = c.number("solver.slope_max", opt.slope_max);
  opt.max_newton = c.integer("solver.max_newton", opt.max_newton);
  opt.tolerance = tol(e, "newton", opt.tolerance);
  const int n = c.integer("problem.n", 3);
  const double h = c.number("problem.h_inf", 0.1);
  const double r_max = c.number("grid.r_max", 40);

  const auto p = solve_corot(n, h, r_max, opt);
  write_profile(p, e.out / "profile.csv", e.out / "profile.json");
  Json r;
  r["n"] = n;
  r["h_inf"] = h;
  r["r_max"] = r_max;
  r["nodes"] = p.size();
  r["slope"] = p.slope;
  r["residual"] = p.residual;
  r["tolerance"] = opt.tolerance;
  r["newton_iterations"] = p.newton_iterations;
  r["singular_center"] = p.singular_center;
  r["files"] = {"profile.csv", "profile.json"};
  return r;
}

// --------------------------------------------------------------- solve-gl

double modulus_defect(const CorotationalProfile& p) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s = std::max(s, std::abs(p.modulus(i) - 1));
  return s;
}

void write_rungs(const std::vector<Rung>& rungs, const fs::path& path) {
  CsvTable t({"sigma", "K", "newton_iterations", "residual", "modulus_defect"});
  for (const auto& r : rungs)
    t.add_row(std::vector<double>{r.sigma, r.K, static_cast<double>(r.newton_iterations),
                                  r.residual, modulus_defect(r.profile)});
  t.write(path);
}

Json solve_gl_cmd(const Env& e) {
  const auto& c = e.c;
  GlOptions opt;
  opt.grid.spacing = c.number("grid.spacing", opt.grid.spacing);
  opt.grid.stretch = c.number("grid.stretch", opt.grid.stretch);
  opt.far_field_order = c.integer("solver.far_field_order", opt.far_field_order);
  opt.max_newton = c.integer("solver.max_newton", opt.max_newton);
  opt.tolerance = tol(e, "newton", opt.tolerance);
  const std::string guess = c.string("solver.guess", "harmonic");
  if (guess == "ramp") opt.guess = GlGuess::Ramp;
  else if (guess != "harmonic") fail(ErrorKind::Config, "solver.guess must be harmonic or ramp");
  const int n = c.integer("problem.n", 3);
  const double h = c.number("problem.h_inf", 0.1);
  const double r_max = c.number("grid.r_max", 40);
  const auto ladder = c.numbers("problem.K", {1, 10, 100});
  const auto sigma = c.numbers("problem.sigma", {0});

  Json r;
  r["n"] = n;
  r["h_inf"] = h;
  r["K"] = ladder;
  r["sigma"] = sigma;
  std::vector<Rung> rungs;
  try {
    rungs = continuation(n, h, ladder, sigma, r_max, opt);
  } catch (const ContinuationError& err) {
    write_rungs(err.completed, e.out / "rungs.csv");
    if (!err.completed.empty())
      write_profile(err.completed.back().profile, e.out / "profile.csv", e.out / "profile.json");
    r["completed_rungs"] = err.completed.size();
    throw PartialRun(err.what(), r);
  }
  write_rungs(rungs, e.out / "rungs.csv");
  const auto& last = rungs.back();
  write_profile(last.profile, e.out / "profile.csv", e.out / "profile.json");
  Json defects = Json::array();
  for (const auto& rung : rungs) defects.push_back(modulus_defect(rung.profile));
  r["rungs"] = rungs.size();
  r["modulus_defect"] = defects;
  r["residual"] = last.residual;
  r["files"] = {"rungs.csv", "profile.csv", "profile.json"};
  return r;
}

// ------------------------------------------------------------ fixed-point

Json fixed_point_cmd(const Env& e) {
  const auto& c = e.c;
  const auto grid = space_grid(c, 0.2, 20);
  const double K = single_K(c, 10);
  const double sigma = c.number("problem.sigma", 0.9);
  const BoundaryMap u0 = boundary_map(c);
  MapField U0 = c.string("problem.boundary", "corotational") == "corotational"
                    ? corotational_caloric_field(grid, (1 - sigma) * c.number("problem.h_inf", 0.1))
                    : CaloricExtension(u0.along_path(sigma)).fill(grid, Exec::OpenMP);

  PicardOptions opt;
  opt.max_iterations = c.integer("picard.max_iterations", opt.max_iterations);
  opt.radius = c.number("picard.radius", 0);
  opt.tolerance = tol(e, "picard", opt.tolerance);
  opt.linear.tolerance = tol(e, "linear", opt.linear.tolerance);
  opt.linear.restart = c.integer("picard.restart", opt.linear.restart);
  opt.linear.exec = Exec::OpenMP;
  const auto st = picard_iterate(FixedPointState(sigma, K, U0), opt);

  CsvTable ledger({"iteration", "step_norm", "ratio", "v_norm", "q_norm", "linear_iterations",
                   "linear_residual", "barrier_ratio"});
  double q_max = 0;
  for (const auto& s : st.ledger) {
    ledger.add_row(std::vector<double>{static_cast<double>(s.iteration), s.step_norm, s.ratio,
                                       s.v_norm, s.q_norm,
                                       static_cast<double>(s.linear_iterations),
                                       s.linear_residual, s.barrier_ratio});
    if (std::isfinite(s.ratio)) q_max = std::max(q_max, s.ratio);
  }
  ledger.write(e.out / "ledger.csv");
  const double res = static_residual(st.u0 + st.v, K, opt.radius, opt.chi, Exec::OpenMP);
  const double r_max = grid->radial.r_max();
  const auto decay = verify_decay(st.v, c.number("fit.lo", 4), c.number("fit.hi", r_max / 2),
                                  Exec::OpenMP);
  CsvTable dec({"sup_fv", "sup_f32_grad", "v_slope", "grad_slope", "static_residual"});
  dec.add_row(std::vector<double>{decay.sup_fv, decay.sup_f32_grad, decay.v_slope,
                                  decay.grad_slope, res});
  dec.write(e.out / "decay.csv");

  Json r;
  r["sigma"] = sigma;
  r["K"] = K;
  r["nodes"] = grid->node_count();
  r["converged"] = st.converged;
  r["iterations"] = st.ledger.size();
  r["v_norm"] = st.v_norm;
  r["max_ratio"] = q_max;
  r["static_residual"] = res;
  r["verdicts"] = Json::array({verdict("contraction_ratio", q_max, 1.0, q_max < 1),
                               verdict("static_residual", res, 1e-5 * K, res <= 1e-5 * K)});
  r["decay"] = {{"sup_fv", decay.sup_fv}, {"sup_f32_grad", decay.sup_f32_grad},
                {"v_slope", decay.v_slope}, {"grad_slope", decay.grad_slope}};
  r["files"] = {"ledger.csv", "decay.csv"};
  return r;
}

// ---------------------------------------------------------------- caloric

Json caloric_cmd(const Env& e) {
  const auto& c = e.c;
  const auto grid = space_grid(c, 0.25, 40);
  const BoundaryMap u0 = boundary_map(c);
  CaloricOptions copt;
  copt.tolerance = tol(e, "caloric", copt.tolerance);
  const CaloricExtension ext(u0, copt);
  const MapField field = ext.fill(grid, Exec::OpenMP);
  const int m = u0.components();

  const SphereGrid& s = grid->sphere;
  double bound = 0, modulus = 0;
  std::vector<double> w(m);
  for (int j = 0; j < s.n_theta(); ++j)
    for (int k = 0; k < s.n_phi(); ++k) {
      u0(s.direction(j, k), w.data());
      double a = 0;
      for (double x : w) a += x * x;
      bound = std::max(bound, std::sqrt(a));
    }
  for (std::size_t q = 0; q < field.node_count(); ++q) {
    const double* v = field.node_values(q);
    double a = 0;
    for (int k = 0; k < m; ++k) a += v[k] * v[k];
    modulus = std::max(modulus, std::sqrt(a));
  }

  // sup_ω |U0(rω) - u0(ω)| per shell, then the decay class.
  const double lo = c.number("fit.lo", 4), hi = c.number("fit.hi", 20);
  std::vector<double> radii, dev;
  CsvTable decay({"r", "deviation"});
  for (std::size_t i = 1; i < grid->radial.size(); ++i) {
    const double r = grid->radial[i];
    if (r < lo || r > hi) continue;
    double worst = 0;
    for (int j = 0; j < s.n_theta(); ++j)
      for (int k = 0; k < s.n_phi(); ++k) {
        u0(s.direction(j, k), w.data());
        const double* v = field.at(i, j, k);
        double a = 0;
        for (int q = 0; q < m; ++q) a += (v[q] - w[q]) * (v[q] - w[q]);
        worst = std::max(worst, std::sqrt(a));
      }
    radii.push_back(r);
    dev.push_back(worst);
    decay.add_row(std::vector<double>{r, worst});
  }
  decay.write(e.out / "decay.csv");
  const RateReport rate = rate_classify(radii, dev);

  // Quadrature self-estimate at a few off-grid points and times.
  double accuracy = 0;
  for (double t : {0.25, 1.0, 4.0})
    for (const Vec3& x : {Vec3(1, 0.5, -0.3), Vec3(-2, 1, 2), Vec3(0.3, -0.2, 4)})
      accuracy = std::max(accuracy, ext.error_estimate(x, t));

  if (c.string("output.field", "true") == "true")
    write_field(field, e.out / "field.csv", e.out / "field.json");

  Json r;
  r["boundary"] = u0.name();
  r["nodes"] = grid->node_count();
  r["max_modulus"] = modulus;
  r["boundary_bound"] = bound;
  r["rate"] = to_string(rate.rate);
  r["decay_slope"] = rate.slope;
  r["error_estimate"] = accuracy;
  r["verdicts"] = Json::array(
      {verdict("maximum_principle", modulus - bound, 1e-6, modulus <= bound + 1e-6),
       verdict("quadrature_estimate", accuracy, copt.tolerance, accuracy <= copt.tolerance)});
  return r;
}

// ------------------------------------------------------------ asymptotics

Json asymptotics_cmd(const Env& e) {
  const auto& c = e.c;
  const int n = c.integer("problem.n", 3);
  const int order = c.integer("problem.order", 3);
  const std::string flow = c.string("problem.flow", "hmf");
  if (flow != "hmf" && flow != "gl") fail(ErrorKind::Config, "problem.flow must be hmf or gl");
  const double K = single_K(c, 1);
  const std::string name = c.string("problem.boundary", "corotational");

  AsymptoticSeries s;
  const auto expand = [&](const SphereCalculus& calc, const SphereMap& u0) {
    return flow == "hmf" ? hmf_coefficients(calc, u0, order) : gl_coefficients(calc, u0, K, order);
  };
  // The equator map is corotational with angle π/2; the reduced calculus
  // avoids the round-off growth of the lat-long recursion.
  if (name == "corotational" || name == "equator") {
    const double h = name == "equator" ? std::acos(0.0) : c.number("problem.h_inf", 0.1);
    const CorotationalCalculus calc(n);
    SphereMap u0(1, 2);
    u0.values = {std::sin(h), std::cos(h)};
    s = expand(calc, u0);
  } else {
    if (n != 3) fail(ErrorKind::Config, "grid boundary maps need n = 3");
    const LatLongCalculus calc(SphereGrid(c.integer("grid.n_theta", 25), c.integer("grid.n_phi", 48)));
    const BoundaryMap b = boundary_map(c);
    s = expand(calc, calc.sample(b.components(), [&](const Vec3& w, double* o) { b(w, o); }));
  }
  write_series(s, e.out / "series.csv", e.out / "series.json");

  CsvTable sup({"order", "sup"});
  double higher = 0;
  Json sups = Json::array();
  for (int i = 0; i <= s.order(); ++i) {
    const double v = s.u[i].max_norm();
    sup.add_row(std::vector<double>{static_cast<double>(i), v});
    sups.push_back(v);
    if (i > 0) higher = std::max(higher, v);
  }
  sup.write(e.out / "coefficients.csv");
  const double tol_v = tol(e, "coefficients", 1e-8);
  Json r;
  r["boundary"] = name;
  r["flow"] = flow;
  r["n"] = n;
  r["order"] = order;
  r["coefficient_sup"] = sups;
  r["verdicts"] = Json::array({verdict("higher_coefficients_vanish", higher, tol_v,
                                       higher <= tol_v)});
  r["files"] = {"series.csv", "series.json", "coefficients.csv"};
  return r;
}

// --------------------------------------------------------------- diagnose

PointN axis_point(int n, int axis, double r) {
  PointN x = PointN::Zero(n);
  x[axis % n] = r;
  return x;
}

Json diagnose_cmd(const Env& e) {
  const auto& c = e.c;
  const std::string src = c.string("diagnose.profile", "equator");
  int n = c.integer("problem.n", 3);
  std::unique_ptr<CorotationalView> view;
  EnergyModel model;
  if (src == "equator") {
    view = std::make_unique<CorotationalView>(CorotationalView::equator(n));
  } else if (src == "constant") {
    view = std::make_unique<CorotationalView>(CorotationalView::constant(n));
  } else {
    fs::path csv(src);
    const auto p = read_profile(csv, fs::path(csv).replace_extension(".json"));
    n = p.n;
    view = std::make_unique<CorotationalView>(CorotationalView::from_profile(p));
    model = EnergyModel::for_profile(p);
  }
  const auto probes = c.numbers("diagnose.probes", {5, 10, 20});
  const auto radii = c.numbers("diagnose.radii", {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45});
  const double slack = c.number("diagnose.slack", 0.05);
  RegularityOptions ro;
  ro.eps0 = c.number("diagnose.eps0", ro.eps0);
  ro.delta = c.number("diagnose.delta", ro.delta);
  ro.C = c.number("diagnose.C", ro.C);
  const double poho_tol = tol(e, "pohozaev", 1e-6);

  Json verdicts = Json::array();
  CsvTable verdict_rows({"check", "value", "tolerance", "pass"});
  const auto add = [&](const std::string& name, double value, double tolerance, bool pass) {
    verdicts.push_back(verdict(name, value, tolerance, pass));
    verdict_rows.add_row(std::vector<std::string>{name, format_double(value),
                                                  format_double(tolerance), pass ? "1" : "0"});
  };

  // Monotonicity.
  CsvTable mono({"probe", "R", "Phi", "Psi", "boundary_norm"});
  double worst = 0;
  for (double p : probes) {
    const auto tab = monotonicity_table(*view, model, axis_point(n, 0, p), 1.0, radii, slack,
                                        Exec::OpenMP);
    for (std::size_t i = 0; i < radii.size(); ++i)
      mono.add_row(std::vector<double>{p, radii[i], tab.phi[i], tab.psi[i], tab.boundary_norm});
    if (tab.boundary_norm > 0) worst = std::max(worst, tab.max_phi_drop / tab.boundary_norm);
  }
  mono.write(e.out / "monotonicity.csv");
  add("monotonicity_phi_drop", worst, slack, worst <= slack);

  // ε-regularity on far probes along the coordinate axes, then the decay chain.
  std::vector<PointN> far;
  for (double p : probes)
    if (p >= 10)
      for (int a = 0; a < n; ++a) far.push_back(axis_point(n, a, p));
  const auto scan = eps_regularity_scan(*view, model, far, 0.25, ro, Exec::OpenMP);
  probe_csv(scan).write(e.out / "probes.csv");
  int flagged = 0;
  double decay = 0;
  for (const auto& q : scan) {
    flagged += q.flagged || !q.verified;
    decay = std::max(decay, q.sup_energy * q.x0.squaredNorm());
  }
  add("far_probes_unflagged", flagged, 0, flagged == 0);
  add("far_energy_times_r2", decay, ro.C, decay <= ro.C);

  // Bochner ratio and Shi-type bound.
  std::vector<PointN> samples;
  for (double r : {5.0, 7.5, 10.0, 15.0, 20.0}) samples.push_back(axis_point(n, 1, r));
  const auto boch = bochner_check(*view, model, samples, ro.C, Exec::OpenMP);
  CsvTable bt({"r", "ratio"});
  for (std::size_t i = 0; i < boch.ratios.size(); ++i)
    bt.add_row(std::vector<double>{samples[i + samples.size() - boch.ratios.size()].norm(),
                                   boch.ratios[i]});
  bt.write(e.out / "bochner.csv");
  add("bochner_bounded", boch.ratios.empty() ? 0.0 : boch.max_ratio, ro.C, boch.bounded);
  const auto shi = shi_bound_check(*view, axis_point(n, 0, 10), 5, ro.C, scan);
  add("shi_ratio", shi.ratio, 1.0, shi.ratio <= 1);

  // Pohozaev identities on a slab.
  const double pc = c.number("diagnose.pohozaev_center", 3);
  const auto poho = pohozaev_residual(*view, model, {axis_point(n, 0, pc), 1.0}, 0.5, 1.0, 16);
  CsvTable pt({"lhs", "divergence_term", "lie_term", "residual", "energy_lhs", "energy_rhs",
               "energy_residual"});
  pt.add_row(std::vector<double>{poho.lhs, poho.divergence_term, poho.lie_term, poho.residual,
                                 poho.energy_lhs, poho.energy_rhs, poho.energy_residual});
  pt.write(e.out / "pohozaev.csv");
  const double pr = std::max(poho.residual, poho.energy_residual);
  add("pohozaev_residual", pr, poho_tol, pr <= poho_tol);

  // Energy inequality at the middle probe.
  const std::vector<double> times{1, 0.1, 0.01, 0.001};
  const auto rows = energy_inequality(*view, model, axis_point(n, 0, 10), times);
  CsvTable et({"t", "energy", "boundary_energy", "slack"});
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    et.add_row(std::vector<double>{rows[i].t, rows[i].energy, rows[i].boundary_energy,
                                   rows[i].slack});
    if (i > 0 && std::abs(rows[i].slack) > std::abs(rows[i - 1].slack) + 1e-12) monotone = false;
  }
  et.write(e.out / "energy.csv");
  const double last = std::abs(rows.back().slack);
  add("energy_limit", last, 0.1, last <= 0.1 && monotone);

  verdict_rows.write(e.out / "verdicts.csv");
  bool all = true;
  for (const auto& v : verdicts) all = all && v["pass"].get<bool>();
  Json r;
  r["source"] = src;
  r["n"] = n;
  r["all_pass"] = all;
  r["verdicts"] = verdicts;
  return r;
}

// ------------------------------------------------------------------ sweep

Json sweep_cmd(const Env& e);

Json dispatch(const std::string& command, const Env& e) {
  if (command == "solve-corot") return solve_corot_cmd(e);
  if (command == "solve-gl") return solve_gl_cmd(e);
  if (command == "fixed-point") return fixed_point_cmd(e);
  if (command == "caloric") return caloric_cmd(e);
  if (command == "asymptotics") return asymptotics_cmd(e);
  if (command == "diagnose") return diagnose_cmd(e);
  if (command == "sweep") return sweep_cmd(e);
  fail(ErrorKind::Config, "unknown command '" + command + "'");
}

Json sweep_cmd(const Env& e) {
  const auto& c = e.c;
  const std::string child = c.string("sweep.command", "");
  const std::string key = c.string("sweep.key", "");
  if (child.empty() || child == "sweep") fail(ErrorKind::Config, "sweep.command must name a solver");
  if (key.empty()) fail(ErrorKind::Config, "sweep.key is required");
  std::vector<std::string> values;
  {
    std::istringstream in(c.string("sweep.values", ""));
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto b = item.find_first_not_of(" \t"), f = item.find_last_not_of(" \t");
      if (b != std::string::npos) values.push_back(item.substr(b, f - b + 1));
    }
  }
  if (values.empty()) fail(ErrorKind::Config, "sweep.values is empty");

  std::vector<Context> children(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    char dir[32];
    std::snprintf(dir, sizeof dir, "child_%03zu", i);
    children[i] = {child, c, e.out / dir, 1, e.profile, e.quiet};
    children[i].config.set(key, values[i]);
  }
  std::vector<int> codes(values.size(), -1);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < children.size();) codes[i] = run_command(children[i]);
  };
  std::vector<std::thread> pool;
  const int nthreads = std::max(1, std::min<int>(e.jobs, static_cast<int>(values.size())));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  Json manifest;
  manifest["command"] = child;
  manifest["key"] = key;
  manifest["children"] = Json::array();
  CsvTable table({"index", "value", "exit_code"});
  std::size_t ok = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    manifest["children"].push_back({{"index", i},
                                    {"value", values[i]},
                                    {"dir", children[i].out.filename().string()},
                                    {"exit_code", codes[i]}});
    table.add_row(std::vector<std::string>{std::to_string(i), values[i], std::to_string(codes[i])});
    ok += codes[i] == 0;
  }
  write_json_atomic(e.out / "manifest.json", manifest);
  table.write(e.out / "manifest.csv");
  Json r;
  r["children"] = values.size();
  r["succeeded"] = ok;
  r["files"] = {"manifest.json", "manifest.csv"};
  if (ok != values.size()) throw PartialRun("some sweep children failed", r);
  return r;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Io:
      return kConfigError;
    case ErrorKind::PartialResult:
      return kPartial;
    default:
      return kSolverError;
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve-corot", "solve-gl", "fixed-point", "caloric",
                                              "asymptotics", "diagnose", "sweep"};
  return names;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "problem.n", "problem.h_inf", "problem.K", "problem.sigma", "problem.boundary",
      "problem.amplitude", "problem.point", "problem.flow", "problem.order",
      "grid.spacing", "grid.stretch", "grid.r_max", "grid.n_theta", "grid.n_phi",
      "solver.far_field_order", "solver.slope_max", "solver.guess", "solver.max_newton",
      "picard.max_iterations", "picard.radius", "picard.restart",
      "tolerance.newton", "tolerance.picard", "tolerance.linear", "tolerance.caloric",
      "tolerance.coefficients", "tolerance.pohozaev",
      "fit.lo", "fit.hi",
      "diagnose.profile", "diagnose.probes", "diagnose.radii", "diagnose.slack", "diagnose.eps0",
      "diagnose.delta", "diagnose.C", "diagnose.pohozaev_center",
      "sweep.command", "sweep.key", "sweep.values",
      "output.dir", "output.field"};
  return keys;
}

double tolerance_scale(const std::string& profile) {
  if (profile == "strict") return 0.1;
  if (profile == "default") return 1.0;
  if (profile == "loose") return 10.0;
  fail(ErrorKind::Config, "unknown tolerance profile '" + profile + "'");
}

int run_command(const Context& ctx) {
  const auto start = std::chrono::steady_clock::now();
  Json summary;
  summary["command"] = ctx.command;
  summary["tolerance_profile"] = ctx.tolerance_profile;
  summary["config"] = {{"text", ctx.config.text()}, {"entries", ctx.config.to_json()}};
  int code = kOk;
  Json results = Json::object();
  Json error;
  try {
    fs::create_directories(ctx.out);
    ctx.config.validate(known_keys());
    const Env env{ctx.config, ctx.out, tolerance_scale(ctx.tolerance_profile), ctx.jobs,
                  ctx.tolerance_profile, ctx.quiet};
    results = dispatch(ctx.command, env);
  } catch (const PartialRun& e) {
    code = kPartial;
    results = e.results;
    error = {{"kind", to_string(e.kind())}, {"message", e.what()}};
  } catch (const NotAttainedError& e) {
    code = kSolverError;
    results["reachable_range"] = {e.reachable_lo, e.reachable_hi};
    error = {{"kind", to_string(e.kind())}, {"message", e.what()}};
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    error = {{"kind", to_string(e.kind())}, {"message", e.what()}};
  } catch (const std::exception& e) {
    code = kSolverError;
    error = {{"kind", "internal"}, {"message", e.what()}};
  }
  summary["status"] = code == kOk ? "ok" : code == kPartial ? "partial" : "error";
  summary["exit_code"] = code;
  if (!error.is_null()) summary["error"] = error;
  summary["results"] = results;
  summary["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    fs::create_directories(ctx.out);
    write_json_atomic(ctx.out / "summary.json", summary);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hmfx: cannot write summary: %s\n", e.what());
  }
  if (!ctx.quiet)
    std::printf("hmfx %s: %s (exit %d) -> %s\n", ctx.command.c_str(),
              summary["status"].get<std::string>().c_str(), code, ctx.out.string().c_str());
  if (!error.is_null() && !ctx.quiet)
    std::fprintf(stderr, "hmfx %s: %s\n", ctx.command.c_str(),
                 error["message"].get<std::string>().c_str());
  return code;
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Expander solver and verification lab for harmonic map flow", "hmfx"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir, profile = "default";
  std::vector<std::string> sets;
  int jobs = 1;
  bool quiet = false;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--jobs", jobs, "concurrent sweep children")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance-profile", profile, "strict, default or loose")
        ->check(CLI::IsMember({"strict", "default", "loose"}));
    sub->add_option("--set", sets, "override key=value")->take_all();
    sub->add_flag("--quiet", quiet, "suppress the status line");
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  Context ctx;
  ctx.command = app.get_subcommands().front()->get_name();
  ctx.jobs = jobs;
  ctx.tolerance_profile = profile;
  ctx.quiet = quiet;
  std::string load_error;
  try {
    if (!config_path.empty()) ctx.config = RunConfig::load(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(ErrorKind::Config, "--set expects key=value");
      const auto trim = [](std::string v) {
        v.erase(0, v.find_first_not_of(" \t"));
        v.erase(v.find_last_not_of(" \t") + 1);
        return v;
      };
      ctx.config.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
  } catch (const std::exception& e) {
    load_error = e.what();
  }
  if (!out_dir.empty()) ctx.out = out_dir;
  else if (const char* env = std::getenv("HMFX_OUT")) ctx.out = fs::path(env) / ctx.command;
  else ctx.out = ctx.config.string("output.dir", "hmfx_out/" + ctx.command);
  if (!load_error.empty()) {
    std::fprintf(stderr, "hmfx: %s\n", load_error.c_str());
    Json summary{{"command", ctx.command},
                 {"status", "error"},
                 {"exit_code", static_cast<int>(kConfigError)},
                 {"error", {{"kind", "config"}, {"message", load_error}}}};
    try {
      fs::create_directories(ctx.out);
      write_json_atomic(ctx.out / "summary.json", summary);
    } catch (...) {
    }
    return kConfigError;
  }
  return run_command(ctx);
}

}  // namespace hmfx::cli
