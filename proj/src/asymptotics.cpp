#include "hmfx/asymptotics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "hmfx/error.hpp"
#include "hmfx/io.hpp"
#include "hmfx/numerics.hpp"

namespace hmfx {

namespace {

constexpr int kLadder = 3;

void check_window(FitWindow w, int order) {
  if (order < 1 || order > 4) fail(ErrorKind::Config, "farfield_fit: order must be in 1..4");
  if (!(w.lo > 0) || w.hi < 10 * w.lo * (1 - 1e-12)) {
    std::ostringstream os;
    os << "fit window [" << w.lo << ", " << w.hi << "] spans less than a decade";
    fail(ErrorKind::Window, os.str());
  }
}

// Fits every column of `data` (rows = radii) on the rows with r >= start.
struct BlockFit {
  Eigen::MatrixXd coeff;  // order x columns
  double condition = 0;
  double rms = 0;
};

BlockFit fit_block(const std::vector<double>& radii, const Eigen::MatrixXd& data, int order,
                   double start) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (radii[i] >= start) rows.push_back(static_cast<Eigen::Index>(i));
  const auto count = static_cast<Eigen::Index>(rows.size());
  if (count < order + 2) fail(ErrorKind::Window, "fit window holds too few radii");
  Eigen::MatrixXd a(count, order);
  Eigen::MatrixXd b(count, data.cols());
  for (Eigen::Index q = 0; q < count; ++q) {
    const double r = radii[rows[q]];
    double p = 1;
    for (int c = 0; c < order; ++c) {
      p /= r * r;
      a(q, c) = p;
    }
    b.row(q) = data.row(rows[q]);
  }
  Eigen::VectorXd scale = a.colwise().norm().cwiseInverse();
  const Eigen::MatrixXd as = a * scale.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  BlockFit out;
  out.condition = s(0) / s(s.size() - 1);
  if (!(out.condition <= 1e8)) {
    std::ostringstream os;
    os << "fit basis condition number " << out.condition << " exceeds 1e8";
    fail(ErrorKind::Window, os.str());
  }
  out.coeff = scale.asDiagonal() * svd.solve(b);
  const Eigen::MatrixXd res = b - a * out.coeff;
  out.rms = std::sqrt(res.squaredNorm() / static_cast<double>(res.size()));
  return out;
}

FarFieldFit finish(const std::vector<double>& radii, const Eigen::MatrixXd& data, int order,
                   FitWindow window, AsymptoticSeries series) {
  const BlockFit main = fit_block(radii, data, order, window.lo);
  FarFieldFit out;
  out.condition = main.condition;
  out.residual_rms = main.rms;
  const std::size_t nodes = series.u.front().nodes;
  const int m = series.u.front().m;
  for (int c = 0; c < order; ++c) {
    SphereMap ui(nodes, m);
    for (Eigen::Index col = 0; col < main.coeff.cols(); ++col) ui.values[col] = main.coeff(c, col);
    series.u.push_back(std::move(ui));
  }
  const double ratio = std::pow(window.hi / window.lo, 0.5 / (kLadder - 1));
  double start = window.lo;
  for (int j = 0; j < kLadder; ++j, start *= ratio) {
    out.ladder_starts.push_back(start);
    out.ladder_rms.push_back(std::max(fit_block(radii, data, order, start).rms, 1e-300));
  }
  out.residual_slope = loglog_slope(out.ladder_starts, out.ladder_rms);
  out.series = std::move(series);
  return out;
}

}  // namespace

FarFieldFit farfield_fit(const CorotationalProfile& p, int order, FitWindow window) {
  check_window(window, order);
  if (window.hi > p.grid.r_max() * (1 + 1e-12)) fail(ErrorKind::Window, "fit window exceeds the profile");
  const double h = p.limit_angle;
  std::vector<double> radii;
  std::vector<std::array<double, 2>> vals;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.grid[i] >= window.lo && p.grid[i] <= window.hi) {
      radii.push_back(p.grid[i]);
      vals.push_back({p.radial_component(i) - std::sin(h), p.axial_component(i) - std::cos(h)});
    }
  Eigen::MatrixXd data(static_cast<Eigen::Index>(radii.size()), 2);
  for (std::size_t q = 0; q < radii.size(); ++q) data.row(q) << vals[q][0], vals[q][1];
  AsymptoticSeries s;
  s.flow = p.K > 0 ? Flow::GinzburgLandau : Flow::HarmonicMap;
  s.K = p.K;
  s.n = p.n;
  SphereMap u0(1, 2);
  u0.values = {std::sin(h), std::cos(h)};
  s.u.push_back(u0);
  return finish(radii, data, order, window, std::move(s));
}

FarFieldFit farfield_fit(const MapField& field, const SphereMap& u0, int order, FitWindow window) {
  check_window(window, order);
  const SpaceGrid& g = field.grid();
  const int nt = g.sphere.n_theta(), np = g.sphere.n_phi(), m = field.components();
  if (u0.nodes != g.sphere.size() || u0.m != m) fail(ErrorKind::Config, "farfield_fit: u0 does not match the grid");
  if (window.hi > g.radial.r_max() * (1 + 1e-12)) fail(ErrorKind::Window, "fit window exceeds the grid");
  std::vector<std::size_t> shells;
  std::vector<double> radii;
  for (std::size_t i = 1; i < g.radial.size(); ++i)
    if (g.radial[i] >= window.lo && g.radial[i] <= window.hi) {
      shells.push_back(i);
      radii.push_back(g.radial[i]);
    }
  Eigen::MatrixXd data(static_cast<Eigen::Index>(shells.size()),
                       static_cast<Eigen::Index>(u0.nodes) * m);
  for (std::size_t q = 0; q < shells.size(); ++q)
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < np; ++k) {
        const std::size_t node = static_cast<std::size_t>(j) * np + k;
        const double* v = field.at(shells[q], j, k);
        for (int c = 0; c < m; ++c)
          data(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(node * m + c)) = v[c] - u0.at(node)[c];
      }
  AsymptoticSeries s;
  s.n = 3;
  s.u.push_back(u0);
  return finish(radii, data, order, window, std::move(s));
}

double tangential_coefficient(const SphereMap& u, double h_inf) {
  return u.values[0] * std::cos(h_inf) - u.values[1] * std::sin(h_inf);
}

std::string to_string(RateClass c) {
  switch (c) {
    case RateClass::Lipschitz: return "lipschitz-rate";
    case RateClass::Smooth: return "smooth-rate";
    case RateClass::SuperPolynomial: return "super-polynomial";
    case RateClass::Unclassified: return "unclassified";
  }
  return "unclassified";
}

RateReport rate_classify(const std::vector<double>& radii, const std::vector<double>& dev) {
  RateReport rep;
  std::vector<double> r, d;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    rep.max_deviation = std::max(rep.max_deviation, dev[i]);
    if (dev[i] > 0) {
      r.push_back(radii[i]);
      d.push_back(dev[i]);
    }
  }
  std::ostringstream os;
  if (rep.max_deviation < 1e-10) {
    rep.rate = RateClass::SuperPolynomial;
    os << "max deviation " << rep.max_deviation << " below 1e-10";
    rep.diagnostics = os.str();
    return rep;
  }
  if (r.size() < 3) {
    rep.diagnostics = "fewer than three nonzero samples";
    return rep;
  }
  rep.slope = loglog_slope(r, d);
  if (std::abs(rep.slope + 1) <= 0.3)
    rep.rate = RateClass::Lipschitz;
  else if (rep.slope <= -1.7)
    rep.rate = RateClass::Smooth;
  os << "slope " << rep.slope << " over [" << r.front() << ", " << r.back() << "], max deviation "
     << rep.max_deviation;
  rep.diagnostics = os.str();
  return rep;
}

RateReport rate_classify(const CorotationalProfile& p, FitWindow window) {
  const double h = p.limit_angle;
  std::vector<double> r, d;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.grid[i] >= window.lo && p.grid[i] <= window.hi) {
      r.push_back(p.grid[i]);
      d.push_back(std::hypot(p.radial_component(i) - std::sin(h), p.axial_component(i) - std::cos(h)));
    }
  return rate_classify(r, d);
}

RateReport rate_classify(const MapField& field, const SphereMap& u0, FitWindow window) {
  const SpaceGrid& g = field.grid();
  const int nt = g.sphere.n_theta(), np = g.sphere.n_phi(), m = field.components();
  std::vector<double> r, d;
  for (std::size_t i = 1; i < g.radial.size(); ++i) {
    if (g.radial[i] < window.lo || g.radial[i] > window.hi) continue;
    double worst = 0;
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < np; ++k) {
        const double* v = field.at(i, j, k);
        const double* w = u0.at(static_cast<std::size_t>(j) * np + k);
        double s = 0;
        for (int c = 0; c < m; ++c) s += (v[c] - w[c]) * (v[c] - w[c]);
        worst = std::max(worst, std::sqrt(s));
      }
    r.push_back(g.radial[i]);
    d.push_back(worst);
  }
  return rate_classify(r, d);
}

double series_residual(const CorotSeries& s, int n, Flow flow, double K, double r) {
  double a = 0, a1 = 0, a2 = 0, b = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < s.alpha.size(); ++i) {
    const double e = -2.0 * static_cast<double>(i);
    const double p = std::pow(r, e);
    a += s.alpha[i] * p;
    b += s.beta[i] * p;
    a1 += s.alpha[i] * e * p / r;
    b1 += s.beta[i] * e * p / r;
    a2 += s.alpha[i] * e * (e - 1) * p / (r * r);
    b2 += s.beta[i] * e * (e - 1) * p / (r * r);
  }
  const double drift = (n - 1) / r + 0.5 * r;
  const double force = flow == Flow::HarmonicMap ? a1 * a1 + b1 * b1 + (n - 1) * a * a / (r * r)
                                                 : K * (1 - a * a - b * b);
  const double ra = a2 + drift * a1 - (n - 1) * a / (r * r) + force * a;
  const double rb = b2 + drift * b1 + force * b;
  return std::max(std::abs(ra), std::abs(rb));
}

void write_series(const AsymptoticSeries& s, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path) {
  if (s.u.empty()) fail(ErrorKind::Config, "write_series: empty series");
  const int m = s.u.front().m;
  std::vector<std::string> header{"order", "node"};
  for (int c = 0; c < m; ++c) header.push_back("c" + std::to_string(c + 1));
  CsvTable table(header);
  for (std::size_t i = 0; i < s.u.size(); ++i)
    for (std::size_t q = 0; q < s.u[i].nodes; ++q) {
      std::vector<double> row{static_cast<double>(i), static_cast<double>(q)};
      for (int c = 0; c < m; ++c) row.push_back(s.u[i].at(q)[c]);
      table.add_row(row);
    }
  table.write(csv_path);
  Json j;
  j["flow"] = s.flow == Flow::HarmonicMap ? "harmonic-map" : "ginzburg-landau";
  j["K"] = s.K;
  j["n"] = s.n;
  j["order"] = s.order();
  j["nodes"] = s.u.front().nodes;
  j["components"] = m;
  Json coeff = Json::array(), ledger = Json::array();
  for (const auto& u : s.u) coeff.push_back(u.max_norm());
  for (const auto& l : s.ledger) {
    double mx = 0;
    for (double v : l) mx = std::max(mx, std::abs(v));
    ledger.push_back(mx);
  }
  j["coefficient_sup"] = coeff;
  j[s.flow == Flow::HarmonicMap ? "b_sup" : "a_sup"] = ledger;
  write_json_atomic(json_path, j);
}

}  // namespace hmfx
