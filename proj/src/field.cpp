#include "hmfx/field.hpp"

#include <cmath>
#include <numbers>

#include "hmfx/error.hpp"
#include "hmfx/io.hpp"
#include "hmfx/numerics.hpp"

namespace hmfx {

MapField::MapField(SpaceGridPtr grid, int components)
    : grid_(std::move(grid)), m_(components),
      values_(grid_->node_count() * static_cast<std::size_t>(components), 0.0) {
  if (components < 1) fail(ErrorKind::Grid, "field needs at least one component");
}

MapField MapField::sample(SpaceGridPtr grid, int components, const Sampler& fn, Exec exec) {
  MapField f(std::move(grid), components);
  const SpaceGrid& g = f.grid();
  const std::size_t per_shell = g.sphere.size();
  const int np = g.sphere.n_phi();
  fn(Vec3::Zero(), f.node_values(0));
  for_each_index(exec, (g.radial.size() - 1) * per_shell, [&](std::size_t idx) {
    const std::size_t i = idx / per_shell + 1;
    const std::size_t rest = idx % per_shell;
    const int j = static_cast<int>(rest / np), k = static_cast<int>(rest % np);
    fn(g.position(i, j, k), f.at(i, j, k));
  });
  f.sync_center();
  return f;
}

void MapField::sync_center() {
  const std::size_t per_shell = grid_->sphere.size();
  for (std::size_t q = 1; q < per_shell; ++q)
    for (int c = 0; c < m_; ++c) values_[q * m_ + c] = values_[c];
}

void MapField::interpolate(const Vec3& x, double* out) const {
  for (int c = 0; c < m_; ++c) out[c] = 0.0;
  for (const auto& tap : grid_->interpolation_taps(x)) {
    const double* v = node_values(tap.node);
    for (int c = 0; c < m_; ++c) out[c] += tap.weight * v[c];
  }
}

MapField& MapField::operator+=(const MapField& other) {
  if (other.values_.size() != values_.size()) fail(ErrorKind::Grid, "field shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

MapField& MapField::operator-=(const MapField& other) {
  if (other.values_.size() != values_.size()) fail(ErrorKind::Grid, "field shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

MapField& MapField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

MapField operator+(MapField a, const MapField& b) { return a += b; }
MapField operator-(MapField a, const MapField& b) { return a -= b; }

GradientField::GradientField(SpaceGridPtr grid, int components)
    : grid_(std::move(grid)), m_(components),
      values_(grid_->node_count() * static_cast<std::size_t>(components) * 3, 0.0) {}

void GradientField::interpolate(const Vec3& x, double* out) const {
  const int w = 3 * m_;
  for (int c = 0; c < w; ++c) out[c] = 0.0;
  for (const auto& tap : grid_->interpolation_taps(x)) {
    const double* v = jacobian(tap.node);
    for (int c = 0; c < w; ++c) out[c] += tap.weight * v[c];
  }
}

GradientField gradient(const MapField& field, Exec exec) {
  const SpaceGrid& g = field.grid();
  const SphereGrid& s = g.sphere;
  const int m = field.components();
  const int nt = s.n_theta(), np = s.n_phi();
  GradientField out(field.grid_ptr(), m);

  {
    // Center: least-squares linear fit over the first shell.
    std::vector<double> b(3 * m, 0.0);
    const double r1 = g.radial[1];
    const double* u0 = field.node_values(0);
    for (int j = 0; j < nt; ++j)
      for (int k = 0; k < np; ++k) {
        const Vec3 w = s.direction(j, k);
        const double* u = field.at(1, j, k);
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < 3; ++d) b[3 * c + d] += s.weight(j) * (u[c] - u0[c]) * w[d] / r1;
      }
    const auto& minv = s.moment_inverse();
    double* jac = out.jacobian(0);
    for (int c = 0; c < m; ++c)
      for (int d = 0; d < 3; ++d) {
        double acc = 0;
        for (int e = 0; e < 3; ++e) acc += minv(d, e) * b[3 * c + e];
        jac[3 * c + d] = acc;
      }
    for (std::size_t q = 1; q < s.size(); ++q)
      std::copy(jac, jac + 3 * m, out.jacobian(q));
  }

  const std::size_t per_shell = s.size();
  const double dth = s.dtheta_denominator(), dph = s.dphi_denominator();
  for_each_index(exec, (g.radial.size() - 1) * per_shell, [&](std::size_t idx) {
    const std::size_t i = idx / per_shell + 1;
    const int j = static_cast<int>((idx % per_shell) / np);
    const int k = static_cast<int>(idx % np);
    const double r = g.radial[i];
    const std::size_t first = g.radial_first(i);
    const auto& w1 = g.radial_d1(i);
    const double st = s.sin_theta(j), ct = s.cos_theta(j);
    const double sp = std::sin(s.phi(k)), cp = std::cos(s.phi(k));
    const Vec3 rhat(st * cp, st * sp, ct), that(ct * cp, ct * sp, -st), phat(-sp, cp, 0.0);

    const double* north = j > 0 ? field.at(i, j - 1, k) : field.at(i, 0, s.across_pole(k));
    const double* south = j < nt - 1 ? field.at(i, j + 1, k) : field.at(i, nt - 1, s.across_pole(k));
    const double* east = field.at(i, j, s.wrap(k + 1));
    const double* west = field.at(i, j, s.wrap(k - 1));
    double* jac = out.jacobian(g.node(i, j, k));
    for (int c = 0; c < m; ++c) {
      double ur = 0;
      for (std::size_t q = 0; q < w1.size(); ++q) ur += w1[q] * field.at(first + q, j, k)[c];
      const double ut = (south[c] - north[c]) / dth;
      const double up = (east[c] - west[c]) / dph;
      for (int d = 0; d < 3; ++d)
        jac[3 * c + d] = ur * rhat[d] + ut / r * that[d] + up / (r * st) * phat[d];
    }
  });
  return out;
}

double weighted_sup_norm(const MapField& field, double p) {
  const SpaceGrid& g = field.grid();
  const int m = field.components();
  const std::size_t per_shell = g.sphere.size();
  double best = 0.0;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const double r = g.radial[node / per_shell];
    const double* v = field.node_values(node);
    double sq = 0;
    for (int c = 0; c < m; ++c) sq += v[c] * v[c];
    if (std::isnan(sq)) fail(ErrorKind::Accuracy, "weighted_sup_norm: NaN in field");
    best = std::max(best, std::pow(1 + r, p) * std::sqrt(sq));
  }
  return best;
}

double weighted_sup_norm(const GradientField& grad, double p) {
  const SpaceGrid& g = grad.grid();
  const int w = 3 * grad.components();
  const std::size_t per_shell = g.sphere.size();
  double best = 0.0;
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    const double r = g.radial[node / per_shell];
    const double* v = grad.jacobian(node);
    double sq = 0;
    for (int c = 0; c < w; ++c) sq += v[c] * v[c];
    if (std::isnan(sq)) fail(ErrorKind::Accuracy, "weighted_sup_norm: NaN in gradient");
    best = std::max(best, std::pow(1 + r, p) * std::sqrt(sq));
  }
  return best;
}

double quadrature_ball(const MapField& scalar, const Vec3& center, double radius, int order) {
  if (!(radius > 0)) fail(ErrorKind::Config, "quadrature_ball: radius must be positive");
  if (center.norm() + radius > scalar.grid().radial.r_max() * (1 + 1e-12))
    fail(ErrorKind::DomainExceeded, "quadrature_ball: ball leaves the grid");
  const auto radial = gauss_legendre(order, 0.0, radius);
  const auto polar = gauss_legendre(order, -1.0, 1.0);
  const int n_az = 2 * order;
  const int m = scalar.components();
  std::vector<double> value(m);
  double sum = 0, mass = 0;
  for (int a = 0; a < order; ++a) {
    const double rho = radial.nodes[a];
    for (int b = 0; b < order; ++b) {
      const double c = polar.nodes[b], sn = std::sqrt(1 - c * c);
      for (int q = 0; q < n_az; ++q) {
        const double ang = 2 * std::numbers::pi * (q + 0.5) / n_az;
        const Vec3 x = center + rho * Vec3(sn * std::cos(ang), sn * std::sin(ang), c);
        const double w = radial.weights[a] * rho * rho * polar.weights[b];
        scalar.interpolate(x, value.data());
        sum += w * value[0];
        mass += w;
      }
    }
  }
  return sum / mass;
}

void write_field(const MapField& field, const std::filesystem::path& csv_path,
                 const std::filesystem::path& json_path) {
  const SpaceGrid& g = field.grid();
  const int m = field.components();
  std::vector<std::string> header{"i", "j", "k", "r", "theta", "phi"};
  for (int c = 0; c < m; ++c) header.push_back("u" + std::to_string(c + 1));
  CsvTable table(header);
  for (std::size_t i = 0; i < g.radial.size(); ++i)
    for (int j = 0; j < g.sphere.n_theta(); ++j)
      for (int k = 0; k < g.sphere.n_phi(); ++k) {
        std::vector<double> row{static_cast<double>(i), static_cast<double>(j),
                                static_cast<double>(k), g.radial[i], g.sphere.theta(j),
                                g.sphere.phi(k)};
        const double* v = field.at(i, j, k);
        row.insert(row.end(), v, v + m);
        table.add_row(row);
      }
  table.write(csv_path);
  Json meta;
  meta["kind"] = "map-field";
  meta["components"] = m;
  meta["n_theta"] = g.sphere.n_theta();
  meta["n_phi"] = g.sphere.n_phi();
  meta["radial_spacing"] = g.radial.spacing();
  meta["radial_stretch"] = g.radial.stretch();
  meta["radial_nodes"] = g.radial.nodes();
  write_json_atomic(json_path, meta);
}

MapField read_field(const std::filesystem::path& csv_path, const std::filesystem::path& json_path) {
  const Json meta = read_json(json_path);
  const int m = meta.at("components").get<int>();
  auto radial = RadialGrid::from_nodes(meta.at("radial_nodes").get<std::vector<double>>());
  SphereGrid sphere(meta.at("n_theta").get<int>(), meta.at("n_phi").get<int>());
  auto grid = make_space_grid(std::move(radial), std::move(sphere));
  MapField field(grid, m);
  const NumericCsv csv = read_numeric_csv(csv_path);
  if (csv.rows.size() != grid->node_count())
    fail(ErrorKind::Io, "field csv row count does not match the grid");
  const std::size_t first = csv.column("u1");
  for (const auto& row : csv.rows) {
    const auto i = static_cast<std::size_t>(row[0]);
    const int j = static_cast<int>(row[1]), k = static_cast<int>(row[2]);
    double* v = field.at(i, j, k);
    for (int c = 0; c < m; ++c) v[c] = row[first + c];
  }
  return field;
}

}  // namespace hmfx
