#include "hmfx/profile.hpp"

#include <cmath>

#include "hmfx/error.hpp"
#include "hmfx/io.hpp"

namespace hmfx {

double CorotationalProfile::angle(std::size_t i) const {
  return form == Form::Angle ? h[i] : std::atan2(psi[i], phi[i]);
}

double CorotationalProfile::modulus(std::size_t i) const {
  return form == Form::Angle ? 1.0 : std::hypot(psi[i], phi[i]);
}

double CorotationalProfile::radial_component(std::size_t i) const {
  return form == Form::Angle ? std::sin(h[i]) : psi[i];
}

double CorotationalProfile::axial_component(std::size_t i) const {
  return form == Form::Angle ? std::cos(h[i]) : phi[i];
}

void write_profile(const CorotationalProfile& p, const std::filesystem::path& csv_path,
                   const std::filesystem::path& json_path) {
  const bool angle = p.form == CorotationalProfile::Form::Angle;
  CsvTable table(angle ? std::vector<std::string>{"r", "h"}
                       : std::vector<std::string>{"r", "psi", "phi"});
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (angle)
      table.add_row(std::vector<double>{p.grid[i], p.h[i]});
    else
      table.add_row(std::vector<double>{p.grid[i], p.psi[i], p.phi[i]});
  }
  table.write(csv_path);
  Json meta;
  meta["kind"] = "corotational-profile";
  meta["form"] = angle ? "angle" : "modulus";
  meta["n"] = p.n;
  meta["K"] = p.K;
  meta["limit_angle"] = p.limit_angle;
  meta["slope_at_origin"] = p.slope;
  meta["residual"] = p.residual;
  meta["newton_iterations"] = p.newton_iterations;
  meta["singular_center"] = p.singular_center;
  meta["radial_spacing"] = p.grid.spacing();
  meta["radial_stretch"] = p.grid.stretch();
  write_json_atomic(json_path, meta);
}

CorotationalProfile read_profile(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& json_path) {
  const Json meta = read_json(json_path);
  if (meta.value("kind", "") != "corotational-profile")
    fail(ErrorKind::Io, json_path.string() + " is not a corotational profile");
  const NumericCsv csv = read_numeric_csv(csv_path);
  std::vector<double> r;
  for (const auto& row : csv.rows) r.push_back(row[csv.column("r")]);
  const double spacing = meta.value("radial_spacing", 0.0);
  const double stretch = meta.value("radial_stretch", 0.0);
  RadialGrid grid = RadialGrid::from_nodes(r);
  if (spacing > 0) {
    // Regenerate the mapping so refined() works; nodes must agree.
    RadialGrid regen = RadialGrid::graded_intervals(stretch, r.back(), r.size() - 1);
    bool same = true;
    for (std::size_t i = 0; i < r.size(); ++i) same = same && std::abs(regen[i] - r[i]) <= 1e-12 * (1 + r[i]);
    if (same) grid = regen;
  }
  CorotationalProfile p{grid};
  p.n = meta.at("n").get<int>();
  p.K = meta.value("K", 0.0);
  p.limit_angle = meta.value("limit_angle", 0.0);
  p.slope = meta.value("slope_at_origin", 0.0);
  p.residual = meta.value("residual", 0.0);
  p.newton_iterations = meta.value("newton_iterations", 0);
  p.singular_center = meta.value("singular_center", false);
  if (meta.at("form") == "angle") {
    p.form = CorotationalProfile::Form::Angle;
    for (const auto& row : csv.rows) p.h.push_back(row[csv.column("h")]);
  } else {
    p.form = CorotationalProfile::Form::Modulus;
    for (const auto& row : csv.rows) {
      p.psi.push_back(row[csv.column("psi")]);
      p.phi.push_back(row[csv.column("phi")]);
    }
  }
  return p;
}

}  // namespace hmfx
