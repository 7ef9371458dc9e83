#include "hmfx/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "hmfx/error.hpp"
#include "hmfx/io.hpp"

namespace hmfx {

namespace {

BoundaryMap projected_path(const BoundaryMap& base, double sigma) {
  const int m = base.components();
  if (sigma <= 0.0) return base;
  auto fn = [base, sigma, m](const Vec3& omega, double* out) {
    base(omega, out);
    double sq = 0;
    for (int c = 0; c < m; ++c) {
      out[c] *= (1 - sigma);
      if (c == m - 1) out[c] += sigma;
      sq += out[c] * out[c];
    }
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) fail(ErrorKind::GeometryDomain, "projected homotopy passes through 0");
    for (int c = 0; c < m; ++c) out[c] /= norm;
  };
  return BoundaryMap(base.name() + "@sigma", m, fn, base.smoothness());
}

}  // namespace

BoundaryMap::BoundaryMap(std::string name, int components, Fn fn, Smoothness smoothness, Path path)
    : name_(std::move(name)), m_(components), fn_(std::move(fn)), smoothness_(smoothness),
      path_(std::move(path)) {}

BoundaryMap BoundaryMap::constant(std::vector<double> point) {
  double sq = 0;
  for (double v : point) sq += v * v;
  if (point.size() < 2 || std::abs(sq - 1) > 1e-12)
    fail(ErrorKind::GeometryDomain, "constant boundary map must be a unit vector");
  const int m = static_cast<int>(point.size());
  auto fn = [point](const Vec3&, double* out) { std::copy(point.begin(), point.end(), out); };
  auto path = [point](double) { return BoundaryMap::constant(point); };
  return BoundaryMap("constant", m, fn, Smoothness::Smooth, path);
}

BoundaryMap BoundaryMap::corotational(double h_inf) {
  const double s = std::sin(h_inf), c = std::cos(h_inf);
  auto fn = [s, c](const Vec3& w, double* out) {
    out[0] = s * w.x();
    out[1] = s * w.y();
    out[2] = s * w.z();
    out[3] = c;
  };
  auto path = [h_inf](double sigma) { return BoundaryMap::corotational((1 - sigma) * h_inf); };
  return BoundaryMap("corotational", 4, fn, Smoothness::Smooth, path);
}

BoundaryMap BoundaryMap::equator() {
  BoundaryMap map = corotational(std::numbers::pi / 2);
  map.name_ = "equator";
  return map;
}

BoundaryMap BoundaryMap::identity_sphere() {
  auto fn = [](const Vec3& w, double* out) {
    out[0] = w.x();
    out[1] = w.y();
    out[2] = w.z();
  };
  BoundaryMap map("identity-sphere", 3, fn, Smoothness::Smooth);
  map.path_ = [map](double sigma) { return projected_path(map, sigma); };
  return map;
}

BoundaryMap BoundaryMap::lipschitz_wedge(double amplitude) {
  auto fn = [amplitude](const Vec3& w, double* out) {
    const double a = amplitude * std::abs(w.z());
    out[0] = std::sin(a);
    out[1] = 0.0;
    out[2] = std::cos(a);
  };
  auto path = [amplitude](double sigma) {
    return BoundaryMap::lipschitz_wedge((1 - sigma) * amplitude);
  };
  return BoundaryMap("lipschitz-wedge", 3, fn, Smoothness::Lipschitz, path);
}

BoundaryMap BoundaryMap::from_csv(const std::filesystem::path& path) {
  const NumericCsv csv = read_numeric_csv(path);
  const std::size_t ct = csv.column("theta"), cp = csv.column("phi"), cu = csv.column("u1");
  const int m = static_cast<int>(csv.header.size() - cu);
  std::map<double, int> thetas, phis;
  for (const auto& row : csv.rows) {
    thetas.emplace(row[ct], 0);
    phis.emplace(row[cp], 0);
  }
  const int nt = static_cast<int>(thetas.size()), np = static_cast<int>(phis.size());
  if (static_cast<std::size_t>(nt) * np != csv.rows.size() || nt < 2 || np < 4)
    fail(ErrorKind::Io, "boundary csv is not a full theta x phi product grid");
  int idx = 0;
  for (auto& [k, v] : thetas) v = idx++;
  idx = 0;
  for (auto& [k, v] : phis) v = idx++;
  std::vector<double> th, ph;
  for (auto& [k, v] : thetas) th.push_back(k);
  for (auto& [k, v] : phis) ph.push_back(k);
  auto values = std::make_shared<std::vector<double>>(csv.rows.size() * m);
  for (const auto& row : csv.rows) {
    const std::size_t node = static_cast<std::size_t>(thetas[row[ct]]) * np + phis[row[cp]];
    double sq = 0;
    for (int c = 0; c < m; ++c) sq += row[cu + c] * row[cu + c];
    if (std::abs(sq - 1) > 1e-8) fail(ErrorKind::GeometryDomain, "boundary csv value not on the sphere");
    for (int c = 0; c < m; ++c) (*values)[node * m + c] = row[cu + c];
  }
  auto fn = [values, th, ph, m, nt, np](const Vec3& w, double* out) {
    const double theta = std::acos(std::clamp(w.z(), -1.0, 1.0));
    double phi = std::atan2(w.y(), w.x());
    if (phi < 0) phi += 2 * std::numbers::pi;
    const int j = std::clamp(
        static_cast<int>(std::upper_bound(th.begin(), th.end(), theta) - th.begin()) - 1, 0, nt - 2);
    const double b = std::clamp((theta - th[j]) / (th[j + 1] - th[j]), 0.0, 1.0);
    int k = static_cast<int>(std::upper_bound(ph.begin(), ph.end(), phi) - ph.begin()) - 1;
    if (k < 0) k = np - 1;
    const int k1 = (k + 1) % np;
    double span = ph[k1] - ph[k];
    if (span <= 0) span += 2 * std::numbers::pi;
    double off = phi - ph[k];
    if (off < 0) off += 2 * std::numbers::pi;
    const double a = std::clamp(off / span, 0.0, 1.0);
    double sq = 0;
    for (int c = 0; c < m; ++c) {
      const auto v = [&](int jj, int kk) { return (*values)[(static_cast<std::size_t>(jj) * np + kk) * m + c]; };
      out[c] = (1 - b) * ((1 - a) * v(j, k) + a * v(j, k1)) + b * ((1 - a) * v(j + 1, k) + a * v(j + 1, k1));
      sq += out[c] * out[c];
    }
    const double norm = std::sqrt(sq);
    for (int c = 0; c < m; ++c) out[c] /= norm;
  };
  BoundaryMap map("csv:" + path.filename().string(), m, fn, Smoothness::Lipschitz);
  map.path_ = [map](double sigma) { return projected_path(map, sigma); };
  return map;
}

void BoundaryMap::at(const Vec3& x, double* out) const {
  const double r = x.norm();
  if (r == 0.0) fail(ErrorKind::SingularPoint, "boundary map is undefined at the origin");
  fn_(x / r, out);
}

double BoundaryMap::gradient_sq(const Vec3& x) const {
  const double r = x.norm();
  if (r == 0.0) fail(ErrorKind::SingularPoint, "boundary map gradient is undefined at the origin");
  const Vec3 w = x / r;
  Vec3 e1 = std::abs(w.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (e1 - e1.dot(w) * w).normalized();
  const Vec3 e2 = w.cross(e1);
  const double h = 1e-5;
  std::vector<double> a(m_), b(m_);
  double total = 0;
  for (const Vec3& e : {e1, e2}) {
    fn_((w + h * e).normalized(), a.data());
    fn_((w - h * e).normalized(), b.data());
    for (int c = 0; c < m_; ++c) {
      const double d = (a[c] - b[c]) / (2 * h);
      total += d * d;
    }
  }
  return total / (r * r);
}

BoundaryMap BoundaryMap::along_path(double sigma) const {
  if (sigma < 0 || sigma > 1) fail(ErrorKind::Config, "homotopy parameter must lie in [0, 1]");
  if (sigma == 0.0) return *this;
  if (path_) return path_(sigma);
  return projected_path(*this, sigma);
}

}  // namespace hmfx
