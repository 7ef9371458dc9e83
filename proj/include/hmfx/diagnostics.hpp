#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmfx/exec.hpp"
#include "hmfx/field.hpp"
#include "hmfx/io.hpp"
#include "hmfx/profile.hpp"
#include "hmfx/target.hpp"

namespace hmfx {

using PointN = Eigen::VectorXd;

/// Self-similar solution u(x, t) = U(x / √t); the view evaluates U (t = 1).
class ExpanderView {
 public:
  virtual ~ExpanderView() = default;
  virtual int dimension() const = 0;
  virtual int components() const = 0;
  /// Scalar integrands built from U are invariant under rotations about any
  /// line through the origin, so ball integrals reduce to two variables.
  virtual bool equivariant() const { return false; }
  virtual bool singular_center() const { return false; }
  /// Largest |y| at which U is available.
  virtual double reach() const = 0;
  virtual void value(const PointN& y, double* u) const = 0;
  /// m × n matrix of partial derivatives.
  virtual Eigen::MatrixXd jacobian(const PointN& y) const = 0;
  /// |∇u_0|² of the 0-homogeneous boundary data at x.
  virtual double boundary_gradient_sq(const PointN& x) const = 0;
};

struct RadialPair {
  double psi = 0, dpsi = 0, phi = 1, dphi = 0;
};

/// U(y) = (ψ(|y|) y/|y|, φ(|y|)) in R^n with values in R^{n+1}.
class CorotationalView final : public ExpanderView {
 public:
  using Evaluator = std::function<RadialPair(double r)>;

  CorotationalView(int n, Evaluator eval, double boundary_angle, bool singular_center = false,
                   double reach = std::numeric_limits<double>::infinity());

  /// Six-point local interpolation of the grid profile; past R_max the
  /// asymptotic series of the given order takes over.
  static CorotationalView from_profile(const CorotationalProfile& p, int series_order = 3);
  /// ψ ≡ 1, φ ≡ 0.
  static CorotationalView equator(int n);
  /// U ≡ (0, 1).
  static CorotationalView constant(int n);

  int dimension() const override { return n_; }
  int components() const override { return n_ + 1; }
  bool equivariant() const override { return true; }
  bool singular_center() const override { return singular_; }
  double reach() const override { return reach_; }
  void value(const PointN& y, double* u) const override;
  Eigen::MatrixXd jacobian(const PointN& y) const override;
  double boundary_gradient_sq(const PointN& x) const override;

  RadialPair radial(double r) const { return eval_(r); }
  double boundary_angle() const { return angle_; }

 private:
  int n_;
  Evaluator eval_;
  double angle_;
  bool singular_;
  double reach_;
};

/// Full-grid field in R^3, trilinear values and interpolated gradients.
/// Boundary data come from the tangential gradient on the outer shell.
class FieldView final : public ExpanderView {
 public:
  explicit FieldView(MapField u, Exec exec = Exec::Serial);

  int dimension() const override { return 3; }
  int components() const override { return u_.components(); }
  double reach() const override { return u_.grid().radial.r_max(); }
  void value(const PointN& y, double* u) const override;
  Eigen::MatrixXd jacobian(const PointN& y) const override;
  double boundary_gradient_sq(const PointN& x) const override;

 private:
  MapField u_;
  GradientField grad_;
  MapField boundary_;  // |∇_S U|² on the outer shell times R², stored on every shell
};

enum class Penalty { None, GinzburgLandau, ChenStruwe };

struct EnergyModel {
  Penalty penalty = Penalty::None;
  double K = 0;
  Cutoff chi = Cutoff();

  /// Penalty density at t = 1: K/2 (1-|u|²)² (GL) or K χ(d²) (CS).
  double penalty_density(const double* u, int m) const;
  static EnergyModel for_profile(const CorotationalProfile& p);
};

/// e_K(u)(x, t) = e_1(x/√t) / t with e_1 = ½(|∇U|² + penalty).
double energy_density(const ExpanderView& view, const EnergyModel& model, const PointN& x,
                      double t);
/// Penalty part alone (second summand of e_K, halved), same scaling.
double penalty_energy(const ExpanderView& view, const EnergyModel& model, const PointN& x,
                      double t);
/// Per-node e_K at time t: node y carries e_K(√t y, t).
MapField pointwise_energy(const MapField& u, const EnergyModel& model, double t,
                          Exec exec = Exec::Serial);

struct BallQuadrature {
  std::vector<PointN> points;
  std::vector<double> weights;
  double volume() const;
};

struct BallRuleOptions {
  double inner = 0;     // shell inner radius
  int order = 8;        // Gauss points per radial panel and per angle
  double scale = 0;     // > 0: radial panels refined geometrically toward the center
  bool reduced = true;  // use the two-variable rule when the integrand allows it
  std::vector<double> breaks;  // extra panel ends, e.g. where a cutoff turns on
};

/// Quadrature on {inner ≤ |x - c| ≤ radius} ⊂ R^n. The reduced rule samples the
/// half plane spanned by the axis through 0 and c and carries the
/// |S^{n-2}| sin^{n-2} weight; the full rule exists for n = 3 only.
BallQuadrature ball_quadrature(int n, const PointN& center, double radius,
                               const BallRuleOptions& opt = {});

/// ⨏_{B(x0, radius)} e_K(u)(x, t) dx.
double local_energy(const ExpanderView& view, const EnergyModel& model, double t,
                    const PointN& x0, double radius = 1.0, int order = 8);

/// φ_{x0}: 1 on B(x0, 1), 0 outside B(x0, 2), quintic in between.
double probe_cutoff(double dist);
double probe_cutoff_derivative(double dist);

double phi_functional(const ExpanderView& view, const EnergyModel& model, const PointN& x0,
                      double t0, double R);
double psi_functional(const ExpanderView& view, const EnergyModel& model, const PointN& x0,
                      double t0, double R);

struct MonotonicityTable {
  PointN x0;
  double t0 = 1;
  std::vector<double> radii, phi, psi;
  double boundary_norm = 0;  // ‖∇u_0‖²_{L²(B(x0, 2))}
  double slack = 0.05;
  double max_phi_drop = 0;   // max over R < R' of Φ(R) - Φ(R')
  double max_psi_drop = 0;
  int violations = 0;        // pairs exceeding slack (R' - R) ‖∇u_0‖²
};

MonotonicityTable monotonicity_table(const ExpanderView& view, const EnergyModel& model,
                                     const PointN& x0, double t0, std::span<const double> radii,
                                     double slack = 0.05, Exec exec = Exec::Serial);

/// ζ(x) = b(|x - c|/ρ)(x - c) and θ(x, t) = t b(|x - c|/ρ), b a quintic bump
/// equal to 1 on [0, 1/2] and 0 past 1.
struct TestFields {
  PointN center;
  double radius = 1;
};

struct PohozaevReport {
  double lhs = 0, divergence_term = 0, lie_term = 0, residual = 0;  // vector-field identity
  double energy_lhs = 0, energy_rhs = 0, energy_residual = 0;       // scalar identity
};

/// Both identities integrated over B(c, ρ) × [t1, t2]; residuals are
/// |LHS - RHS| / (|LHS| + |T1| + |T2| + ε).
PohozaevReport pohozaev_residual(const ExpanderView& view, const EnergyModel& model,
                                 const TestFields& fields, double t1, double t2, int order = 8,
                                 double eps = 1e-14);

struct RegularityOptions {
  double eps0 = 0.02;
  double delta = 0.25;
  double C = 10;
};

struct ProbeResult {
  PointN x0;
  double R = 0;
  double psi = 0;
  bool flagged = false;
  double sup_energy = 0;  // over P_{δR}(x0, 1), unflagged probes only
  double bound = 0;       // C (δR)^{-2}
  bool verified = false;
};

std::vector<ProbeResult> eps_regularity_scan(const ExpanderView& view, const EnergyModel& model,
                                             std::span<const PointN> probes, double R,
                                             const RegularityOptions& opt = {},
                                             Exec exec = Exec::Serial);

struct BochnerReport {
  std::vector<double> ratios;  // ((∂_t - Δ) e) / e² per used sample
  std::size_t skipped = 0;     // samples with e ≤ 1e-10
  double max_ratio = -std::numeric_limits<double>::infinity();
  double bound = 0;
  bool bounded = true;
};

BochnerReport bochner_check(const ExpanderView& view, const EnergyModel& model,
                            std::span<const PointN> samples, double C = 10,
                            Exec exec = Exec::Serial);

struct ShiReport {
  double lhs = 0;             // sup_{B(x0, r/2)} |∇²U|²
  double rhs = 0;             // C(1 + r⁻² + |x0|/r + S1 + S2) S2
  double ratio = 0;
  double sup_grad = 0, sup_grad_sq = 0;
  double decay_constant = 0;  // sup_{B(x0, r)} |x| |∇U|
};

/// Rejects balls B(x0, 2r) that meet a flagged probe or a singular center.
ShiReport shi_bound_check(const ExpanderView& view, const PointN& x0, double r, double C = 10,
                          std::span<const ProbeResult> scan = {});

struct EnergyInequalityRow {
  double t = 0, energy = 0, boundary_energy = 0, slack = 0;
};

/// E_{K,x0}(u(t)) against ⨏_{B(x0,1)} ½|∇u_0|²; slack = E/E_0 - 1.
std::vector<EnergyInequalityRow> energy_inequality(const ExpanderView& view,
                                                   const EnergyModel& model, const PointN& x0,
                                                   std::span<const double> times);

struct AnnulusTail {
  std::vector<double> radii, tail, boundary_tail;  // R^{2-n} ∫_{R<|x|<2R}
  double A = 0, B = 0, residual = 0;               // tail ≈ A boundary_tail + B/R
};

AnnulusTail annulus_tail(const ExpanderView& view, const EnergyModel& model, double t,
                         std::span<const double> radii);

Json verdict(const std::string& check, double value, double tolerance, bool pass);
CsvTable monotonicity_csv(const MonotonicityTable& table);
CsvTable probe_csv(std::span<const ProbeResult> probes);

}  // namespace hmfx
