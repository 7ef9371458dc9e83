#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hmfx/exec.hpp"
#include "hmfx/field.hpp"
#include "hmfx/target.hpp"

namespace hmfx {

/// ‖V‖_X = sup (1+|x|)² |V| + sup (1+|x|)³ |∇V|.
double x_norm(const MapField& v, Exec exec = Exec::Serial);

/// Q(U0, V) = -K χ'(d²(U0)) ⟨ν, V⟩ ν + K χ'(d²(U0+V)) ∇(d²/2)(U0+V), ν = U0/|U0|.
MapField assemble_Q(const MapField& u0, const MapField& v, double K, const Cutoff& chi = Cutoff(),
                    Exec exec = Exec::Serial);

struct LinearSolveOptions {
  double tolerance = 1e-9;  // relative true residual
  int restart = 20;
  int max_iterations = 400;
  Exec exec = Exec::Serial;
};

struct LinearSolveReport {
  int iterations = 0;
  double relative_residual = 0;
};

/// Δ_f^h W - K χ'(d²(U0)) ⟨ν, W⟩ ν on the grid ball, with W = 0 from the shell
/// nearest to `radius` outward. Unknowns are packed as the center followed by
/// shells 1 .. boundary_shell()-1.
class DirichletSolver {
 public:
  DirichletSolver(const MapField& u0, double K, double radius, const Cutoff& chi = Cutoff());

  std::size_t size() const { return size_; }
  std::size_t boundary_shell() const { return nr_; }
  const SpaceGrid& grid() const { return *grid_; }

  Eigen::VectorXd pack(const MapField& f) const;
  MapField unpack(const Eigen::VectorXd& x) const;
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y, Exec exec) const;
  /// Exact inverse of the operator with χ'(d²(U0)) replaced by its shell
  /// average and ν by its normalized mean; the identity when K = 0 is exact.
  void precondition(const Eigen::VectorXd& r, Eigen::VectorXd& z) const;

  MapField solve(const MapField& rhs, const LinearSolveOptions& opt = {},
                 LinearSolveReport* report = nullptr) const;

 private:
  void solve_scalar(std::vector<double>& field, bool penalized) const;

  SpaceGridPtr grid_;
  int m_;
  std::size_t nr_, size_;
  std::vector<double> c_;  // K χ'(d²(U0)) per node
  std::vector<double> nu_;  // unit normal per node, m entries
  std::vector<double> nu_bar_;
  bool use_penalty_ = false;
  std::vector<double> c_bar_;  // per shell, index 0 = center
  Eigen::MatrixXd dft_;         // real orthonormal azimuthal basis, columns = modes
  std::vector<int> wavenumber_;
  std::vector<Eigen::MatrixXd> theta_basis_;  // per wavenumber, orthonormal in the weighted sense
  std::vector<Eigen::VectorXd> theta_eigen_;
  Eigen::VectorXd sqrt_w_;
  int const_index_ = 0;
  double const_value_ = 0;  // node value of the unit constant mode
  std::vector<double> lo_, di_, up_;  // radial rows 1 .. nr-1
};

MapField solve_linear_dirichlet(const MapField& q, const MapField& u0, double K, double radius,
                                const LinearSolveOptions& opt = {}, LinearSolveReport* report = nullptr,
                                const Cutoff& chi = Cutoff());

/// max f |W| / ‖Q‖_X with f = |x|²/4 + 3/2.
double barrier_ratio(const MapField& w, double q_norm);

struct PicardOptions {
  int max_iterations = 40;
  double tolerance = 1e-8;  // on ‖V_{j+1} - V_j‖_X
  double radius = 0;        // 0 selects the outer shell
  LinearSolveOptions linear;
  Cutoff chi = Cutoff();
};

struct PicardStep {
  int iteration = 0;
  double step_norm = 0;
  double ratio = 0;  // NaN for the first step
  double v_norm = 0;
  double q_norm = 0;
  int linear_iterations = 0;
  double linear_residual = 0;
  double barrier_ratio = 0;
};

struct FixedPointState {
  FixedPointState(double sigma, double K, MapField u0)
      : sigma(sigma), K(K), u0(u0), v(u0.grid_ptr(), u0.components()) {}
  double sigma;
  double K;
  MapField u0;
  MapField v;
  double v_norm = 0;
  bool converged = false;
  std::vector<PicardStep> ledger;
};

/// One application of F_K^σ: solve with right side Q(U0, V) - Δ_f^h U0.
MapField fixed_point_map(const DirichletSolver& solver, const MapField& u0, const MapField& v,
                         double K, const PicardOptions& opt, PicardStep* step = nullptr);

/// Iterates V ← F(V) until the X-norm step drops below tolerance. Three
/// consecutive contraction ratios >= 1 raise a divergence error carrying them.
FixedPointState picard_iterate(FixedPointState state, const PicardOptions& opt = PicardOptions());

/// sup over the ball of |-Δ_f^h U + K χ'(d²(U)) ∇(d²/2)(U)|.
double static_residual(const MapField& u, double K, double radius = 0, const Cutoff& chi = Cutoff(),
                       Exec exec = Exec::Serial);

struct DecayReport {
  double sup_fv = 0;        // sup f |V|
  double sup_f32_grad = 0;  // sup f^{3/2} |∇V|
  double v_slope = 0;
  double grad_slope = 0;
};
/// Slopes are fitted to the per-shell maxima on [lo, hi].
DecayReport verify_decay(const MapField& v, double lo, double hi, Exec exec = Exec::Serial);

/// ‖Q(U0, tV̂)‖_X ≈ a + b t + c t² over the samples t, with V̂ of unit X-norm.
struct QShapeFit {
  std::vector<double> v_norms, q_norms;
  double a = 0, b = 0, c = 0;
  double r_squared = 0;
};
QShapeFit q_shape(const MapField& u0, const MapField& direction, double K, const std::vector<double>& t,
                  const Cutoff& chi = Cutoff(), Exec exec = Exec::Serial);

/// Smooth decaying test field with random coefficients, scaled to X-norm 1.
MapField random_decaying_field(const SpaceGridPtr& grid, int m, unsigned seed, double radius = 0);

/// max over random pairs V1, V2 with ‖V‖_X <= eps of
/// ‖F(V1) - F(V2)‖_X / ‖V1 - V2‖_X, and the same ratio for Q.
struct ContractionSample {
  double eps = 0;
  double map_ratio = 0;
  double q_ratio = 0;
};
ContractionSample contraction_sample(const DirichletSolver& solver, const MapField& u0, double K,
                                     double eps, int pairs, unsigned seed, const PicardOptions& opt);

}  // namespace hmfx
