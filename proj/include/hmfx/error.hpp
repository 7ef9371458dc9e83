#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hmfx {

enum class ErrorKind {
  Grid,
  DomainExceeded,
  GeometryDomain,
  Tangency,
  SingularPoint,
  TimeOrder,
  Accuracy,
  ShootingDiverged,
  NotAttained,
  NonConvergence,
  PartialResult,
  NearAmbientOrigin,
  LinearSolve,
  Divergence,
  Window,
  Support,
  Regularity,
  Config,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Thrown by solve_corot when no slope reaches the requested limit angle.
class NotAttainedError : public Error {
 public:
  NotAttainedError(const std::string& what, double lo, double hi)
      : Error(ErrorKind::NotAttained, what), reachable_lo(lo), reachable_hi(hi) {}
  double reachable_lo;
  double reachable_hi;
};

/// Carries the last iterate so callers can inspect a stalled Newton solve.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> last, double residual)
      : Error(ErrorKind::NonConvergence, what), last_iterate(std::move(last)),
        last_residual(residual) {}
  std::vector<double> last_iterate;
  double last_residual;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<double> ratios)
      : Error(ErrorKind::Divergence, what), contraction_ratios(std::move(ratios)) {}
  std::vector<double> contraction_ratios;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace hmfx
