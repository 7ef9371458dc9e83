#include "hmfx/error.hpp"

#include "hmfx/exec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hmfx {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Grid: return "grid";
    case ErrorKind::DomainExceeded: return "domain-exceeded";
    case ErrorKind::GeometryDomain: return "geometry-domain";
    case ErrorKind::Tangency: return "tangency";
    case ErrorKind::SingularPoint: return "singular-point";
    case ErrorKind::TimeOrder: return "time-order";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::ShootingDiverged: return "shooting-diverged";
    case ErrorKind::NotAttained: return "not-attained";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::PartialResult: return "partial-result";
    case ErrorKind::NearAmbientOrigin: return "near-origin-of-ambient";
    case ErrorKind::LinearSolve: return "linear-solve";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Window: return "window";
    case ErrorKind::Support: return "support";
    case ErrorKind::Regularity: return "regularity";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace hmfx
