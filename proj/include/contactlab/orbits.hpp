#pragma once

// Short periodic orbits of the base flow and the two consistency checks
// around them: the small-Hessian certificate (a Hessian bound below 2*pi
// excludes nonconstant orbits of period <= 1; verified in the falsifiable
// direction "orbit found => bound >= 2*pi") and the Parseval loop
// inequality  ||dgamma/dt|| <= ||d2gamma/dt2|| / (2*pi)  for closed curves
// with zero-mean derivative, which is the analytic engine behind the
// exclusion.

#include <vector>

#include "contactlab/hamiltonian.hpp"
#include "contactlab/types.hpp"

namespace contactlab {

struct OrbitCandidate {
  Vec seed;                       // refined point on the orbit
  double period = 0.0;            // in (0, T_max]
  double closure_residual = 0.0;  // |psi^period(seed) - seed|
  double max_displacement = 0.0;  // max distance from the seed along the orbit
  bool nonconstant = true;
};

struct OrbitSearchReport {
  std::vector<OrbitCandidate> orbits;
  std::vector<Vec> unresolved;  // near-closures Newton could not settle
  double t_max = 1.0;
  int grid_resolution = 0;
  int period_samples = 0;
};

// Scans grid seeds, samples closure distances along one trajectory per seed,
// refines near-returns by a joint Newton iteration in (point, period) with a
// phase-fixing condition, and clusters representatives of the same orbit.
// Constant orbits (|grad H| < 1e-8) are filtered out.
OrbitSearchReport find_periodic_orbits(const AutonomousHamiltonian& H,
                                       double t_max = 1.0,
                                       int grid_resolution = 0,
                                       int period_samples = 256,
                                       double step = 1e-3);

struct PeriodCertificate {
  double bound = 0.0;
  int orbits_found = 0;
  bool consistent = true;
  OrbitSearchReport search;
};

// consistent = NOT(bound < 2*pi AND nonconstant orbit of period <= 1 found).
// Inconsistency means an integrator or eigensolver bug, hence IntegrityError.
// An empty search certifies consistency at this resolution only, nothing
// stronger.
PeriodCertificate hessian_period_certificate(const AutonomousHamiltonian& H,
                                             int grid_resolution = 0,
                                             int period_samples = 256);

struct ParsevalReport {
  double velocity_norm = 0.0;      // L2 norm of dgamma/dt
  double acceleration_norm = 0.0;  // L2 norm of d2gamma/dt2
  double bound = 0.0;              // acceleration_norm / (2*pi)
  double margin = 0.0;             // bound - velocity_norm
  bool ok = false;
};

// Spectral check of the loop inequality on uniform samples gamma(k/N),
// k = 0..N (both endpoints present).  N must be a power of two >= 128 and
// the endpoint gap below 1e-10 (std::domain_error otherwise).  Equality
// holds exactly for single-mode loops.
ParsevalReport loop_parseval_check(const std::vector<Vec>& samples,
                                   double tolerance = 1e-9);

}  // namespace contactlab
