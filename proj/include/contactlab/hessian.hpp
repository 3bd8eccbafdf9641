#pragma once

// Hessian spectral analysis: pointwise operator norms, the global bound over
// the support box, the small-Hessian admissibility gate (bound < 2*pi), and
// the smallest bump width parameter B_0(A) meeting that gate.

#include "contactlab/hamiltonian.hpp"
#include "contactlab/types.hpp"

namespace contactlab {

// Default sweep resolutions per phase dimension (cells per axis).
int default_grid_resolution(int n);

// Largest |eigenvalue| of the (symmetric) Hessian at p.
// Throws IntegrityError if the Hessian is asymmetric beyond tolerance.
double hessian_operator_norm(const AutonomousHamiltonian& H, const Vec& p);

struct HessianBoundReport {
  double bound = 0.0;   // sup over the box of the Hessian operator norm
  Vec argmax;           // where the refined maximum was attained
  int grid_resolution = 0;
};

// Grid sweep over the support box followed by compass-search refinement of
// the best cell.  For the zero Hamiltonian the bound is 0.
HessianBoundReport global_hessian_bound(const AutonomousHamiltonian& H,
                                        int resolution = 0);

struct AdmissibilityReport {
  double bound = 0.0;
  double threshold = kTwoPi;
  double safety_margin = 1e-3;
  bool admissible = false;
  Vec witness;  // location of the Hessian-norm maximum
};

// admissible  <=>  global bound < 2*pi - safety_margin.
AdmissibilityReport admissibility_check(const AutonomousHamiltonian& H,
                                        int resolution = 0,
                                        double safety_margin = 1e-3);

// Smallest B (within bracket [B_lo, B_hi], relative tolerance rel_tol) such
// that the bump with peak A and width parameter B passes the admissibility
// gate.  The returned value lies on the admissible side of the bracket.
// Throws std::domain_error if the bracket does not straddle the gate.
double compute_B0(double A, int n, double B_lo = 0.1, double B_hi = 50.0,
                  double rel_tol = 1e-3, int resolution = 0,
                  double safety_margin = 1e-3);

}  // namespace contactlab
