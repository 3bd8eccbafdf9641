#pragma once

// Translated points of the time-t map of an autonomous compactly supported
// Hamiltonian, its translation spectrum, and the scalar selector.
//
// For phi = phi_H^t the relevant set of fiber translations is
//     { t H(p) : dH_p = 0 }  union  {0},
// the zero accounting for the frozen exterior of the support.  The selector
// picks the largest non-negative entry,
//     c(phi)      = t * max(0, max H),
//     c(phi^{-1}) = t * max(0, -min H),
// and a point is a discriminant witness when its translation is a nonzero
// integer while the conformal factor stays at 1 (the map then has a genuine
// fixed point on the quotient circle of circumference 1).

#include <vector>

#include "contactlab/critical.hpp"
#include "contactlab/flow.hpp"
#include "contactlab/hamiltonian.hpp"
#include "contactlab/types.hpp"

namespace contactlab {

struct SpectrumReport {
  std::vector<double> values;  // sorted, deduplicated translations
  double time = 1.0;
  double selector = 0.0;
  double selector_inverse = 0.0;
  double hessian_bound = 0.0;
  bool admissible = false;
};

// Translation spectrum of phi_H^t.  The construction is only backed by
// theory when the Hessian stays below 2*pi; by default a bound at or above
// that raises HypothesisError, `force` computes the formula anyway (the
// report still records admissible = false).
SpectrumReport spectrum_autonomous(const AutonomousHamiltonian& H, double t,
                                   int resolution = 0, bool force = false);

// The two selector values alone (same formulas, no admissibility gate; the
// callers that need the gate go through spectrum_autonomous).
double translation_selector(const AutonomousHamiltonian& H, double t,
                            int resolution = 0);
double translation_selector_inverse(const AutonomousHamiltonian& H, double t,
                                    int resolution = 0);

struct TranslatedPoint {
  Vec base;
  double translation = 0.0;         // fiber shift of the returning point
  double fixed_point_residual = 0.0;  // |psi^t(p) - p| after refinement
  double conformal_residual = 0.0;  // max |g| along the lift (0 expected)
};

struct TranslatedPointReport {
  std::vector<TranslatedPoint> points;
  std::vector<Vec> unresolved_candidates;
  // The complement of the support is pointwise fixed with zero translation;
  // set after an explicit sample check outside the box.
  bool exterior_frozen = false;
  double time = 1.0;
  int scan_resolution = 0;
};

// Direct search for base-fixed points of psi_H^t inside the essential
// support: coarse endpoint-displacement scan on a grid, local minima as
// candidates, damped Newton on psi^t(p) - p = 0 with a finite-difference
// Jacobian, then the fiber translation of each accepted point from the lift.
// A fixed circle (periodic orbit whose period divides t) shows up as a ring
// of representatives sharing one translation value.
TranslatedPointReport brute_force_translated_points(
    const AutonomousHamiltonian& H, double t, int scan_resolution = 0,
    double step = 1e-3);

struct DiscriminantPointReport {
  std::vector<TranslatedPoint> points;  // nonzero integer translations
  double integer_tol = 1e-4;
  double time = 1.0;
};

// Filters the brute-force set for translations within integer_tol of a
// nonzero integer (zero translation never discriminates: the identity
// component is reachable without crossing it).
DiscriminantPointReport discriminant_points(const AutonomousHamiltonian& H,
                                            double t, int scan_resolution = 0,
                                            double step = 1e-3,
                                            double integer_tol = 1e-4);

}  // namespace contactlab
