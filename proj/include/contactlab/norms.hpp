#pragma once

// Length functionals and norm values for paths of contactomorphisms of
// R^{2n} x S^1 generated by compactly supported Hamiltonians.
//
// Lengths are direct functional evaluations and are always computed.  Norm
// values are emitted only together with the hypothesis certificate that
// backs the closed form:
//     shelukhin_norm    = max{max h, -min h}             (Hessian < 2*pi)
//     fpr_norm          = max{ceil max h, ceil -min h}   (Hessian < 2*pi)
//     discriminant_norm = floor(max{max h, -min h}) + 1  (+ 0 regular value)
//     oscillation_norm  = floor(max h) + 1 or floor(-min h) + 1
//                                                        (+ sign-definite)
// A failed hypothesis yields a not-certified marker, never a number.

#include <string>
#include <vector>

#include "contactlab/critical.hpp"
#include "contactlab/flow.hpp"
#include "contactlab/hamiltonian.hpp"
#include "contactlab/types.hpp"

namespace contactlab {

enum class SignClass { NonNegative, NonPositive, Mixed };

struct CertifiedValue {
  double value = 0.0;    // meaningful only when certified
  bool certified = false;
  std::string reason;    // failed hypothesis when not certified
};

struct NormHypotheses {
  bool admissible = false;
  bool regular_zero = false;
  SignClass sign = SignClass::Mixed;
  double hessian_bound = 0.0;
};

struct DiscriminantLength {
  double value = 0.0;     // integer-valued when finite
  bool infinite = false;
  bool degenerate = false;  // constant path: no discriminant points ever
};

struct NormReport {
  double shelukhin_length = 0.0;
  CertifiedValue shelukhin_norm;
  DiscriminantLength discriminant_length;
  CertifiedValue discriminant_norm;
  CertifiedValue oscillation_norm;
  CertifiedValue fpr_norm;
  NormHypotheses hypotheses;
  double max_h = 0.0;
  double min_h = 0.0;
  bool identity = false;  // H == 0: every norm vanishes
};

// Per-time spatial extrema of the generating Hamiltonian k^t over the whole
// space (the exterior contributes 0).  For (scheduled) autonomous paths the
// spatial sweep happens once and the schedule factor is applied in closed
// form; the pushforward identity max_x |k^t(phi^t x)| = max_y |k^t(y)| keeps
// flow error out of every length quadrature.
struct PathSample {
  std::vector<double> times;
  std::vector<double> max_values;
  std::vector<double> min_values;
};

PathSample sample_path_extrema(const ContactPathSpec& path, int time_nodes = 0,
                               int grid_resolution = 0);

// integral over [0, horizon] of max{max k^t, -min k^t} = || k^t ||_inf.
double shelukhin_length(const ContactPathSpec& path, int grid_resolution = 0,
                        int time_nodes = 0);

// 1 / max{max H, -min H}; +infinity for H == 0.  Requires the small-Hessian
// and regular-zero hypotheses (HypothesisError otherwise): it is the first
// time a discriminant crossing can occur.
double t_zero(const AutonomousHamiltonian& H, int resolution = 0);

// floor(1/t_zero) + 1, degenerate for the zero Hamiltonian (reported with
// the conventional value 1 and the flag set: a constant path never meets the
// discriminant).
DiscriminantLength discriminant_length_autonomous(const AutonomousHamiltonian& H,
                                                  int resolution = 0);

NormReport norm_report(const AutonomousHamiltonian& H, int resolution = 0);

struct SelectorBoundReport {
  double c_value = 0.0;
  double c_inverse_value = 0.0;
  double integral_max = 0.0;      // int max k^t dt
  double integral_neg_min = 0.0;  // -int min k^t dt
  double slack = 0.0;             // integral_max - c_value
  double slack_inverse = 0.0;
  bool equality = false;          // |slack| below tolerance
  bool equality_inverse = false;
  double tolerance = 1e-6;
};

// Audits  c(phi) <= int max k^t dt  and  c(phi^{-1}) <= -int min k^t dt  for
// the supplied path against externally computed selector values; a violation
// beyond the quadrature tolerance raises IntegrityError.
SelectorBoundReport selector_lower_bound_audit(const ContactPathSpec& path,
                                               double c_value,
                                               double c_inverse_value,
                                               int grid_resolution = 0,
                                               int time_nodes = 0,
                                               double tolerance = 1e-6);

struct FloorBoundReport {
  double c_value = 0.0;
  double c_inverse_value = 0.0;
  double lhs = 0.0;  // max{floor(c)+1, floor(c_inv)+1}
  double rhs = 0.0;  // certified discriminant norm
  bool equality = false;
  bool degenerate = false;  // identity case: 0 = 0
};

// Audits  max{floor c(phi)+1, floor c(phi^{-1})+1} <= nu_d(phi)  with the
// module's own selector and norm values; on this class the bound is an
// equality and that is asserted too (IntegrityError on failure).
FloorBoundReport floor_lower_bound_audit(const AutonomousHamiltonian& H,
                                         int resolution = 0);

}  // namespace contactlab
