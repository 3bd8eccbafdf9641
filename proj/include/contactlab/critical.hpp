#pragma once

// Critical point detection (grid scan + Newton refinement) and the
// regular-zero certificate: no zero of H with vanishing gradient inside the
// essential support.  Both operations share an "exterior zero region" mask:
// grid nodes where |H| is numerically zero and which are connected to the box
// boundary through such nodes.  Zeros in that region belong to the complement
// of the support, not to its interior, and are excluded; the all-flat tail of
// a compactly supported H would otherwise flood the reports.

#include <array>
#include <vector>

#include "contactlab/hamiltonian.hpp"
#include "contactlab/numerics.hpp"
#include "contactlab/types.hpp"

namespace contactlab {

struct CriticalPoint {
  Vec location;
  double value = 0.0;
  double gradient_residual = 0.0;
  // (positive, zero, negative) inertia of the Hessian at the point
  std::array<int, 3> hessian_signature{0, 0, 0};
  // synthetic representative of the constant exterior (value 0)
  bool exterior_rep = false;
};

struct CriticalPointReport {
  std::vector<CriticalPoint> points;       // refined interior points + exterior rep
  std::vector<Vec> unresolved_seeds;       // Newton failures, reported not dropped
  int grid_resolution = 0;
  double newton_tol = 0.0;
};

// Interior critical points of H (grid seeding, damped Newton on grad H = 0,
// clustering at twice the grid spacing), plus one synthetic entry of value 0
// for the critical exterior.  Zero-set points outside the essential support
// are excluded via the flood-fill mask.
CriticalPointReport critical_points(const AutonomousHamiltonian& H,
                                    int resolution = 0,
                                    double newton_tol = 1e-10);

struct FieldExtrema {
  double max_value = 0.0;  // >= 0 (the constant exterior contributes 0)
  double min_value = 0.0;  // <= 0
  Vec argmax;
  Vec argmin;
};

// Refined global extrema of H over its support box.  Grid sweep, local
// compass refinement of the best nodes, then a merge with the refined
// critical values; the extrema of a smooth compactly supported function are
// critical values, so the two routes agree and the merge guards against
// degenerate (non-isolated) maximizers that defeat Newton.
FieldExtrema field_extrema(const AutonomousHamiltonian& H, int resolution = 0);

// True iff no point of the essential support interior carries |H| < eps_val
// and |grad H| < eps_grad simultaneously (grid scan refined through the
// critical points of H).  Certifies that 0 is a regular value of H inside
// its support at the working tolerances.
bool regular_zero_check(const AutonomousHamiltonian& H, int resolution = 0,
                        double eps_val = 1e-6, double eps_grad = 1e-5);

// Relative threshold defining the numerical support on the grid:
// |H| <= kEssentialSupportRel * max|H| counts as numerically zero.
inline constexpr double kEssentialSupportRel = 1e-4;

}  // namespace contactlab
