#pragma once

// Displacement of cylinders U = B^{2n}(r) x S^1 by contact flows and the
// capacity-energy audit:
//     ceil(nu(phi)) >= ceil(c(U)) / 2        for every certified norm nu,
//     ceil(c(U)) <= ceil(c(phi)) + ceil(c(phi^{-1}))
// whenever phi displaces U, with c(U) = pi r^2 for ball cylinders.

#include <string>
#include <vector>

#include "contactlab/hamiltonian.hpp"
#include "contactlab/norms.hpp"
#include "contactlab/types.hpp"

namespace contactlab {

struct DomainSpec {
  enum class Kind { BallCylinder, BoxCylinder };
  Kind kind = Kind::BallCylinder;
  double radius = 1.0;
  Vec center;      // base center, dimension 2n
  SupportBox box;  // only for box cylinders

  static DomainSpec ball_cylinder(double radius, Vec center);
  static DomainSpec box_cylinder(SupportBox box);
};

// pi r^2 for ball cylinders; box cylinders carry no closed-form value here
// and raise std::invalid_argument.
double cylinder_capacity(const DomainSpec& U);

struct DisplacementReport {
  bool displaced = false;        // no sampled image lands back in U
  double min_separation = 0.0;   // min over images of dist(image, U)
  bool certified = false;        // displaced with margin > 2x sample spacing
  double margin_required = 0.0;
  int base_samples = 0;
  int fiber_samples = 0;
  double time = 1.0;
};

// Samples U on a base grid times a small fiber grid, pushes every sample
// through the contact lift of H at time t, and measures separation from U.
DisplacementReport displacement_check(const AutonomousHamiltonian& H,
                                      const DomainSpec& U,
                                      int grid_resolution = 0, double t = 1.0,
                                      double step = 1e-3);

struct NormSlack {
  std::string name;
  double norm_ceil = 0.0;
  double required = 0.0;  // ceil(c(U)) / 2
  double slack = 0.0;
};

struct CapacityAuditReport {
  double capacity = 0.0;
  double ceil_capacity = 0.0;
  DisplacementReport displacement;
  NormReport norms;
  // With an inadmissible displacing Hamiltonian no norm is certified: the
  // audit reports the (always computable) Shelukhin length and flags the
  // hypothesis gap instead of asserting anything.
  bool hypothesis_gap = false;
  std::vector<NormSlack> slacks;
  double c_value = 0.0;
  double c_inverse_value = 0.0;
  double sandon_lhs = 0.0;  // ceil c(U)
  double sandon_rhs = 0.0;  // ceil c(phi) + ceil c(phi^{-1})
  bool sandon_ok = false;
  bool all_ok = false;
};

// Requires a displacing H (HypothesisError otherwise).  Inequality failures
// beyond snapping tolerance raise IntegrityError.
CapacityAuditReport capacity_energy_audit(const AutonomousHamiltonian& H,
                                          const DomainSpec& U,
                                          int grid_resolution = 0,
                                          double t = 1.0, double step = 1e-3);

}  // namespace contactlab
