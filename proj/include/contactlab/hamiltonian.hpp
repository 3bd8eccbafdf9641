#pragma once

// Compactly supported autonomous Hamiltonians on R^{2n} with exact support
// boxes and analytic (or finite-difference) derivatives.
//
// The workhorse family is the radial profile
//     f_B(x) = exp(-B^2 (x^2 - B)^{-2})   for |x| < sqrt(B),   0 otherwise,
// normalized so that the peak value is prescribed:  f_B(0) = e^{-1} for every
// B, hence  (A / f_B(0)) f_B = A e f_B  attains the value A at the center.
// All radial evaluators are written in the variable u = |p - c|^2, in which
// the profile is smooth; gradients and Hessians then follow from
//     H = psi(u):  grad H = 2 psi'(u) d,   Hess H = 2 psi'(u) I + 4 psi''(u) d d^T
// with d = p - c.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "contactlab/types.hpp"

namespace contactlab {

// The scalar profile f_B evaluated at x (1-d cross-section of the bump).
// Requires B > 0.
double eval_bump_profile(double B, double x);

class AutonomousHamiltonian {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  using HessFn = std::function<Mat(const Vec&)>;

  AutonomousHamiltonian() = default;

  static AutonomousHamiltonian from_parts(int n, ValueFn value, GradFn grad,
                                          HessFn hess, SupportBox box,
                                          std::string mode, std::string label);
  // Derivatives by central finite differences of `value`.
  static AutonomousHamiltonian from_value_only(int n, ValueFn value,
                                               SupportBox box, double fd_step,
                                               std::string label);

  int dim() const { return n_; }            // n
  int phase_dim() const { return 2 * n_; }  // 2n

  // All evaluators return exact zeros outside the support box.
  double value(const Vec& p) const;
  Vec gradient(const Vec& p) const;
  Mat hessian(const Vec& p) const;

  const SupportBox& support() const { return box_; }
  const std::string& derivative_mode() const { return mode_; }
  const std::string& label() const { return label_; }
  double fd_step() const { return fd_step_; }
  bool is_zero() const { return box_.empty(); }

 private:
  int n_ = 0;
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
  SupportBox box_;
  std::string mode_ = "analytic";
  std::string label_ = "zero";
  double fd_step_ = 1e-4;
};

// --- factories -------------------------------------------------------------

// H == 0 on R^{2n} (empty support box).
AutonomousHamiltonian make_zero(int n);

// scale * (A e) f_B(|p - center|); peak value scale*A at the center, support
// box center +- sqrt(B) per axis.  Requires B > 0, A > 0.
AutonomousHamiltonian make_radial_bump(double B, double A, int n,
                                       Vec center = Vec(), double scale = 1.0);

// Harmonic core (a/2)|p - center|^2 inside radius `cutoff_radius`, taken
// smoothly to zero over `transition_width` (a C^infinity step in the radius).
AutonomousHamiltonian make_quadratic_core(double a, double cutoff_radius,
                                          double transition_width, int n,
                                          Vec center = Vec());

// Bump supported on the annulus r in [r_inner, r_outer] with peak value A:
// identically zero on the inner disk, which is an open subset of its declared
// support box.  Used to exercise the regular-zero gating.
AutonomousHamiltonian make_ring_bump(double r_inner, double r_outer, double A,
                                     int n);

// Shear c * y_1 * X(p) where X is a product of per-axis C^infinity plateau
// cutoffs: X == 1 on the core box, 0 outside core_lo - width .. core_hi +
// width.  The core flow translates x_1 at rate -c.  Analytic derivatives.
struct ShearParams {
  int n = 1;
  double c = 1.25;
  Vec core_lo, core_hi;  // phase-space core box (2n entries each)
  Vec width;             // per-axis transition width (2n entries)
};
AutonomousHamiltonian make_shear(const ShearParams& params);

// Pointwise sum; support box is the hull.  All terms must share the same n.
AutonomousHamiltonian make_sum(const std::vector<AutonomousHamiltonian>& terms);

// s * H with exact support preservation (empty if s == 0).
AutonomousHamiltonian scale_hamiltonian(const AutonomousHamiltonian& H,
                                        double s);

// --- C^infinity step shared by the cutoff constructions --------------------

// s(t) = 0 for t <= 0, 1 for t >= 1, strictly increasing in between, with
// s(t) = f(t) / (f(t) + f(1-t)), f(t) = exp(-1/t).
struct SmoothStepEval {
  double s, ds, d2s;
};
SmoothStepEval smooth_step(double t);

// Plateau in one variable: 1 on [lo, hi], 0 outside [lo - w, hi + w].
SmoothStepEval plateau(double x, double lo, double hi, double w);

}  // namespace contactlab
