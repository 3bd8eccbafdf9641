#pragma once

// Shared value types for the prequantized phase space R^{2n} x S^1.
//
// Coordinate conventions used throughout the library:
//   * a Euclidean phase point is stored as p = (x_1..x_n, y_1..y_n),
//   * the circle fiber S^1 = R/Z is stored by a representative in [0,1),
//   * the contact form is  dz - sum_i y_i dx_i,  with Reeb field d/dz,
//   * the symplectic form on the base is  sum_i dx_i ^ dy_i.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace contactlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kTwoPi = 6.28318530717958647692528676656;

// A mathematical hypothesis needed by a formula does not hold for the input
// (for example a Hessian bound at or above 2*pi).  Exit code 2 in the CLI.
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two routes that must agree disagreed, or an asserted identity failed.
// Indicates an implementation/configuration problem.  Exit code 3 in the CLI.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A step-size or resolution diagnostic exceeded its tolerance; rerun with a
// smaller step.  Mapped to the integrity exit code by the CLI.
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wrap a real fiber coordinate into the fundamental domain [0,1).
inline double wrap_unit(double z) {
  double w = z - std::floor(z);
  if (w >= 1.0) w = 0.0;  // guard against floor rounding at exact integers
  return w;
}

struct CylinderPoint {
  Vec base;      // (x_1..x_n, y_1..y_n)
  double fiber;  // representative in [0,1)

  CylinderPoint() : fiber(0.0) {}
  CylinderPoint(Vec b, double z) : base(std::move(b)), fiber(wrap_unit(z)) {}
};

// Axis-aligned box outside of which a Hamiltonian vanishes identically.
// An empty box (size 0) encodes the identically-zero Hamiltonian.
struct SupportBox {
  Vec lo, hi;

  SupportBox() = default;
  SupportBox(Vec l, Vec h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo.size() != hi.size())
      throw std::invalid_argument("SupportBox: lo/hi dimension mismatch");
    for (int i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= hi[i]))
        throw std::invalid_argument("SupportBox: lo > hi on axis " +
                                    std::to_string(i));
  }

  bool empty() const { return lo.size() == 0; }
  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vec& p) const {
    if (empty()) return false;
    for (int i = 0; i < lo.size(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }

  bool strictly_inside(const Vec& p, double margin = 0.0) const {
    if (empty()) return false;
    for (int i = 0; i < lo.size(); ++i)
      if (p[i] <= lo[i] + margin || p[i] >= hi[i] - margin) return false;
    return true;
  }

  double widest_extent() const {
    if (empty()) return 0.0;
    return (hi - lo).maxCoeff();
  }

  // Smallest box containing both operands (an empty box is the identity).
  static SupportBox hull(const SupportBox& a, const SupportBox& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.dim() != b.dim())
      throw std::invalid_argument("SupportBox::hull: dimension mismatch");
    return SupportBox(a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi));
  }
};

inline void require_finite(const Vec& p, const char* what) {
  for (int i = 0; i < p.size(); ++i)
    if (!std::isfinite(p[i]))
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

}  // namespace contactlab
