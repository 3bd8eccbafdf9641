#include "contactlab/hessian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "contactlab/numerics.hpp"

namespace contactlab {

int default_grid_resolution(int n) { return n <= 1 ? 256 : 64; }

namespace {

double sym_opnorm(const Mat& m) {
  const int d = static_cast<int>(m.rows());
  if (d == 2) {
    // closed form for symmetric 2x2: |mid| + radius
    const double mid = 0.5 * (m(0, 0) + m(1, 1));
    const double rad = std::hypot(0.5 * (m(0, 0) - m(1, 1)), m(0, 1));
    return std::abs(mid) + rad;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void require_symmetric(const Mat& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw IntegrityError("hessian_operator_norm: asymmetric Hessian (|H-H^T| = " +
                         std::to_string(asym) + ")");
}

}  // namespace

double hessian_operator_norm(const AutonomousHamiltonian& H, const Vec& p) {
  if (p.size() != H.phase_dim())
    throw std::invalid_argument("hessian_operator_norm: wrong point dimension");
  const Mat m = H.hessian(p);
  require_symmetric(m);
  return sym_opnorm(m);
}

HessianBoundReport global_hessian_bound(const AutonomousHamiltonian& H,
                                        int resolution) {
  HessianBoundReport rep;
  if (H.is_zero()) {
    rep.argmax = Vec::Zero(H.phase_dim());
    return rep;
  }
  if (resolution <= 0) resolution = default_grid_resolution(H.dim());
  rep.grid_resolution = resolution;

  const PhaseGrid grid(H.support(), resolution);
  // Keep the five best nodes of the sweep and refine each locally; distant
  // near-ties (e.g. core vs. cutoff shell) would defeat a single-start
  // refinement.
  constexpr int kTop = 5;
  double top_val[kTop];
  std::size_t top_flat[kTop];
  int filled = 0;
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    const double v = hessian_operator_norm(H, grid.node(f));
    int pos = filled;
    while (pos > 0 && top_val[pos - 1] < v) --pos;
    if (pos >= kTop) continue;
    if (filled < kTop) ++filled;
    for (int k = filled - 1; k > pos; --k) {
      top_val[k] = top_val[k - 1];
      top_flat[k] = top_flat[k - 1];
    }
    top_val[pos] = v;
    top_flat[pos] = f;
  }
  auto objective = [&H](const Vec& p) { return hessian_operator_norm(H, p); };
  const double min_step = 1e-9 * std::max(1.0, grid.max_spacing());
  for (int k = 0; k < filled; ++k) {
    const RefineResult r = refine_maximum(objective, grid.node(top_flat[k]),
                                          grid.max_spacing(), min_step,
                                          H.support());
    if (r.value > rep.bound) {
      rep.bound = r.value;
      rep.argmax = r.argmax;
    }
  }
  return rep;
}

AdmissibilityReport admissibility_check(const AutonomousHamiltonian& H,
                                        int resolution, double safety_margin) {
  if (safety_margin < 0.0)
    throw std::invalid_argument("admissibility_check: negative safety margin");
  const HessianBoundReport b = global_hessian_bound(H, resolution);
  AdmissibilityReport rep;
  rep.bound = b.bound;
  rep.safety_margin = safety_margin;
  rep.admissible = b.bound < kTwoPi - safety_margin;
  rep.witness = b.argmax;
  return rep;
}

double compute_B0(double A, int n, double B_lo, double B_hi, double rel_tol,
                  int resolution, double safety_margin) {
  if (!(A > 0.0)) throw std::domain_error("compute_B0: A must be > 0");
  if (!(0.0 < B_lo && B_lo < B_hi))
    throw std::domain_error("compute_B0: need 0 < B_lo < B_hi");
  if (!(rel_tol > 0.0)) throw std::domain_error("compute_B0: rel_tol must be > 0");
  const double target = kTwoPi - safety_margin;
  auto bound_at = [&](double B) {
    return global_hessian_bound(make_radial_bump(B, A, n), resolution).bound;
  };
  double lo = B_lo, hi = B_hi;
  const double f_lo = bound_at(lo), f_hi = bound_at(hi);
  if (!(f_lo >= target))
    throw std::domain_error(
        "compute_B0: bracket low end already admissible; widen the bracket");
  if (!(f_hi < target))
    throw std::domain_error(
        "compute_B0: bracket high end not admissible; widen the bracket");
  // The bound is strictly decreasing in B for this family, so bisection on
  // [lo, hi] keeps lo inadmissible and hi admissible.
  while ((hi - lo) / hi > rel_tol) {
    const double mid = 0.5 * (lo + hi);
    if (bound_at(mid) < target)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace contactlab
