#include "contactlab/translated.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "contactlab/hessian.hpp"
#include "contactlab/numerics.hpp"

namespace contactlab {
namespace {

constexpr double kFixedPointTol = 1e-9;

// Endpoint displacement map G(p) = psi^t(p) - p and its FD Jacobian.
Vec displacement(const AutonomousHamiltonian& H, const Vec& p, double t,
                 double step) {
  return flow_map(H, p, t, step) - p;
}

Mat displacement_jacobian(const AutonomousHamiltonian& H, const Vec& p,
                          double t, double step) {
  const int d = H.phase_dim();
  const double h = 1e-6 * (1.0 + p.lpNorm<Eigen::Infinity>());
  Mat jac(d, d);
  Vec q = p;
  for (int j = 0; j < d; ++j) {
    const double save = q[j];
    q[j] = save + h;
    const Vec fp = displacement(H, q, t, step);
    q[j] = save - h;
    const Vec fm = displacement(H, q, t, step);
    q[j] = save;
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

bool newton_fixed_point(const AutonomousHamiltonian& H, Vec& p, double t,
                        double step, double tol, int max_iter = 40) {
  const SupportBox& box = H.support();
  Vec g = displacement(H, p, t, step);
  double gn = g.norm();
  for (int it = 0; it < max_iter; ++it) {
    if (gn < tol) return true;
    const Mat jac = displacement_jacobian(H, p, t, step);
    const Eigen::FullPivLU<Mat> lu(jac);
    if (!lu.isInvertible()) return false;
    const Vec dir = lu.solve(g);
    if (!dir.allFinite()) return false;
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 10; ++half) {
      Vec trial = p - lambda * dir;
      if (box.contains(trial)) {
        const Vec gt = displacement(H, trial, t, step);
        if (gt.norm() < gn) {
          p = trial;
          g = gt;
          gn = g.norm();
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return gn < tol;
  }
  return gn < tol;
}

}  // namespace

SpectrumReport spectrum_autonomous(const AutonomousHamiltonian& H, double t,
                                   int resolution, bool force) {
  if (!(t >= 0)) throw std::invalid_argument("spectrum time must be >= 0");
  SpectrumReport rep;
  rep.time = t;

  const AdmissibilityReport adm = admissibility_check(H, resolution);
  rep.hessian_bound = adm.bound;
  rep.admissible = adm.admissible;
  if (!adm.admissible && !force) {
    std::ostringstream msg;
    msg << "Hessian bound " << rep.hessian_bound
        << " is not below the 2*pi threshold; the translation spectrum "
           "formula is unsupported here (pass force to compute it anyway)";
    throw HypothesisError(msg.str());
  }

  const FieldExtrema ex = field_extrema(H, resolution);
  rep.selector = t * ex.max_value;
  rep.selector_inverse = t * (-ex.min_value) + 0.0;  // avoid -0.0 in reports

  std::vector<double> vals;
  vals.push_back(0.0);  // frozen exterior
  const CriticalPointReport cps = critical_points(H, resolution);
  for (const CriticalPoint& cp : cps.points) {
    if (!cp.exterior_rep) vals.push_back(t * cp.value);
  }
  vals.push_back(t * ex.max_value);
  vals.push_back(t * ex.min_value);

  std::sort(vals.begin(), vals.end());
  const double scale = 1.0 + std::abs(t) * std::max(ex.max_value, -ex.min_value);
  for (double v : vals) {
    if (rep.values.empty() || v - rep.values.back() > 1e-9 * scale)
      rep.values.push_back(v);
  }
  return rep;
}

double translation_selector(const AutonomousHamiltonian& H, double t,
                            int resolution) {
  return t * field_extrema(H, resolution).max_value;
}

double translation_selector_inverse(const AutonomousHamiltonian& H, double t,
                                    int resolution) {
  return t * (-field_extrema(H, resolution).min_value) + 0.0;
}

TranslatedPointReport brute_force_translated_points(
    const AutonomousHamiltonian& H, double t, int scan_resolution,
    double step) {
  if (!(t > 0)) throw std::invalid_argument("scan time must be positive");
  if (scan_resolution <= 0) scan_resolution = H.dim() == 1 ? 48 : 10;
  TranslatedPointReport rep;
  rep.time = t;
  rep.scan_resolution = scan_resolution;

  if (H.is_zero()) {
    rep.exterior_frozen = true;
    return rep;
  }
  const SupportBox& box = H.support();
  const int d = H.phase_dim();

  // Frozen exterior: the field vanishes identically outside the box, so a
  // handful of samples flowing nowhere certifies the whole complement.
  {
    bool frozen = true;
    Vec probe = box.hi + 0.25 * (box.hi - box.lo);
    for (int axis = 0; axis < d && frozen; ++axis) {
      Vec q = probe;
      q[axis] = box.lo[axis] - 0.3 * (box.hi[axis] - box.lo[axis]);
      if ((flow_map(H, q, t, 10.0 * step) - q).norm() > 0.0) frozen = false;
      if (std::abs(reeb_shift(H, q, t, 10.0 * step)) > 0.0) frozen = false;
    }
    rep.exterior_frozen = frozen;
  }

  // Coarse displacement scan.
  const PhaseGrid grid(box, scan_resolution);
  const double coarse_step = std::max(step, t / 200.0);
  double max_abs = 0.0;
  for (std::size_t f = 0; f < grid.node_count(); ++f)
    max_abs = std::max(max_abs, std::abs(H.value(grid.node(f))));
  const std::vector<std::uint8_t> exterior = exterior_zero_mask(
      [&H](const Vec& p) { return H.value(p); }, grid,
      kEssentialSupportRel * max_abs);

  std::vector<double> disp(grid.node_count(),
                           std::numeric_limits<double>::infinity());
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    if (exterior[f]) continue;
    const Vec p = grid.node(f);
    disp[f] = displacement(H, p, t, coarse_step).norm();
  }

  // Candidates: local minima of the displacement among face neighbors.
  std::vector<Vec> candidates;
  int idx[8];
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    if (exterior[f]) continue;
    grid.to_multi(f, idx);
    const double d0 = disp[f];
    bool local_min = true;
    for (int axis = 0; axis < grid.d && local_min; ++axis) {
      for (int delta : {-1, 1}) {
        const int old = idx[axis];
        const int next = old + delta;
        if (next < 0 || next > grid.res) continue;
        idx[axis] = next;
        if (disp[grid.to_flat(idx)] < d0) local_min = false;
        idx[axis] = old;
      }
    }
    if (local_min) candidates.push_back(grid.node(f));
  }

  // Add the refined critical points as seeds: equilibria are always fixed.
  const CriticalPointReport cps = critical_points(H);
  for (const CriticalPoint& cp : cps.points)
    if (!cp.exterior_rep) candidates.push_back(cp.location);

  // Newton refinement + dedup.
  const double spacing = grid.max_spacing();
  const double dedup_radius = 0.75 * spacing;
  const IntegratorSpec lift_spec{Scheme::RK4, step};
  for (const Vec& seed : candidates) {
    Vec p = seed;
    const double tol = kFixedPointTol * (1.0 + p.norm());
    if (!newton_fixed_point(H, p, t, step, tol)) {
      rep.unresolved_candidates.push_back(seed);
      continue;
    }
    bool dup = false;
    for (const TranslatedPoint& kept : rep.points) {
      if ((kept.base - p).norm() <= dedup_radius) {
        dup = true;
        break;
      }
    }
    if (dup) continue;

    const ContactPathSpec path = ContactPathSpec::autonomous(H, t);
    const Trajectory traj =
        integrate_contact(path, CylinderPoint(p, 0.0), lift_spec, true);
    TranslatedPoint tp;
    tp.base = p;
    tp.translation = traj.z_lift.back() - traj.z_lift.front();
    tp.fixed_point_residual = (traj.base.back() - p).norm();
    tp.conformal_residual = traj.max_conformal();
    rep.points.push_back(std::move(tp));
  }

  std::sort(rep.points.begin(), rep.points.end(),
            [](const TranslatedPoint& a, const TranslatedPoint& b) {
              return a.translation < b.translation;
            });
  return rep;
}

DiscriminantPointReport discriminant_points(const AutonomousHamiltonian& H,
                                            double t, int scan_resolution,
                                            double step, double integer_tol) {
  DiscriminantPointReport rep;
  rep.integer_tol = integer_tol;
  rep.time = t;
  const TranslatedPointReport all =
      brute_force_translated_points(H, t, scan_resolution, step);
  for (const TranslatedPoint& tp : all.points) {
    const double rounded = std::round(tp.translation);
    if (rounded == 0.0) continue;
    if (std::abs(tp.translation - rounded) <= integer_tol &&
        tp.conformal_residual <= 1e-6) {
      rep.points.push_back(tp);
    }
  }
  return rep;
}

}  // namespace contactlab
