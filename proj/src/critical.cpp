#include "contactlab/critical.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

#include "contactlab/hessian.hpp"

namespace contactlab {

namespace {

struct GridField {
  PhaseGrid grid;
  std::vector<double> values;       // H at nodes
  std::vector<double> grad_norms;   // |grad H| at nodes
  std::vector<std::uint8_t> exterior;
  double max_abs = 0.0;
};

GridField evaluate_field(const AutonomousHamiltonian& H, int resolution) {
  GridField out{PhaseGrid(H.support(), resolution), {}, {}, {}, 0.0};
  const std::size_t count = out.grid.node_count();
  out.values.resize(count);
  out.grad_norms.resize(count);
  for (std::size_t f = 0; f < count; ++f) {
    const Vec p = out.grid.node(f);
    out.values[f] = H.value(p);
    out.grad_norms[f] = H.gradient(p).norm();
    out.max_abs = std::max(out.max_abs, std::abs(out.values[f]));
  }
  const double threshold = kEssentialSupportRel * out.max_abs;
  auto value = [&](const Vec& p) { return H.value(p); };
  out.exterior = exterior_zero_mask(value, out.grid, threshold);
  return out;
}

// Damped Newton iteration for grad H = 0.  Returns true on convergence.
bool newton_critical(const AutonomousHamiltonian& H, Vec& p, double tol,
                     int max_iter = 60) {
  const SupportBox& box = H.support();
  Vec g = H.gradient(p);
  double gn = g.norm();
  for (int it = 0; it < max_iter; ++it) {
    if (gn < tol) return true;
    const Mat hess = H.hessian(p);
    const Eigen::FullPivLU<Mat> lu(hess);
    if (!lu.isInvertible()) return false;
    const Vec step = lu.solve(g);
    if (!step.allFinite()) return false;
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 10; ++half) {
      Vec trial = p - lambda * step;
      if (box.contains(trial)) {
        const Vec gt = H.gradient(trial);
        const double gtn = gt.norm();
        if (gtn < gn) {
          p = trial;
          g = gt;
          gn = gtn;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return gn < tol;
  }
  return g.norm() < tol;
}

std::array<int, 3> inertia(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  const Vec ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double zero_tol = 1e-7 * scale;
  std::array<int, 3> sig{0, 0, 0};
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] > zero_tol)
      ++sig[0];
    else if (ev[i] < -zero_tol)
      ++sig[2];
    else
      ++sig[1];
  }
  return sig;
}

CriticalPoint exterior_entry(const AutonomousHamiltonian& H) {
  CriticalPoint cp;
  const int d = H.phase_dim();
  if (H.is_zero()) {
    cp.location = Vec::Zero(d);
  } else {
    const SupportBox& box = H.support();
    cp.location = box.hi + 0.1 * (box.hi - box.lo) +
                  Vec::Constant(d, 0.1);  // strictly outside the box
  }
  cp.value = 0.0;
  cp.gradient_residual = 0.0;
  cp.hessian_signature = {0, d, 0};
  cp.exterior_rep = true;
  return cp;
}

}  // namespace

CriticalPointReport critical_points(const AutonomousHamiltonian& H,
                                    int resolution, double newton_tol) {
  if (resolution <= 0) resolution = default_grid_resolution(H.dim());
  if (!(newton_tol > 0.0))
    throw std::invalid_argument("critical_points: newton_tol must be > 0");
  CriticalPointReport rep;
  rep.grid_resolution = resolution;
  rep.newton_tol = newton_tol;
  if (H.is_zero()) {
    rep.points.push_back(exterior_entry(H));
    return rep;
  }

  const GridField field = evaluate_field(H, resolution);
  const PhaseGrid& grid = field.grid;
  const double spacing = grid.max_spacing();
  const double cluster_radius = 2.0 * spacing;

  // Seeds: non-exterior nodes whose |grad H| is a (non-strict) local minimum
  // among face neighbors.
  std::vector<std::size_t> seeds;
  int idx[8];
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    if (field.exterior[f]) continue;
    grid.to_multi(f, idx);
    const double g0 = field.grad_norms[f];
    bool local_min = true;
    for (int axis = 0; axis < grid.d && local_min; ++axis) {
      for (int delta : {-1, 1}) {
        const int old = idx[axis];
        const int next = old + delta;
        if (next < 0 || next > grid.res) continue;
        idx[axis] = next;
        if (field.grad_norms[grid.to_flat(idx)] < g0) local_min = false;
        idx[axis] = old;
      }
    }
    if (local_min) seeds.push_back(f);
  }

  // Cluster seeds (chain merge within the cluster radius) and keep the
  // best-gradient representative of each cluster.
  std::vector<Vec> seed_pts;
  std::vector<double> seed_g;
  for (std::size_t f : seeds) {
    const Vec p = grid.node(f);
    bool merged = false;
    for (std::size_t k = 0; k < seed_pts.size(); ++k) {
      if ((seed_pts[k] - p).norm() <= cluster_radius) {
        if (field.grad_norms[f] < seed_g[k]) {
          seed_pts[k] = p;
          seed_g[k] = field.grad_norms[f];
        }
        merged = true;
        break;
      }
    }
    if (!merged) {
      seed_pts.push_back(p);
      seed_g.push_back(field.grad_norms[f]);
    }
  }

  const double support_threshold = kEssentialSupportRel * field.max_abs;
  std::vector<CriticalPoint> found;
  for (const Vec& seed : seed_pts) {
    Vec p = seed;
    if (!newton_critical(H, p, newton_tol)) {
      rep.unresolved_seeds.push_back(seed);
      continue;
    }
    if (!H.support().contains(p)) {
      rep.unresolved_seeds.push_back(seed);
      continue;
    }
    // Zero-set points that belong to the exterior region are tail artifacts,
    // not interior critical points.
    const double v = H.value(p);
    if (std::abs(v) <= support_threshold &&
        field.exterior[grid.nearest_node(p)]) {
      continue;
    }
    CriticalPoint cp;
    cp.location = p;
    cp.value = v;
    cp.gradient_residual = H.gradient(p).norm();
    cp.hessian_signature = inertia(H.hessian(p));
    found.push_back(cp);
  }

  // Deduplicate refined points.
  for (const CriticalPoint& cp : found) {
    bool dup = false;
    for (const CriticalPoint& kept : rep.points) {
      if (!kept.exterior_rep &&
          (kept.location - cp.location).norm() <= cluster_radius &&
          std::abs(kept.value - cp.value) <= 1e-8 * std::max(1.0, field.max_abs)) {
        dup = true;
        break;
      }
    }
    if (!dup) rep.points.push_back(cp);
  }

  rep.points.push_back(exterior_entry(H));
  return rep;
}

FieldExtrema field_extrema(const AutonomousHamiltonian& H, int resolution) {
  if (resolution <= 0) resolution = default_grid_resolution(H.dim());
  FieldExtrema ex;
  const int d = H.phase_dim();
  ex.argmax = Vec::Zero(d);
  ex.argmin = Vec::Zero(d);
  if (H.is_zero()) return ex;

  const SupportBox& box = H.support();
  const PhaseGrid grid(box, resolution);
  double best_max = 0.0, best_min = 0.0;
  std::size_t node_max = 0, node_min = 0;
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    const double v = H.value(grid.node(f));
    if (v > best_max) {
      best_max = v;
      node_max = f;
    }
    if (v < best_min) {
      best_min = v;
      node_min = f;
    }
  }

  const double spacing = grid.max_spacing();
  const double min_step = std::max(1e-9, 1e-9 * spacing);
  auto value = [&H](const Vec& p) { return H.value(p); };
  auto neg_value = [&H](const Vec& p) { return -H.value(p); };
  if (best_max > 0.0) {
    RefineResult r =
        refine_maximum(value, grid.node(node_max), spacing, min_step, box);
    best_max = r.value;
    ex.argmax = r.argmax;
  }
  if (best_min < 0.0) {
    RefineResult r =
        refine_maximum(neg_value, grid.node(node_min), spacing, min_step, box);
    best_min = -r.value;
    ex.argmin = r.argmax;
  }

  // Cross-merge with the refined critical values (the global extrema of a
  // smooth compactly supported function are critical values).
  const CriticalPointReport cps = critical_points(H, resolution);
  for (const CriticalPoint& cp : cps.points) {
    if (cp.exterior_rep) continue;
    if (cp.value > best_max) {
      best_max = cp.value;
      ex.argmax = cp.location;
    }
    if (cp.value < best_min) {
      best_min = cp.value;
      ex.argmin = cp.location;
    }
  }

  ex.max_value = std::max(0.0, best_max);
  ex.min_value = std::min(0.0, best_min);
  if (best_max <= 0.0) ex.argmax = box.hi + Vec::Constant(d, 0.5);
  if (best_min >= 0.0) ex.argmin = box.hi + Vec::Constant(d, 0.5);
  return ex;
}

bool regular_zero_check(const AutonomousHamiltonian& H, int resolution,
                        double eps_val, double eps_grad) {
  if (resolution <= 0) resolution = default_grid_resolution(H.dim());
  if (H.is_zero()) return true;  // empty support: nothing to certify

  const GridField field = evaluate_field(H, resolution);
  if (field.max_abs == 0.0) return true;
  const PhaseGrid& grid = field.grid;

  // Direct grid violations inside the essential support.
  int idx[8];
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    if (field.exterior[f]) continue;
    grid.to_multi(f, idx);
    if (grid.on_boundary(idx)) continue;
    if (std::abs(field.values[f]) < eps_val && field.grad_norms[f] < eps_grad)
      return false;
  }

  // Refined check: a critical point at level zero inside the essential
  // support (tangential zeros a grid node can straddle).
  const CriticalPointReport cps = critical_points(H, resolution);
  for (const CriticalPoint& cp : cps.points) {
    if (cp.exterior_rep) continue;
    if (std::abs(cp.value) < eps_val) return false;
  }
  return true;
}

}  // namespace contactlab
