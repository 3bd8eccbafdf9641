#include "contactlab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "contactlab/flow.hpp"
#include "contactlab/numerics.hpp"
#include "contactlab/translated.hpp"

namespace contactlab {

DomainSpec DomainSpec::ball_cylinder(double radius, Vec center) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be > 0");
  if (center.size() % 2 != 0 || center.size() == 0)
    throw std::invalid_argument("ball center must have even dimension 2n");
  DomainSpec u;
  u.kind = Kind::BallCylinder;
  u.radius = radius;
  u.center = std::move(center);
  return u;
}

DomainSpec DomainSpec::box_cylinder(SupportBox box) {
  if (box.empty()) throw std::invalid_argument("box cylinder must be nonempty");
  DomainSpec u;
  u.kind = Kind::BoxCylinder;
  u.box = std::move(box);
  return u;
}

double cylinder_capacity(const DomainSpec& U) {
  if (U.kind != DomainSpec::Kind::BallCylinder)
    throw std::invalid_argument(
        "capacity is only available for ball cylinders (pi r^2)");
  return (kTwoPi / 2.0) * U.radius * U.radius;  // pi r^2
}

DisplacementReport displacement_check(const AutonomousHamiltonian& H,
                                      const DomainSpec& U, int grid_resolution,
                                      double t, double step) {
  if (U.kind != DomainSpec::Kind::BallCylinder)
    throw std::invalid_argument("displacement sampling expects a ball cylinder");
  if (U.center.size() != H.phase_dim() && !H.is_zero())
    throw std::invalid_argument("domain center dimension does not match H");
  if (grid_resolution <= 0) grid_resolution = 16;

  DisplacementReport rep;
  rep.time = t;
  const int d = static_cast<int>(U.center.size());
  SupportBox ball_box;
  ball_box.lo = U.center - Vec::Constant(d, U.radius);
  ball_box.hi = U.center + Vec::Constant(d, U.radius);
  const PhaseGrid grid(ball_box, grid_resolution);
  const double spacing = grid.max_spacing();
  rep.margin_required = 2.0 * spacing;

  constexpr int kFiberSamples = 4;
  rep.fiber_samples = kFiberSamples;
  const ContactPathSpec path =
      H.is_zero() ? ContactPathSpec::autonomous(make_zero(d / 2), t)
                  : ContactPathSpec::autonomous(H, t);
  const IntegratorSpec spec{Scheme::RK4, step};

  double min_sep = std::numeric_limits<double>::infinity();
  int samples = 0;
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    const Vec p = grid.node(f);
    if ((p - U.center).norm() > U.radius) continue;
    ++samples;
    for (int zi = 0; zi < kFiberSamples; ++zi) {
      const double z = static_cast<double>(zi) / kFiberSamples;
      const Trajectory traj =
          integrate_contact(path, CylinderPoint(p, z), spec, false);
      // U is a full cylinder over the ball: membership of the image only
      // depends on its base component.
      const double sep = (traj.base.back() - U.center).norm() - U.radius;
      min_sep = std::min(min_sep, sep);
    }
  }
  rep.base_samples = samples;
  rep.min_separation = samples == 0 ? 0.0 : min_sep;
  rep.displaced = samples > 0 && min_sep > 0.0;
  rep.certified = rep.displaced && min_sep > rep.margin_required;
  return rep;
}

CapacityAuditReport capacity_energy_audit(const AutonomousHamiltonian& H,
                                          const DomainSpec& U,
                                          int grid_resolution, double t,
                                          double step) {
  CapacityAuditReport rep;
  rep.capacity = cylinder_capacity(U);
  rep.ceil_capacity = static_cast<double>(snapped_ceil(rep.capacity));

  rep.displacement = displacement_check(H, U, grid_resolution, t, step);
  if (!rep.displacement.displaced) {
    throw HypothesisError(
        "capacity-energy audit needs the flow to displace the cylinder");
  }

  rep.norms = norm_report(H);
  if (!rep.norms.hypotheses.admissible) {
    // No certificate available: record the length, flag the gap, assert
    // nothing (the proposition itself is not contradicted).
    rep.hypothesis_gap = true;
    rep.all_ok = true;
    return rep;
  }

  const double required = 0.5 * rep.ceil_capacity;
  auto audit_norm = [&](const std::string& name, const CertifiedValue& cv) {
    if (!cv.certified) return;
    NormSlack s;
    s.name = name;
    s.norm_ceil = static_cast<double>(snapped_ceil(cv.value));
    s.required = required;
    s.slack = s.norm_ceil - required;
    if (s.slack < 0.0) {
      std::ostringstream msg;
      msg << "capacity-energy violation for " << name << ": ceil(" << cv.value
          << ") = " << s.norm_ceil << " is below " << required;
      throw IntegrityError(msg.str());
    }
    rep.slacks.push_back(std::move(s));
  };
  audit_norm("shelukhin", rep.norms.shelukhin_norm);
  audit_norm("fpr", rep.norms.fpr_norm);
  audit_norm("discriminant", rep.norms.discriminant_norm);
  audit_norm("oscillation", rep.norms.oscillation_norm);

  rep.c_value = t * std::max(0.0, rep.norms.max_h);
  rep.c_inverse_value = t * std::max(0.0, -rep.norms.min_h);
  rep.sandon_lhs = rep.ceil_capacity;
  rep.sandon_rhs = static_cast<double>(snapped_ceil(rep.c_value) +
                                       snapped_ceil(rep.c_inverse_value));
  rep.sandon_ok = rep.sandon_lhs <= rep.sandon_rhs;
  if (!rep.sandon_ok) {
    std::ostringstream msg;
    msg << "triangle bound violated: ceil c(U) = " << rep.sandon_lhs
        << " exceeds ceil c(phi) + ceil c(phi^{-1}) = " << rep.sandon_rhs;
    throw IntegrityError(msg.str());
  }
  rep.all_ok = true;
  return rep;
}

}  // namespace contactlab
